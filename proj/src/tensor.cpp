#include "horn/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace horn::tensor {

namespace {

bool reserved(const std::string& label) { return !label.empty() && label[0] == '#'; }

// label -> (upper count, lower count)
std::map<std::string, std::pair<int, int>> occurrences(const Term& t) {
    std::map<std::string, std::pair<int, int>> occ;
    for (const Atom& a : t.atoms)
        for (const Index& i : a.slots) (i.upper ? occ[i.label].first : occ[i.label].second) += 1;
    return occ;
}

std::vector<Index> term_free(const Term& t) {
    std::vector<Index> out;
    for (const auto& [label, c] : occurrences(t))
        if (c.first + c.second == 1) out.push_back(Index{label, c.first == 1});
    return out;
}

std::set<std::string> term_dummies(const Term& t) {
    std::set<std::string> out;
    for (const auto& [label, c] : occurrences(t))
        if (c.first + c.second == 2) out.insert(label);
    return out;
}

std::set<std::string> all_labels(const TensorExpr& e) {
    std::set<std::string> out;
    for (const Term& t : e.terms())
        for (const Atom& a : t.atoms)
            for (const Index& i : a.slots) out.insert(i.label);
    return out;
}

void relabel(Term& t, const std::map<std::string, std::string>& m) {
    for (Atom& a : t.atoms)
        for (Index& i : a.slots)
            if (auto it = m.find(i.label); it != m.end()) i.label = it->second;
}

// Renames every dummy of `e` that also occurs in `avoid` to a fresh reserved label.
TensorExpr rename_apart(const TensorExpr& e, const std::set<std::string>& avoid) {
    std::set<std::string> used = all_labels(e);
    used.insert(avoid.begin(), avoid.end());
    int next = 0;
    std::vector<Term> out;
    for (Term t : e.terms()) {
        std::map<std::string, std::string> m;
        for (const std::string& d : term_dummies(t)) {
            if (!avoid.count(d)) continue;
            std::string fresh;
            do fresh = "#r" + std::to_string(next++);
            while (used.count(fresh));
            used.insert(fresh);
            m[d] = fresh;
        }
        relabel(t, m);
        out.push_back(std::move(t));
    }
    return TensorExpr(std::move(out));
}

TensorExpr single(Atom a) {
    Term t;
    t.atoms.push_back(std::move(a));
    check_discipline(t);
    return TensorExpr({std::move(t)});
}

void require_lower(const std::vector<Index>& v, const char* what) {
    for (const Index& i : v)
        if (i.upper) throw IndexDisciplineError(std::string(what) + " takes lower derivative indices");
}

// ---- contraction ---------------------------------------------------------------

// One contraction step; returns false once the term is stable.
bool contract_once(Term& t) {
    auto owner = [&](const std::string& label, std::size_t skip) -> std::pair<std::size_t, std::size_t> {
        for (std::size_t k = 0; k < t.atoms.size(); ++k) {
            if (k == skip) continue;
            for (std::size_t s = 0; s < t.atoms[k].slots.size(); ++s)
                if (t.atoms[k].slots[s].label == label) return {k, s};
        }
        return {t.atoms.size(), 0};
    };
    for (std::size_t k = 0; k < t.atoms.size(); ++k) {
        Atom& a = t.atoms[k];
        if (a.kind != AtomKind::Delta) continue;
        const std::string hi = a.slots[0].label, lo = a.slots[1].label;
        if (hi == lo) {
            t.coef = t.coef * 4;
            t.atoms.erase(t.atoms.begin() + static_cast<std::ptrdiff_t>(k));
            return true;
        }
        if (auto [o, s] = owner(lo, k); o < t.atoms.size()) {
            t.atoms[o].slots[s].label = hi;
            t.atoms.erase(t.atoms.begin() + static_cast<std::ptrdiff_t>(k));
            return true;
        }
        if (auto [o, s] = owner(hi, k); o < t.atoms.size()) {
            t.atoms[o].slots[s].label = lo;
            t.atoms.erase(t.atoms.begin() + static_cast<std::ptrdiff_t>(k));
            return true;
        }
    }
    for (std::size_t i = 0; i < t.atoms.size(); ++i) {
        if (t.atoms[i].kind != AtomKind::InvMetric) continue;
        for (std::size_t j = 0; j < t.atoms.size(); ++j) {
            const Atom& m = t.atoms[j];
            if (m.kind != AtomKind::Metric || m.slots.size() != 2) continue;
            for (int si = 0; si < 2; ++si)
                for (int sj = 0; sj < 2; ++sj) {
                    if (t.atoms[i].slots[si].label != m.slots[sj].label) continue;
                    Atom d{AtomKind::Delta, {up(t.atoms[i].slots[1 - si].label), down(m.slots[1 - sj].label)}, {}};
                    t.atoms.erase(t.atoms.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
                    t.atoms.erase(t.atoms.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
                    t.atoms.push_back(std::move(d));
                    return true;
                }
        }
    }
    return false;
}

// ---- serialization -------------------------------------------------------------

std::string slot_text(const Index& i) { return (i.upper ? "^" : "_") + i.label; }

std::string sorted_slots(std::vector<Index> v) {
    std::sort(v.begin(), v.end(), [](const Index& a, const Index& b) { return a.label < b.label; });
    std::string s;
    for (const Index& i : v) s += slot_text(i);
    return s;
}

std::string atom_text(const Atom& a) {
    switch (a.kind) {
        case AtomKind::Metric: {
            std::string s = "g" + sorted_slots({a.slots[0], a.slots[1]});
            if (a.slots.size() > 2) s += "," + sorted_slots({a.slots.begin() + 2, a.slots.end()});
            return s;
        }
        case AtomKind::InvMetric: return "ginv" + sorted_slots(a.slots);
        case AtomKind::Delta: return "delta" + slot_text(a.slots[0]) + slot_text(a.slots[1]);
        case AtomKind::Scalar: return a.slots.empty() ? "phi" : "phi," + sorted_slots(a.slots);
        case AtomKind::CovScalar: return "phi;" + sorted_slots(a.slots);
        case AtomKind::SqrtDet: return "sqrtg";
        case AtomKind::Model: return a.fn.str();
    }
    return {};
}

std::string term_key(const Term& t) {
    std::vector<std::string> parts;
    for (const Atom& a : t.atoms) parts.push_back(atom_text(a));
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (const std::string& p : parts) s += (s.empty() ? "" : " ") + p;
    return s;
}

constexpr std::size_t kExhaustiveDummies = 7;

// Chooses the dummy relabelling with the lexicographically smallest key. Beyond
// kExhaustiveDummies the labels are assigned in order of first appearance in the
// dummy-blind sorted atom list.
Term rename_dummies(Term t) {
    const std::set<std::string> dset = term_dummies(t);
    const std::vector<std::string> dummies(dset.begin(), dset.end());
    if (dummies.empty()) return t;
    std::vector<std::string> canon;
    for (std::size_t k = 0; k < dummies.size(); ++k) canon.push_back("#" + std::to_string(k + 1));

    if (dummies.size() > kExhaustiveDummies) {
        std::map<std::string, std::string> blind;
        for (const std::string& d : dummies) blind[d] = "#";
        std::vector<std::pair<std::string, std::size_t>> order;
        for (std::size_t k = 0; k < t.atoms.size(); ++k) {
            Term one;
            one.atoms.push_back(t.atoms[k]);
            relabel(one, blind);
            order.emplace_back(atom_text(one.atoms[0]), k);
        }
        std::sort(order.begin(), order.end());
        std::map<std::string, std::string> m;
        for (const auto& [_, k] : order)
            for (const Index& i : t.atoms[k].slots)
                if (dset.count(i.label) && !m.count(i.label)) m[i.label] = canon[m.size()];
        relabel(t, m);
        return t;
    }

    std::vector<std::size_t> perm(dummies.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::string best_key;
    std::map<std::string, std::string> best;
    bool first = true;
    do {
        std::map<std::string, std::string> m;
        for (std::size_t k = 0; k < dummies.size(); ++k) m[dummies[k]] = canon[perm[k]];
        Term trial = t;
        relabel(trial, m);
        std::string key = term_key(trial);
        if (first || key < best_key) {
            best_key = std::move(key);
            best = std::move(m);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    relabel(t, best);
    return t;
}

// Puts symmetric slot groups and the atom list into key order.
void normalize_layout(Term& t) {
    auto by_label = [](const Index& a, const Index& b) { return a.label < b.label; };
    for (Atom& a : t.atoms) {
        switch (a.kind) {
            case AtomKind::Metric:
                if (a.slots[1].label < a.slots[0].label) std::swap(a.slots[0], a.slots[1]);
                std::sort(a.slots.begin() + 2, a.slots.end(), by_label);
                break;
            case AtomKind::InvMetric:
            case AtomKind::Scalar:
            case AtomKind::CovScalar: std::sort(a.slots.begin(), a.slots.end(), by_label); break;
            default: break;
        }
    }
    std::stable_sort(t.atoms.begin(), t.atoms.end(),
                     [](const Atom& a, const Atom& b) { return atom_text(a) < atom_text(b); });
}

}  // namespace

void check_discipline(const Term& t) {
    for (const auto& [label, c] : occurrences(t)) {
        const int total = c.first + c.second;
        if (total > 2)
            throw IndexDisciplineError("index '" + label + "' occurs " + std::to_string(total) + " times in one term");
        if (total == 2 && (c.first != 1 || c.second != 1))
            throw IndexDisciplineError("index '" + label + "' is repeated in the same position");
        if (total == 1 && reserved(label))
            throw IndexDisciplineError("label '" + label + "' is reserved for summed indices");
    }
}

std::vector<Index> TensorExpr::free_indices() const {
    std::vector<Index> ref;
    bool first = true;
    for (const Term& t : terms_) {
        check_discipline(t);
        std::vector<Index> f = term_free(t);
        if (first) {
            ref = std::move(f);
            first = false;
        } else if (f != ref) {
            throw IndexDisciplineError("terms of a sum carry different free indices");
        }
    }
    return ref;
}

TensorExpr operator+(const TensorExpr& a, const TensorExpr& b) {
    std::vector<Term> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return TensorExpr(std::move(t));
}

TensorExpr operator*(const Rational& c, const TensorExpr& a) {
    std::vector<Term> t = a.terms_;
    for (Term& x : t) x.coef = x.coef * c;
    return TensorExpr(std::move(t));
}

TensorExpr operator-(const TensorExpr& a, const TensorExpr& b) { return a + Rational(-1) * b; }

TensorExpr operator*(const TensorExpr& a, const TensorExpr& b) {
    const TensorExpr left = rename_apart(a, all_labels(b));
    const TensorExpr right = rename_apart(b, all_labels(left));
    std::vector<Term> out;
    for (const Term& x : left.terms_)
        for (const Term& y : right.terms_) {
            Term t;
            t.coef = x.coef * y.coef;
            t.atoms = x.atoms;
            t.atoms.insert(t.atoms.end(), y.atoms.begin(), y.atoms.end());
            out.push_back(std::move(t));
        }
    return TensorExpr(std::move(out));
}

TensorExpr number(const Rational& c) {
    Term t;
    t.coef = c;
    return TensorExpr({t});
}

TensorExpr metric(Index a, Index b, const std::vector<Index>& derivs) {
    if (a.upper || b.upper) throw IndexDisciplineError("g_{ab} takes lower indices; use inverse_metric");
    require_lower(derivs, "g_{ab,D}");
    Atom at{AtomKind::Metric, {std::move(a), std::move(b)}, {}};
    at.slots.insert(at.slots.end(), derivs.begin(), derivs.end());
    return single(std::move(at));
}

TensorExpr inverse_metric(Index a, Index b) {
    if (!a.upper || !b.upper) throw IndexDisciplineError("g^{ab} takes upper indices");
    return single(Atom{AtomKind::InvMetric, {std::move(a), std::move(b)}, {}});
}

TensorExpr delta(Index a, Index b) {
    if (!a.upper || b.upper) throw IndexDisciplineError("delta takes one upper then one lower index");
    return single(Atom{AtomKind::Delta, {std::move(a), std::move(b)}, {}});
}

TensorExpr scalar(const std::vector<Index>& derivs) {
    require_lower(derivs, "phi_{,D}");
    return single(Atom{AtomKind::Scalar, derivs, {}});
}

TensorExpr covariant_scalar(const std::vector<Index>& derivs) {
    require_lower(derivs, "phi_{;D}");
    if (derivs.size() > 2) throw IndexDisciplineError("covariant scalar atoms stop at order 2");
    if (derivs.size() < 2) return scalar(derivs);
    return single(Atom{AtomKind::CovScalar, derivs, {}});
}

TensorExpr sqrt_det() { return single(Atom{AtomKind::SqrtDet, {}, {}}); }
TensorExpr model(const ScalarFn& f) { return single(Atom{AtomKind::Model, {}, f}); }

TensorExpr canonicalize(const TensorExpr& e) {
    (void)e.free_indices();
    std::map<std::string, Term> merged;
    for (Term t : e.terms()) {
        if (t.coef.is_zero()) continue;
        while (contract_once(t)) {}
        normalize_layout(t);
        t = rename_dummies(std::move(t));
        normalize_layout(t);
        const std::string key = term_key(t);
        auto [it, fresh] = merged.try_emplace(key, t);
        if (!fresh) it->second.coef = it->second.coef + t.coef;
    }
    std::vector<Term> out;
    for (auto& [_, t] : merged)
        if (!t.coef.is_zero()) out.push_back(std::move(t));
    return TensorExpr(std::move(out));
}

std::string to_string(const TensorExpr& e) {
    if (e.terms().empty()) return "0";
    std::string s;
    for (const Term& t : e.terms()) {
        if (!s.empty()) s += " + ";
        const std::string body = term_key(t);
        if (body.empty()) {
            s += t.coef.str();
        } else {
            if (!t.coef.is_one()) s += "(" + t.coef.str() + ") ";
            s += body;
        }
    }
    return s;
}

bool operator==(const TensorExpr& a, const TensorExpr& b) { return to_string(a) == to_string(b); }

Expr expand(const TensorExpr& e, const std::map<std::string, int>& free_values) {
    (void)e.free_indices();
    SumBuilder sum;
    for (const Term& t : e.terms()) {
        const std::set<std::string> dset = term_dummies(t);
        const std::vector<std::string> dummies(dset.begin(), dset.end());
        std::map<std::string, int> value;
        for (const Index& f : term_free(t)) {
            auto it = free_values.find(f.label);
            if (it == free_values.end()) throw IndexDisciplineError("no value bound to free index '" + f.label + "'");
            if (it->second < 0 || it->second > 3) throw IndexDisciplineError("index value out of range");
            value[f.label] = it->second;
        }
        std::vector<int> digits(dummies.size(), 0);
        for (;;) {
            for (std::size_t k = 0; k < dummies.size(); ++k) value[dummies[k]] = digits[k];
            std::vector<Expr> factors;
            bool vanishes = false;
            for (const Atom& a : t.atoms) {
                std::vector<int> v;
                for (const Index& i : a.slots) v.push_back(value.at(i.label));
                switch (a.kind) {
                    case AtomKind::Metric:
                        factors.push_back(sym(JetSymbol::metric(v[0], v[1], std::vector<int>(v.begin() + 2, v.end()))));
                        break;
                    case AtomKind::InvMetric: factors.push_back(ginv(v[0], v[1])); break;
                    case AtomKind::Delta: vanishes = vanishes || v[0] != v[1]; break;
                    case AtomKind::Scalar: factors.push_back(sym(JetSymbol::phi(v))); break;
                    case AtomKind::CovScalar: factors.push_back(sym(JetSymbol::phi_cov(v))); break;
                    case AtomKind::SqrtDet: factors.push_back(sqrtg()); break;
                    case AtomKind::Model: factors.push_back(fn(a.fn)); break;
                }
            }
            if (!vanishes) sum.add(mul(factors), t.coef);
            std::size_t k = 0;
            while (k < digits.size() && ++digits[k] == 4) digits[k++] = 0;
            if (k == digits.size()) break;
        }
    }
    return sum.build();
}

}  // namespace horn::tensor
