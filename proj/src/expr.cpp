#include "horn/expr.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "context.hpp"

namespace horn {

// ---- dependency summaries ------------------------------------------------------

namespace {
int bloom_bit(SymId id) { return static_cast<int>((static_cast<std::uint64_t>(id + 1) * 0x9E3779B97F4A7C15ULL) >> 56); }

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0x100000001b3ULL;
}
std::uint64_t mix_rational(std::uint64_t h, const Rational& r) {
    return mix(mix(h, static_cast<std::uint64_t>(r.num())), static_cast<std::uint64_t>(r.den()));
}
}  // namespace

bool DepInfo::maybe(SymId id) const {
    int bit = bloom_bit(id);
    return (bloom[bit >> 6] >> (bit & 63)) & 1ULL;
}

void DepInfo::add(SymId id) {
    int bit = bloom_bit(id);
    bloom[bit >> 6] |= 1ULL << (bit & 63);
}

void DepInfo::merge(const DepInfo& o) {
    for (int i = 0; i < 4; ++i) bloom[i] |= o.bloom[i];
    metric_order = std::max(metric_order, o.metric_order);
    scalar_order = std::max(scalar_order, o.scalar_order);
    momentum = momentum || o.momentum;
    coefficient = coefficient || o.coefficient;
    model_fn = model_fn || o.model_fn;
}

std::string ScalarFn::str() const {
    std::string s = name == FnName::G2 ? "G2" : "G3";
    if (d_phi == 0 && d_x == 0) return s;
    s += "_{";
    for (int i = 0; i < d_phi; ++i) s += "phi";
    for (int i = 0; i < d_x; ++i) s += "X";
    return s + "}";
}

// ---- context -------------------------------------------------------------------

namespace detail {

std::size_t NodeKeyHash::operator()(const Node* n) const { return static_cast<std::size_t>(n->hash); }

bool NodeKeyEq::operator()(const Node* a, const Node* b) const {
    if (a->kind != b->kind || a->hash != b->hash) return false;
    switch (a->kind) {
        case NodeKind::Const:
            return a->value == b->value;
        case NodeKind::Sym:
            return a->sym == b->sym;
        case NodeKind::Fn:
            return a->fn == b->fn;
        case NodeKind::Apply:
            return a->elem == b->elem && a->arg == b->arg;
        case NodeKind::Sum:
            if (a->value != b->value || a->terms.size() != b->terms.size()) return false;
            for (std::size_t i = 0; i < a->terms.size(); ++i)
                if (a->terms[i].body != b->terms[i].body || a->terms[i].coef != b->terms[i].coef) return false;
            return true;
        case NodeKind::Prod:
            if (a->factors.size() != b->factors.size()) return false;
            for (std::size_t i = 0; i < a->factors.size(); ++i)
                if (a->factors[i].base != b->factors[i].base || a->factors[i].exp != b->factors[i].exp) return false;
            return true;
    }
    return false;
}

Context& ctx() {
    static Context c;
    return c;
}

Expr intern_node(Node&& n) {
    Context& c = ctx();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    auto it = c.table.find(&n);
    if (it != c.table.end()) return *it;
    n.id = static_cast<std::uint32_t>(c.arena.size());
    c.arena.push_back(std::move(n));
    const Node* p = &c.arena.back();
    c.table.insert(p);
    return p;
}

}  // namespace detail

using detail::ctx;
using detail::intern_node;

namespace {
std::atomic<std::uint64_t> g_epoch{0};
}

std::uint64_t context_epoch() { return g_epoch.load(); }

void reset_context() {
    ++g_epoch;
    auto& c = ctx();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    c.partial_memo.clear();
    c.total_memo.clear();
    c.named.clear();
    c.table.clear();
    c.arena.clear();
}

std::size_t context_node_count() {
    auto& c = ctx();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    return c.arena.size();
}

Expr memo_get_or_build(const std::string& key, const std::function<Expr()>& build) {
    auto& c = ctx();
    {
        std::lock_guard<std::recursive_mutex> lock(c.mu);
        auto it = c.named.find(key);
        if (it != c.named.end()) return it->second;
    }
    Expr e = build();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    return c.named.emplace(key, e).first->second;
}

// ---- ordering --------------------------------------------------------------------

int compare(Expr a, Expr b) {
    if (a == b) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
        case NodeKind::Const:
            return a->value < b->value ? -1 : 1;
        case NodeKind::Sym: {
            const JetSymbol& x = symbol_of(a->sym);
            const JetSymbol& y = symbol_of(b->sym);
            return x < y ? -1 : 1;
        }
        case NodeKind::Fn: {
            auto ka = std::tuple(a->fn.name, a->fn.d_phi, a->fn.d_x);
            auto kb = std::tuple(b->fn.name, b->fn.d_phi, b->fn.d_x);
            return ka < kb ? -1 : 1;
        }
        case NodeKind::Apply:
            if (a->elem != b->elem) return a->elem < b->elem ? -1 : 1;
            return compare(a->arg, b->arg);
        case NodeKind::Prod: {
            std::size_t n = std::min(a->factors.size(), b->factors.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(a->factors[i].base, b->factors[i].base);
                if (c != 0) return c;
                if (a->factors[i].exp != b->factors[i].exp) return a->factors[i].exp < b->factors[i].exp ? -1 : 1;
            }
            if (a->factors.size() != b->factors.size()) return a->factors.size() < b->factors.size() ? -1 : 1;
            break;
        }
        case NodeKind::Sum: {
            std::size_t n = std::min(a->terms.size(), b->terms.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(a->terms[i].body, b->terms[i].body);
                if (c != 0) return c;
                if (a->terms[i].coef != b->terms[i].coef) return a->terms[i].coef < b->terms[i].coef ? -1 : 1;
            }
            if (a->terms.size() != b->terms.size()) return a->terms.size() < b->terms.size() ? -1 : 1;
            if (a->value != b->value) return a->value < b->value ? -1 : 1;
            break;
        }
    }
    // Structurally equal content can only be the same interned node.
    return a->id < b->id ? -1 : 1;
}

// ---- leaf builders ------------------------------------------------------------------

Expr constant(const Rational& r) {
    Node n;
    n.kind = NodeKind::Const;
    n.value = r;
    n.hash = mix_rational(mix(0, 1), r);
    return intern_node(std::move(n));
}

Expr sym(SymId id) {
    const JetSymbol& s = symbol_of(id);
    Node n;
    n.kind = NodeKind::Sym;
    n.sym = id;
    n.hash = mix(mix(0, 2), s.content_hash());
    n.dep.add(id);
    switch (s.kind) {
        case SymKind::Metric:
            n.dep.metric_order = static_cast<std::int8_t>(s.n);
            break;
        case SymKind::InvMetric:
        case SymKind::SqrtDet:
            n.dep.metric_order = 0;
            for (auto [a, b] : ordered_pairs()) n.dep.add(intern(JetSymbol::metric(a, b)));
            break;
        case SymKind::PhiPartial:
        case SymKind::PhiCov:
            n.dep.scalar_order = static_cast<std::int8_t>(s.n);
            break;
        case SymKind::Coeff:
            n.dep.coefficient = true;
            break;
        default:
            n.dep.momentum = s.is_momentum();
    }
    return intern_node(std::move(n));
}

Expr sym(const JetSymbol& s) { return sym(intern(s)); }

Expr fn(const ScalarFn& f) {
    Node n;
    n.kind = NodeKind::Fn;
    n.fn = f;
    n.hash = mix(mix(mix(mix(0, 3), static_cast<std::uint64_t>(f.name)), f.d_phi), f.d_x);
    n.dep.add(intern(JetSymbol::phi()));
    for (int m = 0; m < kDim; ++m) n.dep.add(intern(JetSymbol::phi({m})));
    for (auto [a, b] : ordered_pairs()) {
        n.dep.add(intern(JetSymbol::metric(a, b)));
        n.dep.add(intern(JetSymbol::inv_metric(a, b)));
    }
    n.dep.metric_order = 0;
    n.dep.scalar_order = 1;
    n.dep.model_fn = true;
    return intern_node(std::move(n));
}

Expr apply(ElemFn f, Expr arg) {
    if (auto v = const_value(arg)) {
        if (f == ElemFn::Exp && v->is_zero()) return one();
        if (f == ElemFn::Sin && v->is_zero()) return zero();
        if (f == ElemFn::Cos && v->is_zero()) return one();
        if (f == ElemFn::Log && v->is_one()) return zero();
    }
    Node n;
    n.kind = NodeKind::Apply;
    n.elem = f;
    n.arg = arg;
    n.hash = mix(mix(mix(0, 4), static_cast<std::uint64_t>(f)), arg->hash);
    n.dep = arg->dep;
    return intern_node(std::move(n));
}

// ---- sums ------------------------------------------------------------------------------

namespace {

Expr make_sum(const Rational& c0, std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return compare(x.body, y.body) < 0; });
    if (terms.empty()) return constant(c0);
    if (terms.size() == 1 && c0.is_zero() && terms[0].coef.is_one()) return terms[0].body;
    Node n;
    n.kind = NodeKind::Sum;
    n.value = c0;
    std::uint64_t h = mix_rational(mix(0, 5), c0);
    for (const Term& t : terms) {
        h = mix(mix_rational(h, t.coef), t.body->hash);
        n.dep.merge(t.body->dep);
    }
    n.hash = h;
    n.terms = std::move(terms);
    return intern_node(std::move(n));
}

}  // namespace

void SumBuilder::add(Expr e, const Rational& c) {
    if (c.is_zero()) return;
    if (e->kind == NodeKind::Const) {
        constant_ += c * e->value;
        return;
    }
    if (e->kind == NodeKind::Sum) {
        constant_ += c * e->value;
        for (const Term& t : e->terms) add(t.body, c * t.coef);
        return;
    }
    auto [it, fresh] = coef_.try_emplace(e, c);
    if (fresh)
        order_.push_back(e);
    else
        it->second += c;
}

Expr SumBuilder::build() const {
    std::vector<Term> terms;
    terms.reserve(order_.size());
    for (Expr e : order_) {
        const Rational& c = coef_.at(e);
        if (!c.is_zero()) terms.push_back({c, e});
    }
    return make_sum(constant_, std::move(terms));
}

Expr add(const std::vector<Expr>& ops) {
    SumBuilder b;
    for (Expr e : ops) b.add(e);
    return b.build();
}

Expr add(Expr a, Expr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return add(std::vector<Expr>{a, b});
}

Expr sub(Expr a, Expr b) {
    SumBuilder s;
    s.add(a);
    s.add(b, -1);
    return s.build();
}

Expr neg(Expr a) { return scale(-1, a); }

Expr scale(const Rational& c, Expr a) {
    if (c.is_one()) return a;
    SumBuilder s;
    s.add(a, c);
    return s.build();
}

// ---- products ------------------------------------------------------------------------------

namespace {

struct ProdAcc {
    Rational coef = 1;
    std::unordered_map<Expr, int> exps;
    std::vector<Expr> order;
    bool zero = false;

    void push(Expr e, int k) {
        if (k == 0 || zero) return;
        switch (e->kind) {
            case NodeKind::Const:
                if (e->value.is_zero()) {
                    if (k < 0) throw std::domain_error("division by zero in expression");
                    zero = true;
                    return;
                }
                coef *= e->value.pow(k);
                return;
            case NodeKind::Sum:
                if (e->value.is_zero() && e->terms.size() == 1) {
                    coef *= e->terms[0].coef.pow(k);
                    push(e->terms[0].body, k);
                    return;
                }
                break;
            case NodeKind::Prod:
                for (const Factor& f : e->factors) push(f.base, f.exp * k);
                return;
            default:
                break;
        }
        auto [it, fresh] = exps.try_emplace(e, k);
        if (fresh)
            order.push_back(e);
        else
            it->second += k;
    }

    Expr build() const {
        if (zero) return horn::zero();
        std::vector<Factor> fs;
        for (Expr e : order) {
            int k = exps.at(e);
            if (k != 0) fs.push_back({e, k});
        }
        std::sort(fs.begin(), fs.end(), [](const Factor& x, const Factor& y) {
            int c = compare(x.base, y.base);
            return c < 0;
        });
        Expr body;
        if (fs.empty()) return constant(coef);
        if (fs.size() == 1 && fs[0].exp == 1) {
            body = fs[0].base;
        } else {
            Node n;
            n.kind = NodeKind::Prod;
            std::uint64_t h = mix(0, 6);
            for (const Factor& f : fs) {
                h = mix(mix(h, f.base->hash), static_cast<std::uint64_t>(static_cast<std::int64_t>(f.exp)));
                n.dep.merge(f.base->dep);
            }
            n.hash = h;
            n.factors = std::move(fs);
            body = intern_node(std::move(n));
        }
        return scale(coef, body);
    }
};

}  // namespace

Expr mul(const std::vector<Expr>& ops) {
    ProdAcc acc;
    for (Expr e : ops) acc.push(e, 1);
    return acc.build();
}

Expr mul(Expr a, Expr b) {
    if (is_zero(a) || is_zero(b)) return zero();
    if (a->kind == NodeKind::Const && a->value.is_one()) return b;
    if (b->kind == NodeKind::Const && b->value.is_one()) return a;
    return mul(std::vector<Expr>{a, b});
}

Expr pow(Expr base, int exponent) {
    if (exponent == 0) return one();
    ProdAcc acc;
    acc.push(base, exponent);
    return acc.build();
}

Expr div(Expr a, Expr b) { return mul(a, pow(b, -1)); }

// ---- convenience -----------------------------------------------------------------------------

Expr g(int a, int b, std::initializer_list<int> d) { return sym(JetSymbol::metric(a, b, d)); }
Expr ginv(int a, int b) { return sym(JetSymbol::inv_metric(a, b)); }
Expr sqrtg() { return sym(JetSymbol::sqrt_det()); }
Expr phi(std::initializer_list<int> d) { return sym(JetSymbol::phi(d)); }
Expr phi_cov(const std::vector<int>& d) { return sym(JetSymbol::phi_cov(d)); }
Expr coord(int mu) { return sym(JetSymbol::coord(mu)); }

Expr kinetic_x() {
    return memo_get_or_build("core:X", [] {
        SumBuilder s;
        for (int m = 0; m < kDim; ++m)
            for (int n = 0; n < kDim; ++n) s.add(mul({ginv(m, n), phi({m}), phi({n})}), Rational(-1, 2));
        return s.build();
    });
}

// ---- inspection -------------------------------------------------------------------------------

bool is_const(Expr e) { return e->kind == NodeKind::Const; }
bool is_zero(Expr e) { return e->kind == NodeKind::Const && e->value.is_zero(); }
std::optional<Rational> const_value(Expr e) {
    if (e->kind == NodeKind::Const) return e->value;
    return std::nullopt;
}

namespace {
template <class F>
void visit_dag(Expr root, F&& f) {
    std::unordered_set<Expr> seen;
    std::vector<Expr> stack{root};
    while (!stack.empty()) {
        Expr e = stack.back();
        stack.pop_back();
        if (!seen.insert(e).second) continue;
        f(e);
        switch (e->kind) {
            case NodeKind::Apply:
                stack.push_back(e->arg);
                break;
            case NodeKind::Sum:
                for (const Term& t : e->terms) stack.push_back(t.body);
                break;
            case NodeKind::Prod:
                for (const Factor& x : e->factors) stack.push_back(x.base);
                break;
            default:
                break;
        }
    }
}
}  // namespace

std::size_t dag_size(Expr e) {
    std::size_t n = 0;
    visit_dag(e, [&](Expr) { ++n; });
    return n;
}

std::size_t tree_size(Expr e, std::size_t cap) {
    std::unordered_map<Expr, std::size_t> memo;
    std::function<std::size_t(Expr)> go = [&](Expr x) -> std::size_t {
        if (auto it = memo.find(x); it != memo.end()) return it->second;
        std::size_t n = 1;
        auto bump = [&](std::size_t k) { n = std::min(cap, n + k); };
        if (x->arg) bump(go(x->arg));
        for (const Term& t : x->terms) bump(go(t.body));
        for (const Factor& f : x->factors) bump(go(f.base));
        memo.emplace(x, n);
        return n;
    };
    return go(e);
}

std::vector<SymId> free_symbols(Expr e) {
    std::vector<SymId> out;
    visit_dag(e, [&](Expr x) {
        if (x->kind == NodeKind::Sym) out.push_back(x->sym);
    });
    std::sort(out.begin(), out.end());
    return out;
}

int max_metric_order(Expr e) { return e->dep.metric_order; }
int max_scalar_order(Expr e) { return e->dep.scalar_order; }
bool contains_momentum(Expr e) { return e->dep.momentum; }
bool contains_model_fn(Expr e) { return e->dep.model_fn; }

bool contains_kind(Expr e, SymKind k) {
    bool found = false;
    visit_dag(e, [&](Expr x) {
        if (x->kind == NodeKind::Sym && symbol_of(x->sym).kind == k) found = true;
    });
    return found;
}

// ---- printing -----------------------------------------------------------------------------------

namespace {

const char* elem_name(ElemFn f) {
    switch (f) {
        case ElemFn::Exp:
            return "exp";
        case ElemFn::Sin:
            return "sin";
        case ElemFn::Cos:
            return "cos";
        case ElemFn::Log:
            return "log";
    }
    return "?";
}

struct Printer {
    bool latex;
    std::string atom(Expr e) {
        if (e->kind == NodeKind::Sum || (e->kind == NodeKind::Const && (e->value.num() < 0 || !e->value.is_integer())))
            return (latex ? "\\left(" : "(") + print(e) + (latex ? "\\right)" : ")");
        return print(e);
    }
    std::string rational(const Rational& r) {
        if (!latex || r.is_integer()) return r.str();
        std::string s = r.num() < 0 ? "-" : "";
        return s + "\\frac{" + std::to_string(r.num() < 0 ? -r.num() : r.num()) + "}{" + std::to_string(r.den()) + "}";
    }
    std::string print(Expr e) {
        switch (e->kind) {
            case NodeKind::Const:
                return rational(e->value);
            case NodeKind::Sym:
                return latex ? symbol_of(e->sym).latex() : symbol_of(e->sym).str();
            case NodeKind::Fn:
                return e->fn.str();
            case NodeKind::Apply:
                return std::string(latex ? "\\" : "") + elem_name(e->elem) + (latex ? "\\left(" : "(") + print(e->arg) +
                       (latex ? "\\right)" : ")");
            case NodeKind::Prod: {
                std::string out;
                for (const Factor& f : e->factors) {
                    if (!out.empty()) out += latex ? " " : "*";
                    std::string base = atom(f.base);
                    if (f.exp != 1 && latex) {
                        // Braces keep a superscripted base from stacking two superscripts.
                        if (base.find('^') != std::string::npos) base = "{" + base + "}";
                        out += base + "^{" + std::to_string(f.exp) + "}";
                    } else {
                        out += base;
                        if (f.exp != 1) out += "^" + (f.exp < 0 ? "(" + std::to_string(f.exp) + ")" : std::to_string(f.exp));
                    }
                }
                return out;
            }
            case NodeKind::Sum: {
                std::string out;
                bool first = true;
                for (const Term& t : e->terms) {
                    Rational c = t.coef;
                    bool negative = c.num() < 0;
                    if (negative) c = -c;
                    if (first)
                        out += negative ? "-" : "";
                    else
                        out += negative ? " - " : " + ";
                    if (!c.is_one()) out += rational(c) + (latex ? " " : "*");
                    out += (t.body->kind == NodeKind::Sum) ? atom(t.body) : print(t.body);
                    first = false;
                }
                if (!e->value.is_zero()) {
                    Rational c = e->value;
                    bool negative = c.num() < 0;
                    if (negative) c = -c;
                    out += (negative ? " - " : " + ") + rational(c);
                }
                return out;
            }
        }
        return "?";
    }
};

}  // namespace

std::string to_string(Expr e) { return Printer{false}.print(e); }
std::string to_latex(Expr e) { return Printer{true}.print(e); }

}  // namespace horn
