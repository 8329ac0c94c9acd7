#include <algorithm>
#include <mutex>

#include "context.hpp"
#include "horn/expr.hpp"

namespace horn {

using detail::ctx;

namespace {

Expr elem_derivative(ElemFn f, Expr arg) {
    switch (f) {
        case ElemFn::Exp:
            return apply(ElemFn::Exp, arg);
        case ElemFn::Sin:
            return apply(ElemFn::Cos, arg);
        case ElemFn::Cos:
            return neg(apply(ElemFn::Sin, arg));
        case ElemFn::Log:
            return pow(arg, -1);
    }
    return zero();
}

std::optional<Expr> memo_find(std::unordered_map<std::uint64_t, Expr>& m, std::uint64_t key) {
    auto& c = ctx();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

Expr memo_store(std::unordered_map<std::uint64_t, Expr>& m, std::uint64_t key, Expr v) {
    auto& c = ctx();
    std::lock_guard<std::recursive_mutex> lock(c.mu);
    m.emplace(key, v);
    return v;
}

/// Product rule shared by partial and total derivatives.
template <class D>
Expr product_rule(Expr e, D&& d) {
    SumBuilder out;
    const auto& fs = e->factors;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        Expr dk = d(fs[k].base);
        if (is_zero(dk)) continue;
        std::vector<Expr> parts;
        parts.reserve(fs.size() + 1);
        parts.push_back(dk);
        for (std::size_t j = 0; j < fs.size(); ++j) {
            int ex = fs[j].exp - (j == k ? 1 : 0);
            if (ex != 0) parts.push_back(pow(fs[j].base, ex));
        }
        out.add(mul(parts), fs[k].exp);
    }
    return out.build();
}

Expr partial_rec(Expr e, SymId c, const JetSymbol& cs);

Expr partial_symbol(Expr e, SymId c, const JetSymbol& cs) {
    if (e->sym == c) return one();
    const JetSymbol& s = symbol_of(e->sym);
    if (cs.kind != SymKind::Metric || cs.n != 0) return zero();
    int ga = cs.a, gb = cs.b;
    Rational nf(n_factor(ga, gb));
    if (s.kind == SymKind::InvMetric) {
        // d g^{ab} / d g_{cd} = -n(cd) g^{a(c} g^{d)b}
        Expr t = add(mul(ginv(s.a, ga), ginv(gb, s.b)), mul(ginv(s.a, gb), ginv(ga, s.b)));
        return scale(-nf / 2, t);
    }
    if (s.kind == SymKind::SqrtDet) return scale(nf / 2, mul(sqrtg(), ginv(ga, gb)));
    return zero();
}

Expr partial_rec(Expr e, SymId c, const JetSymbol& cs) {
    if (e->kind == NodeKind::Const || !e->dep.maybe(c)) return zero();
    if (e->kind == NodeKind::Sym) return partial_symbol(e, c, cs);
    std::uint64_t key = (static_cast<std::uint64_t>(e->id) << 32) | c;
    auto& memo = ctx().partial_memo;
    if (auto hit = memo_find(memo, key)) return *hit;
    Expr out = zero();
    switch (e->kind) {
        case NodeKind::Fn: {
            SumBuilder s;
            if (cs.kind == SymKind::PhiPartial && cs.n == 0)
                s.add(fn({e->fn.name, static_cast<std::uint8_t>(e->fn.d_phi + 1), e->fn.d_x}));
            Expr dx = partial_rec(kinetic_x(), c, cs);
            if (!is_zero(dx)) s.add(mul(fn({e->fn.name, e->fn.d_phi, static_cast<std::uint8_t>(e->fn.d_x + 1)}), dx));
            out = s.build();
            break;
        }
        case NodeKind::Apply: {
            Expr da = partial_rec(e->arg, c, cs);
            out = is_zero(da) ? zero() : mul(elem_derivative(e->elem, e->arg), da);
            break;
        }
        case NodeKind::Sum: {
            SumBuilder s;
            for (const Term& t : e->terms) s.add(partial_rec(t.body, c, cs), t.coef);
            out = s.build();
            break;
        }
        case NodeKind::Prod:
            out = product_rule(e, [&](Expr b) { return partial_rec(b, c, cs); });
            break;
        default:
            break;
    }
    return memo_store(memo, key, out);
}

Expr total_rec(Expr e, int tau, const JetRule* rule);

Expr total_symbol(Expr e, int tau, const JetRule* rule) {
    const JetSymbol& s = symbol_of(e->sym);
    if (rule) {
        if (auto r = rule->derive_symbol(s, tau)) return *r;
    }
    switch (s.kind) {
        case SymKind::Coord:
            return s.idx[0] == tau ? one() : zero();
        case SymKind::Metric: {
            if (s.n >= kMaxJetOrder) throw OrderOverflow("total derivative of an order-4 metric jet");
            auto d = s.derivs();
            d.push_back(tau);
            return sym(JetSymbol::metric(s.a, s.b, d));
        }
        case SymKind::InvMetric: {
            SumBuilder out;
            for (int c = 0; c < kDim; ++c)
                for (int d = 0; d < kDim; ++d) out.add(mul({ginv(s.a, c), ginv(d, s.b), g(c, d, {tau})}), -1);
            return out.build();
        }
        case SymKind::SqrtDet: {
            SumBuilder out;
            for (int c = 0; c < kDim; ++c)
                for (int d = 0; d < kDim; ++d) out.add(mul(ginv(c, d), g(c, d, {tau})));
            return scale(Rational(1, 2), mul(sqrtg(), out.build()));
        }
        case SymKind::PhiPartial: {
            if (s.n >= kMaxJetOrder) throw OrderOverflow("total derivative of an order-4 scalar jet");
            auto d = s.derivs();
            d.push_back(tau);
            return sym(JetSymbol::phi(d));
        }
        case SymKind::PhiCov:
            throw ExprError("covariant scalar jet " + s.str() + " needs the covariant-chart jet rule");
        default:
            throw ExprError("no jet prolongation for " + s.str());
    }
}

Expr total_rec(Expr e, int tau, const JetRule* rule) {
    if (e->kind == NodeKind::Const) return zero();
    std::uint64_t key = (static_cast<std::uint64_t>(e->id) << 16) | (static_cast<std::uint64_t>(tau) << 8) |
                        static_cast<std::uint64_t>(rule ? rule->rule_id() & 0xff : 0);
    auto& memo = ctx().total_memo;
    if (auto hit = memo_find(memo, key)) return *hit;
    Expr out = zero();
    switch (e->kind) {
        case NodeKind::Sym:
            out = total_symbol(e, tau, rule);
            break;
        case NodeKind::Fn: {
            SumBuilder s;
            s.add(mul(fn({e->fn.name, static_cast<std::uint8_t>(e->fn.d_phi + 1), e->fn.d_x}), phi({tau})));
            s.add(mul(fn({e->fn.name, e->fn.d_phi, static_cast<std::uint8_t>(e->fn.d_x + 1)}),
                      total_rec(kinetic_x(), tau, rule)));
            out = s.build();
            break;
        }
        case NodeKind::Apply: {
            Expr da = total_rec(e->arg, tau, rule);
            out = is_zero(da) ? zero() : mul(elem_derivative(e->elem, e->arg), da);
            break;
        }
        case NodeKind::Sum: {
            SumBuilder s;
            for (const Term& t : e->terms) s.add(total_rec(t.body, tau, rule), t.coef);
            out = s.build();
            break;
        }
        case NodeKind::Prod:
            out = product_rule(e, [&](Expr b) { return total_rec(b, tau, rule); });
            break;
        default:
            break;
    }
    return memo_store(memo, key, out);
}

}  // namespace

Expr partial(Expr e, SymId c) {
    const JetSymbol& cs = symbol_of(c);
    if (cs.kind == SymKind::InvMetric || cs.kind == SymKind::SqrtDet)
        throw ExprError("partial derivative with respect to derived symbol " + cs.str());
    return partial_rec(e, c, cs);
}

Expr partial(Expr e, const JetSymbol& c) { return partial(e, intern(c)); }

Expr total_derivative(Expr e, int tau, const JetRule* rule) {
    if (tau < 0 || tau >= kDim) throw IndexError("total derivative direction out of range");
    return total_rec(e, tau, rule);
}

// ---- substitution -------------------------------------------------------------------------

Expr substitute(Expr root, const Substitution& s) {
    DepInfo keys;
    for (const auto& [id, v] : s.symbols) keys.add(id);
    std::unordered_map<Expr, Expr> memo;
    auto touches = [&](Expr e) {
        if (s.model_fn && e->dep.model_fn) return true;
        for (int i = 0; i < 4; ++i)
            if (e->dep.bloom[i] & keys.bloom[i]) return true;
        return false;
    };
    auto rec = [&](auto&& self, Expr e) -> Expr {
        if (!touches(e)) return e;
        auto it = memo.find(e);
        if (it != memo.end()) return it->second;
        Expr out = e;
        switch (e->kind) {
            case NodeKind::Sym: {
                auto f = s.symbols.find(e->sym);
                if (f != s.symbols.end()) out = f->second;
                break;
            }
            case NodeKind::Fn:
                if (s.model_fn) {
                    if (auto r = s.model_fn(e->fn)) out = *r;
                }
                break;
            case NodeKind::Apply:
                out = apply(e->elem, self(self, e->arg));
                break;
            case NodeKind::Sum: {
                SumBuilder b;
                b.add(constant(e->value));
                for (const Term& t : e->terms) b.add(self(self, t.body), t.coef);
                out = b.build();
                break;
            }
            case NodeKind::Prod: {
                std::vector<Expr> parts;
                for (const Factor& f : e->factors) parts.push_back(pow(self(self, f.base), f.exp));
                out = mul(parts);
                break;
            }
            default:
                break;
        }
        memo.emplace(e, out);
        return out;
    };
    return rec(rec, root);
}

// ---- canonical expansion ------------------------------------------------------------------------

namespace {

struct Poly {
    std::vector<std::pair<Expr, Rational>> terms;  // monomial -> coefficient (monomials distinct)
};

Poly poly_from_map(const std::unordered_map<Expr, Rational>& m, const std::vector<Expr>& order) {
    Poly p;
    for (Expr e : order) {
        const Rational& c = m.at(e);
        if (!c.is_zero()) p.terms.emplace_back(e, c);
    }
    return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    std::unordered_map<Expr, Rational> acc;
    std::vector<Expr> order;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            Expr m = mul(ma, mb);
            Rational c = ca * cb;
            if (auto v = const_value(m)) {  // monomials cancelled to a number
                c *= *v;
                m = one();
            }
            auto [it, fresh] = acc.try_emplace(m, c);
            if (fresh)
                order.push_back(m);
            else
                it->second += c;
        }
    return poly_from_map(acc, order);
}

Poly atom_poly(Expr atom) { return Poly{{{atom, Rational(1)}}}; }

struct Expander {
    std::unordered_map<Expr, Poly> memo;
    std::unordered_map<Expr, Expr> canon;

    Expr canonical(Expr e) {
        auto it = canon.find(e);
        if (it != canon.end()) return it->second;
        Poly p = expand(e);
        SumBuilder b;
        for (const auto& [m, c] : p.terms) b.add(m, c);
        Expr out = b.build();
        canon.emplace(e, out);
        return out;
    }

    Poly expand(Expr e) {
        auto it = memo.find(e);
        if (it != memo.end()) return it->second;
        Poly out;
        switch (e->kind) {
            case NodeKind::Const:
                if (!e->value.is_zero()) out.terms.emplace_back(one(), e->value);
                break;
            case NodeKind::Sym:
            case NodeKind::Fn:
                out = atom_poly(e);
                break;
            case NodeKind::Apply: {
                Expr arg = canonical(e->arg);
                Expr a = apply(e->elem, arg);
                if (auto v = const_value(a))
                    out.terms.emplace_back(one(), *v);
                else
                    out = atom_poly(a);
                break;
            }
            case NodeKind::Sum: {
                std::unordered_map<Expr, Rational> acc;
                std::vector<Expr> order;
                auto push = [&](Expr m, const Rational& c) {
                    auto [i, fresh] = acc.try_emplace(m, c);
                    if (fresh)
                        order.push_back(m);
                    else
                        i->second += c;
                };
                if (!e->value.is_zero()) push(one(), e->value);
                for (const Term& t : e->terms)
                    for (const auto& [m, c] : expand(t.body).terms) push(m, c * t.coef);
                out = poly_from_map(acc, order);
                break;
            }
            case NodeKind::Prod: {
                Poly acc = Poly{{{one(), Rational(1)}}};
                for (const Factor& f : e->factors) {
                    Poly fp;
                    if (f.exp > 0) {
                        Poly base = expand(f.base);
                        fp = Poly{{{one(), Rational(1)}}};
                        for (int k = 0; k < f.exp; ++k) fp = poly_mul(fp, base);
                    } else {
                        Expr cb = canonical(f.base);
                        Expr inv = pow(cb, f.exp);
                        // A single monomial inverts into a monomial; a genuine sum stays an atom.
                        if (auto v = const_value(inv))
                            fp.terms.emplace_back(one(), *v);
                        else if (inv->kind == NodeKind::Sum && inv->value.is_zero() && inv->terms.size() == 1)
                            fp.terms.emplace_back(inv->terms[0].body, inv->terms[0].coef);
                        else
                            fp = atom_poly(inv);
                    }
                    acc = poly_mul(acc, fp);
                    if (acc.terms.empty()) break;
                }
                out = acc;
                break;
            }
        }
        memo.emplace(e, out);
        return out;
    }
};

}  // namespace

Expr canonicalize(Expr e) {
    Expander x;
    return x.canonical(e);
}

bool is_identically_zero(Expr e) { return is_zero(canonicalize(e)); }

}  // namespace horn
