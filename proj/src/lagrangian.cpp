#include "horn/lagrangian.hpp"

#include "horn/geometry.hpp"

namespace horn {

const char* chart_name(Chart c) { return c == Chart::Partial ? "partial" : "covariant"; }

LagrangianSpec LagrangianSpec::parse(const std::string& g2, const std::string& g3, const Rational& kappa) {
    LagrangianSpec s;
    s.g2_source = g2;
    s.g3_source = g3;
    s.g2 = dsl::parse(g2);
    s.g3 = dsl::parse(g3);
    s.kappa = kappa;
    return s;
}

dsl::SExpr LagrangianSpec::model_derivative(const ScalarFn& f) const {
    return dsl::mixed(model(f.name), f.d_phi, f.d_x);
}

Expr build_lagrangian(const LagrangianSpec& spec, Chart chart) {
    std::string key = std::string("lag:") + chart_name(chart) + ":" + spec.kappa.str();
    return memo_get_or_build(key, [&] {
        Expr box = chart == Chart::Covariant ? box_phi() : box_phi_partial();
        Expr bracket = add({ricci_scalar(), kinetic_x(), fn({FnName::G2, 0, 0}), mul(fn({FnName::G3, 0, 0}), box)});
        return mul({constant(spec.kappa), sqrtg(), bracket});
    });
}

Expr bind_model(Expr e, const LagrangianSpec& spec) {
    if (!contains_model_fn(e)) return e;
    Substitution s;
    std::vector<Expr> vars{phi(), kinetic_x()};
    s.model_fn = [&](const ScalarFn& f) -> std::optional<Expr> { return dsl::to_expr(spec.model_derivative(f), vars); };
    return substitute(e, s);
}

Expr momentum_pairing() {
    return memo_get_or_build("lag:pairing", [] {
        SumBuilder s;
        for (auto [a, b] : ordered_pairs())
            for (int m = 0; m < kDim; ++m) {
                s.add(mul(sym(JetSymbol::pg1(a, b, m)), g(a, b, {m})));
                for (int n = m; n < kDim; ++n) s.add(mul(sym(JetSymbol::pg2(a, b, m, n)), g(a, b, {m, n})));
            }
        for (int m = 0; m < kDim; ++m) {
            s.add(mul(sym(JetSymbol::pphi1(m)), phi({m})));
            for (int n = m; n < kDim; ++n) {
                SumBuilder accel;
                accel.add(phi_cov({m, n}));
                for (int c = 0; c < kDim; ++c) accel.add(mul(phi({c}), christoffel(c, m, n)));
                s.add(mul(sym(JetSymbol::pphi2(m, n)), accel.build()));
            }
        }
        return s.build();
    });
}

Expr build_unified_hamiltonian(const LagrangianSpec& spec) {
    return sub(momentum_pairing(), build_lagrangian(spec, Chart::Covariant));
}

}  // namespace horn
