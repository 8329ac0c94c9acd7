#include "horn/legendre.hpp"

#include <stdexcept>

#include "horn/chart.hpp"
#include "horn/geometry.hpp"

namespace horn {

std::vector<JetSymbol> momentum_coordinates() {
    std::vector<JetSymbol> out;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m)
            for (int n = m; n < kDim; ++n) out.push_back(JetSymbol::pg2(a, b, m, n));
    for (int m = 0; m < kDim; ++m)
        for (int n = m; n < kDim; ++n) out.push_back(JetSymbol::pphi2(m, n));
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) out.push_back(JetSymbol::pg1(a, b, m));
    for (int m = 0; m < kDim; ++m) out.push_back(JetSymbol::pphi1(m));
    return out;
}

Expr LegendreMap::value(const JetSymbol& p) const {
    for (std::size_t i = 0; i < momenta.size(); ++i)
        if (momenta[i] == p) return values[i];
    if (p.kind == SymKind::P && extended) return extended;
    throw std::invalid_argument("no Legendre value for " + p.str());
}

Substitution LegendreMap::as_substitution() const {
    Substitution s;
    for (std::size_t i = 0; i < momenta.size(); ++i) s.symbols[intern(momenta[i])] = values[i];
    if (extended) s.symbols[intern(JetSymbol::p())] = extended;
    return s;
}

namespace {

Expr total(Expr e, int tau, Chart chart) { return chart == Chart::Covariant ? total_cov(e, tau) : total_derivative(e, tau); }

Expr second_scalar(Chart chart, int m, int n) {
    return chart == Chart::Covariant ? phi_cov({m, n}) : sym(JetSymbol::phi({m, n}));
}

}  // namespace

LegendreMap restricted_legendre(const LagrangianSpec& spec, Chart chart) {
    const Expr lag = build_lagrangian(spec, chart);
    LegendreMap out;
    out.chart = chart;
    out.momenta = momentum_coordinates();
    out.values.reserve(out.momenta.size());

    // Second-order momenta.
    Expr pg2[10][4][4];
    Expr pphi2[4][4];
    int pair = 0;
    for (auto [a, b] : ordered_pairs()) {
        for (int m = 0; m < kDim; ++m)
            for (int n = m; n < kDim; ++n) {
                pg2[pair][m][n] = pg2[pair][n][m] = partial(lag, JetSymbol::metric(a, b, {m, n}));
                out.values.push_back(pg2[pair][m][n]);
            }
        ++pair;
    }
    for (int m = 0; m < kDim; ++m)
        for (int n = m; n < kDim; ++n) {
            pphi2[m][n] = pphi2[n][m] = partial(lag, symbol_of(second_scalar(chart, m, n)->sym));
            out.values.push_back(pphi2[m][n]);
        }

    // First-order momenta: partial derivative, covariant-chart correction, divergence of the second-order momenta.
    pair = 0;
    for (auto [a, b] : ordered_pairs()) {
        for (int m = 0; m < kDim; ++m) {
            const JetSymbol velocity = JetSymbol::metric(a, b, {m});
            SumBuilder s;
            s.add(partial(lag, velocity));
            if (chart == Chart::Covariant)
                for (int c = 0; c < kDim; ++c)
                    for (int d = c; d < kDim; ++d)
                        for (int k = 0; k < kDim; ++k) {
                            Expr dchr = partial(christoffel(k, c, d), velocity);
                            if (!is_zero(dchr)) s.add(mul({pphi2[c][d], phi({k}), dchr}), -1);
                        }
            for (int n = 0; n < kDim; ++n) s.add(total(pg2[pair][m][n], n, chart), Rational(1, n_factor(m, n)) * -1);
            out.values.push_back(s.build());
        }
        ++pair;
    }
    for (int m = 0; m < kDim; ++m) {
        SumBuilder s;
        s.add(partial(lag, JetSymbol::phi({m})));
        if (chart == Chart::Covariant)
            for (int c = 0; c < kDim; ++c)
                for (int d = c; d < kDim; ++d) s.add(mul(pphi2[c][d], christoffel(m, c, d)), -1);
        for (int n = 0; n < kDim; ++n) s.add(total(pphi2[m][n], n, chart), Rational(1, n_factor(m, n)) * -1);
        out.values.push_back(s.build());
    }
    return out;
}

LegendreMap extended_legendre(const LagrangianSpec& spec, Chart chart) {
    LegendreMap out = restricted_legendre(spec, chart);
    Expr pairing = momentum_pairing();
    if (chart == Chart::Partial) pairing = to_partial(pairing);
    out.extended = sub(build_lagrangian(spec, chart), substitute(pairing, out.as_substitution()));
    return out;
}

// ---- projectability ------------------------------------------------------------------------

JetSymbol FieldIndex::jet(const std::vector<int>& d) const {
    return scalar ? JetSymbol::phi(d) : JetSymbol::metric(a, b, d);
}

std::string FieldIndex::str() const {
    return scalar ? std::string("phi") : "g_" + std::to_string(a) + std::to_string(b);
}

std::vector<FieldIndex> field_indices() {
    std::vector<FieldIndex> out;
    for (auto [a, b] : ordered_pairs()) out.push_back({false, a, b});
    out.push_back({true, 0, 0});
    return out;
}

ProjectabilityReport projectability(const LagrangianSpec& spec) {
    const Expr lag = bind_model(build_lagrangian(spec, Chart::Partial), spec);
    ProjectabilityReport rep;
    const auto fields = field_indices();

    // coef[field][i][j] = L_A^{ij}: the ordered coefficient divided by n(ij), symmetric in (ij).
    std::vector<std::array<std::array<Expr, 4>, 4>> coef(fields.size());
    Substitution drop_second;
    rep.affine = true;
    for (std::size_t f = 0; f < fields.size(); ++f)
        for (int i = 0; i < kDim; ++i)
            for (int j = i; j < kDim; ++j) {
                JetSymbol acc = fields[f].jet({i, j});
                Expr c = partial(lag, acc);
                if (max_metric_order(c) > 1 || max_scalar_order(c) > 1) rep.affine = false;
                drop_second.symbols[intern(acc)] = zero();
                coef[f][i][j] = coef[f][j][i] = scale(Rational(1, n_factor(i, j)), c);
                rep.second_order_coefficients.emplace_back(acc, coef[f][i][j]);
            }
    rep.lagrangian0 = substitute(lag, drop_second);
    if (!rep.affine) throw std::domain_error("Lagrangian is not affine in the second-order jets");

    for (std::size_t al = 0; al < fields.size(); ++al)
        for (std::size_t be = 0; be < fields.size(); ++be)
            for (int a = 0; a < kDim; ++a)
                for (int h = 0; h < kDim; ++h)
                    for (int i = h; i < kDim; ++i) {
                        Expr r = sub(scale(2, partial(coef[be][h][i], fields[al].jet({a}))),
                                     add(partial(coef[al][a][i], fields[be].jet({h})),
                                         partial(coef[al][a][h], fields[be].jet({i}))));
                        if (is_zero(r) || is_identically_zero(r)) continue;
                        rep.obstruction.push_back({fields[al], fields[be], a, h, i, r});
                    }
    rep.projects = rep.obstruction.empty();
    return rep;
}

Expr obstruction_display(int m, int n, int c) {
    SumBuilder s;
    for (int d = 0; d < kDim; ++d) {
        Expr bracket = add({scale(-2, mul(ginv(m, n), ginv(c, d))), mul(ginv(c, n), ginv(m, d)), mul(ginv(c, m), ginv(n, d))});
        s.add(mul(phi({d}), bracket));
    }
    return mul({sqrtg(), fn({FnName::G3, 0, 1}), s.build()});
}

}  // namespace horn
