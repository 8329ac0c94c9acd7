#include "horn/ladder.hpp"

#include <algorithm>

#include "horn/chart.hpp"
#include "horn/geometry.hpp"

namespace horn {

JetSymbol metric_momentum1_coeff(int a, int b, int mu, int tau) {
    return JetSymbol::coeff(CoeffFamily::MetricMomentum1, a, b, {mu, tau});
}
JetSymbol metric_momentum2_coeff(int a, int b, int mu, int nu, int tau) {
    return JetSymbol::coeff(CoeffFamily::MetricMomentum2, a, b, {mu, nu, tau});
}
JetSymbol scalar_momentum1_coeff(int mu, int tau) { return JetSymbol::coeff(CoeffFamily::ScalarMomentum1, 0, 0, {mu, tau}); }
JetSymbol scalar_momentum2_coeff(int mu, int nu, int tau) {
    return JetSymbol::coeff(CoeffFamily::ScalarMomentum2, 0, 0, {mu, nu, tau});
}

namespace {

std::string digits(std::initializer_list<int> xs) {
    std::string s;
    for (int x : xs) s += static_cast<char>('0' + x);
    return s;
}

std::string pair_label(int a, int b) { return "g" + digits({a, b}); }

Expr dl(Expr lag, const JetSymbol& s) { return partial(lag, s); }

/// sum_{c<=d,k} weight_{cd} phi_k dGamma^k_{cd}/d(coordinate).
Expr christoffel_correction(const Expr weight[4][4], const JetSymbol& coordinate) {
    SumBuilder s;
    for (int c = 0; c < kDim; ++c)
        for (int d = c; d < kDim; ++d)
            for (int k = 0; k < kDim; ++k) {
                Expr dchr = partial(christoffel(k, c, d), coordinate);
                if (!is_zero(dchr)) s.add(mul({weight[c][d], phi({k}), dchr}));
            }
    return s.build();
}

struct Tables {
    Expr lag;
    LegendreMap fl;
    Expr pphi2_sym[4][4];
    Expr pphi2_val[4][4];
};

Tables tables(const LagrangianSpec& spec) {
    Tables t;
    t.lag = build_lagrangian(spec, Chart::Covariant);
    t.fl = restricted_legendre(spec, Chart::Covariant);
    for (int m = 0; m < kDim; ++m)
        for (int n = m; n < kDim; ++n) {
            t.pphi2_sym[m][n] = t.pphi2_sym[n][m] = sym(JetSymbol::pphi2(m, n));
            t.pphi2_val[m][n] = t.pphi2_val[n][m] = t.fl.value(JetSymbol::pphi2(m, n));
        }
    return t;
}

std::vector<JetSymbol> third_order_coordinates() {
    std::vector<JetSymbol> out = metric_coordinates(3);
    auto s = scalar_coordinates(3, true);
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

/// Removes third-order jets whose coefficients are proven to vanish; returns notes for any that remain.
Expr eliminate_third_order(Expr e, const std::string& label, std::vector<std::string>& notes) {
    Substitution zero;
    auto present = free_symbols(e);
    for (const JetSymbol& s : third_order_coordinates()) {
        SymId id = intern(s);
        if (!std::binary_search(present.begin(), present.end(), id)) continue;
        if (is_identically_zero(partial(e, s)))
            zero.symbols[id] = horn::zero();
        else
            notes.push_back(label + ": coefficient of " + s.str() + " does not cancel");
    }
    return zero.symbols.empty() ? e : substitute(e, zero);
}

}  // namespace

std::vector<Constraint> contraction_equations(const LagrangianSpec& spec) {
    Tables t = tables(spec);
    std::vector<Constraint> out;
    for (auto [a, b] : ordered_pairs()) {
        SumBuilder s;
        for (int mu = 0; mu < kDim; ++mu) s.add(sym(metric_momentum1_coeff(a, b, mu, mu)));
        s.add(dl(t.lag, JetSymbol::metric(a, b)), -1);
        s.add(christoffel_correction(t.pphi2_sym, JetSymbol::metric(a, b)));
        out.push_back({"UniVec1", pair_label(a, b), s.build()});
    }
    {
        SumBuilder s;
        for (int mu = 0; mu < kDim; ++mu) s.add(sym(scalar_momentum1_coeff(mu, mu)));
        s.add(dl(t.lag, JetSymbol::phi()), -1);
        out.push_back({"UniVec2", "phi", s.build()});
    }
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu) {
            const JetSymbol velocity = JetSymbol::metric(a, b, {mu});
            SumBuilder s;
            for (int nu = 0; nu < kDim; ++nu) s.add(sym(metric_momentum2_coeff(a, b, mu, nu, nu)), Rational(1, n_factor(mu, nu)));
            s.add(dl(t.lag, velocity), -1);
            s.add(sym(JetSymbol::pg1(a, b, mu)));
            s.add(christoffel_correction(t.pphi2_sym, velocity));
            out.push_back({"UniVec3", pair_label(a, b) + "," + digits({mu}), s.build()});
        }
    for (int mu = 0; mu < kDim; ++mu) {
        SumBuilder s;
        for (int nu = 0; nu < kDim; ++nu) s.add(sym(scalar_momentum2_coeff(mu, nu, nu)), Rational(1, n_factor(mu, nu)));
        s.add(dl(t.lag, JetSymbol::phi({mu})), -1);
        for (int c = 0; c < kDim; ++c)
            for (int d = c; d < kDim; ++d) s.add(mul(t.pphi2_sym[c][d], christoffel(mu, c, d)));
        s.add(sym(JetSymbol::pphi1(mu)));
        out.push_back({"UniVec4", "phi," + digits({mu}), s.build()});
    }
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu)
            for (int nu = mu; nu < kDim; ++nu)
                out.push_back({"UniVec5", pair_label(a, b) + "," + digits({mu, nu}),
                               sub(sym(JetSymbol::pg2(a, b, mu, nu)), dl(t.lag, JetSymbol::metric(a, b, {mu, nu})))});
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = mu; nu < kDim; ++nu)
            out.push_back({"UniVec6", "phi;" + digits({mu, nu}),
                           sub(t.pphi2_sym[mu][nu], dl(t.lag, JetSymbol::phi_cov({mu, nu})))});
    return out;
}

EulerLagrange mechanical_euler_lagrange(const LagrangianSpec& spec) {
    Tables t = tables(spec);
    EulerLagrange out;
    const std::string base = "ladder:w1:" + spec.kappa.str() + ":";
    int k = 0;
    for (auto [a, b] : ordered_pairs()) {
        std::string label = "ELg" + digits({a, b});
        out.metric[static_cast<std::size_t>(k)] = memo_get_or_build(base + label, [&] {
            SumBuilder s;
            s.add(dl(t.lag, JetSymbol::metric(a, b)));
            s.add(christoffel_correction(t.pphi2_val, JetSymbol::metric(a, b)), -1);
            for (int mu = 0; mu < kDim; ++mu) s.add(total_cov(t.fl.value(JetSymbol::pg1(a, b, mu)), mu), -1);
            std::vector<std::string> ignored;
            return eliminate_third_order(s.build(), label, ignored);
        });
        ++k;
    }
    out.scalar = memo_get_or_build(base + "ELphi", [&] {
        SumBuilder s;
        s.add(dl(t.lag, JetSymbol::phi()));
        for (int mu = 0; mu < kDim; ++mu) s.add(total_cov(t.fl.value(JetSymbol::pphi1(mu)), mu), -1);
        std::vector<std::string> ignored;
        return eliminate_third_order(s.build(), "ELphi", ignored);
    });
    auto check = [&](Expr e, const std::string& label) {
        if (max_metric_order(e) > 2 || max_scalar_order(e) > 2) out.notes.push_back(label + " keeps third-order jets");
    };
    for (std::size_t i = 0; i < out.metric.size(); ++i) check(out.metric[i], "ELg[" + std::to_string(i) + "]");
    check(out.scalar, "ELphi");
    return out;
}

EulerLagrange euler_lagrange_cubic(const LagrangianSpec& spec) {
    auto model = [](FnName f, int dp, int dx) {
        return fn(ScalarFn{f, static_cast<std::uint8_t>(dp), static_cast<std::uint8_t>(dx)});
    };
    const Expr g2 = model(FnName::G2, 0, 0), g2_x = model(FnName::G2, 0, 1), g2_p = model(FnName::G2, 1, 0);
    const Expr g2_xx = model(FnName::G2, 0, 2), g2_px = model(FnName::G2, 1, 1);
    const Expr g3_x = model(FnName::G3, 0, 1), g3_p = model(FnName::G3, 1, 0), g3_xx = model(FnName::G3, 0, 2);
    const Expr g3_pp = model(FnName::G3, 2, 0), g3_px = model(FnName::G3, 1, 1);
    const Expr x = kinetic_x(), box = box_phi(), kappa_sqrtg = scale(spec.kappa, sqrtg());
    const Expr half = constant(Rational(1, 2));

    Expr up[4], grad_x[4], grad_x_up[4], hess[4][4], hess_up[4][4];
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) hess[a][b] = phi_cov({a, b});
    for (int a = 0; a < kDim; ++a) {
        SumBuilder u, gx;
        for (int b = 0; b < kDim; ++b) u.add(mul(ginv(a, b), phi({b})));
        up[a] = u.build();
    }
    for (int a = 0; a < kDim; ++a) {
        SumBuilder gx;
        for (int d = 0; d < kDim; ++d) gx.add(mul(up[d], hess[d][a]), -1);
        grad_x[a] = gx.build();
    }
    for (int a = 0; a < kDim; ++a) {
        SumBuilder s;
        for (int c = 0; c < kDim; ++c) s.add(mul(ginv(a, c), grad_x[c]));
        grad_x_up[a] = s.build();
        for (int b = 0; b < kDim; ++b) {
            SumBuilder h;
            for (int c = 0; c < kDim; ++c)
                for (int d = 0; d < kDim; ++d) h.add(mul({ginv(a, c), ginv(b, d), hess[c][d]}));
            hess_up[a][b] = h.build();
        }
    }
    SumBuilder phi_grad_x_b, grad_x_sq_b, hess_sq_b, ric_pp_b;
    for (int a = 0; a < kDim; ++a) {
        phi_grad_x_b.add(mul(up[a], grad_x[a]));
        grad_x_sq_b.add(mul(grad_x_up[a], grad_x[a]));
        for (int b = 0; b < kDim; ++b) {
            hess_sq_b.add(mul(hess[a][b], hess_up[a][b]));
            ric_pp_b.add(mul({ricci_tensor(a, b), up[a], up[b]}));
        }
    }
    const Expr phi_grad_x = phi_grad_x_b.build(), grad_x_sq = grad_x_sq_b.build();
    const Expr hess_sq = hess_sq_b.build(), ric_pp = ric_pp_b.build();

    EulerLagrange out;
    // The G3 part of the metric equation: G3_X box u^a u^b / 2 + u^(a dG3^b) - g^{ab} u.dG3 / 2.
    Expr dg3_up[4];
    for (int a = 0; a < kDim; ++a) dg3_up[a] = add(mul(g3_p, up[a]), mul(g3_x, grad_x_up[a]));
    const Expr u_dg3 = add(scale(-2, mul(x, g3_p)), mul(g3_x, phi_grad_x));
    int k = 0;
    for (auto [a, b] : ordered_pairs()) {
        SumBuilder ric_up;
        for (int c = 0; c < kDim; ++c)
            for (int d = 0; d < kDim; ++d) ric_up.add(mul({ginv(a, c), ginv(b, d), ricci_tensor(c, d)}));
        Expr einstein = sub(ric_up.build(), mul({half, ricci_scalar(), ginv(a, b)}));
        SumBuilder s;
        s.add(einstein, -1);
        s.add(mul({half, add(x, g2), ginv(a, b)}));
        s.add(mul({half, add(one(), g2_x), up[a], up[b]}));
        s.add(mul({half, g3_x, box, up[a], up[b]}));
        s.add(mul({half, add(mul(up[a], dg3_up[b]), mul(up[b], dg3_up[a]))}));
        s.add(mul({half, ginv(a, b), u_dg3}), -1);
        out.metric[static_cast<std::size_t>(k++)] = mul({constant(n_factor(a, b)), kappa_sqrtg, s.build()});
    }
    SumBuilder s;
    s.add(g2_p);
    s.add(mul(add({one(), g2_x, scale(2, g3_p)}), box));
    s.add(mul(x, g2_px), -2);
    s.add(mul(g2_xx, phi_grad_x));
    s.add(mul({x, g3_px, box}), -2);
    s.add(mul({g3_xx, phi_grad_x, box}));
    s.add(mul({g3_x, box, box}));
    s.add(mul(x, g3_pp), -2);
    s.add(mul(g3_px, phi_grad_x), 2);
    s.add(mul(g3_xx, grad_x_sq));
    s.add(mul(g3_x, add(hess_sq, ric_pp)), -1);
    out.scalar = mul(kappa_sqrtg, s.build());
    return out;
}

std::vector<ConstraintStage> run_ladder(const LagrangianSpec& spec, const LadderOptions& opt) {
    Tables t = tables(spec);
    std::vector<ConstraintStage> out;

    ConstraintStage wc{"Wc", {}, {}, {}};
    for (const auto& c : contraction_equations(spec))
        if (c.family == "UniVec5" || c.family == "UniVec6") wc.constraints.push_back(c);
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu)
            for (int nu = mu; nu < kDim; ++nu) {
                Expr v = t.fl.value(JetSymbol::pg2(a, b, mu, nu));
                for (int tau = 0; tau < kDim; ++tau) wc.determined.emplace_back(metric_momentum2_coeff(a, b, mu, nu, tau), total_cov(v, tau));
            }
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = mu; nu < kDim; ++nu)
            for (int tau = 0; tau < kDim; ++tau)
                wc.determined.emplace_back(scalar_momentum2_coeff(mu, nu, tau), total_cov(t.pphi2_val[mu][nu], tau));
    wc.notes.push_back("tangency to Wc fixes the second-momentum directions of the multivector field");
    out.push_back(std::move(wc));

    ConstraintStage wl{"WL", {}, {}, {}};
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu) {
            Expr v = t.fl.value(JetSymbol::pg1(a, b, mu));
            wl.constraints.push_back({"Wlag1", pair_label(a, b) + "," + digits({mu}), sub(sym(JetSymbol::pg1(a, b, mu)), v)});
            for (int tau = 0; tau < kDim; ++tau) wl.determined.emplace_back(metric_momentum1_coeff(a, b, mu, tau), total_cov(v, tau));
        }
    for (int mu = 0; mu < kDim; ++mu) {
        Expr v = t.fl.value(JetSymbol::pphi1(mu));
        wl.constraints.push_back({"Wlag2", "phi," + digits({mu}), sub(sym(JetSymbol::pphi1(mu)), v)});
        for (int tau = 0; tau < kDim; ++tau) wl.determined.emplace_back(scalar_momentum1_coeff(mu, tau), total_cov(v, tau));
    }
    wl.notes.push_back("tangency to WL fixes the first-momentum directions of the multivector field");
    out.push_back(std::move(wl));

    EulerLagrange el = mechanical_euler_lagrange(spec);
    ConstraintStage w1{"W1", {}, {}, el.notes};
    int k = 0;
    for (auto [a, b] : ordered_pairs()) w1.constraints.push_back({"eleqns1", pair_label(a, b), el.metric[static_cast<std::size_t>(k++)]});
    w1.constraints.push_back({"eleqns2", "phi", el.scalar});
    w1.notes.push_back("the Euler-Lagrange constraints are free of momenta and project onto J^2");
    out.push_back(std::move(w1));

    if (opt.tangency) {
        ConstraintStage wf{"Wf", {}, {}, {}};
        const ConstraintStage& prev = out.back();
        for (const auto& c : prev.constraints)
            for (int tau = 0; tau < kDim; ++tau)
                wf.constraints.push_back({"tangency", "D" + digits({tau}) + " " + c.family + "[" + c.label + "]", total_cov(c.expr, tau)});
        wf.notes.push_back("the second tangency step fixes the fourth-order velocity components F_{g ab,mnl t} and F_{phi,mnl t} without new constraints");
        wf.notes.push_back("integrability of the final multivector fields may add constraints for particular G2, G3; the ladder stops here");
        out.push_back(std::move(wf));
    }
    return out;
}

std::vector<SectionEquation> section_equations(const LagrangianSpec& spec) {
    Tables t = tables(spec);
    std::vector<SectionEquation> out;
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu)
            out.push_back({"holonomy1", "d/dx" + digits({mu}) + " psi_" + pair_label(a, b),
                           {{1, g(a, b), mu}}, g(a, b, {mu})});
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu)
            for (int nu = 0; nu < kDim; ++nu)
                out.push_back({"holonomy2", "d/dx" + digits({nu}) + " psi_" + pair_label(a, b) + "," + digits({mu}),
                               {{1, g(a, b, {mu}), nu}}, g(a, b, {mu, nu})});
    for (int mu = 0; mu < kDim; ++mu)
        out.push_back({"holonomy3", "nabla_" + digits({mu}) + " psi_phi", {{1, phi(), mu}}, phi({mu})});
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = 0; nu < kDim; ++nu) {
            SumBuilder rhs;
            rhs.add(phi_cov({mu, nu}));
            for (int k = 0; k < kDim; ++k) rhs.add(mul(christoffel(k, mu, nu), phi({k})));
            out.push_back({"holonomy4", "nabla_" + digits({nu}) + " psi_phi;" + digits({mu}), {{1, phi({mu}), nu}}, rhs.build()});
        }
    for (auto [a, b] : ordered_pairs()) {
        SectionEquation e{"divergence_pg1", "d/dx^m psi_g^{" + digits({a, b}) + ",m}", {}, nullptr};
        for (int mu = 0; mu < kDim; ++mu) e.lhs.push_back({1, sym(JetSymbol::pg1(a, b, mu)), mu});
        e.rhs = sub(dl(t.lag, JetSymbol::metric(a, b)), christoffel_correction(t.pphi2_sym, JetSymbol::metric(a, b)));
        out.push_back(std::move(e));
    }
    {
        SectionEquation e{"divergence_pphi1", "d/dx^m psi_phi^{,m}", {}, dl(t.lag, JetSymbol::phi())};
        for (int mu = 0; mu < kDim; ++mu) e.lhs.push_back({1, sym(JetSymbol::pphi1(mu)), mu});
        out.push_back(std::move(e));
    }
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu) {
            const JetSymbol velocity = JetSymbol::metric(a, b, {mu});
            SectionEquation e{"divergence_pg2", "sum_n d/dx^n psi_g^{" + digits({a, b}) + "," + digits({mu}) + "n}/n", {}, nullptr};
            for (int nu = 0; nu < kDim; ++nu)
                e.lhs.push_back({Rational(1, n_factor(mu, nu)), sym(JetSymbol::pg2(a, b, mu, nu)), nu});
            e.rhs = sub(sub(dl(t.lag, velocity), sym(JetSymbol::pg1(a, b, mu))), christoffel_correction(t.pphi2_sym, velocity));
            out.push_back(std::move(e));
        }
    for (int mu = 0; mu < kDim; ++mu) {
        SectionEquation e{"divergence_pphi2", "sum_n d/dx^n psi_phi^{," + digits({mu}) + "n}/n", {}, nullptr};
        for (int nu = 0; nu < kDim; ++nu) e.lhs.push_back({Rational(1, n_factor(mu, nu)), t.pphi2_sym[mu][nu], nu});
        SumBuilder rhs;
        rhs.add(dl(t.lag, JetSymbol::phi({mu})));
        for (int c = 0; c < kDim; ++c)
            for (int d = c; d < kDim; ++d) rhs.add(mul(t.pphi2_sym[c][d], christoffel(mu, c, d)), -1);
        rhs.add(sym(JetSymbol::pphi1(mu)), -1);
        e.rhs = rhs.build();
        out.push_back(std::move(e));
    }
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu)
            for (int nu = mu; nu < kDim; ++nu)
                out.push_back({"legendre_pg2", "psi_g^{" + digits({a, b}) + "," + digits({mu, nu}) + "}",
                               {{1, sym(JetSymbol::pg2(a, b, mu, nu)), -1}}, dl(t.lag, JetSymbol::metric(a, b, {mu, nu}))});
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = mu; nu < kDim; ++nu)
            out.push_back({"legendre_pphi2", "psi_phi^{," + digits({mu, nu}) + "}", {{1, t.pphi2_sym[mu][nu], -1}},
                           dl(t.lag, JetSymbol::phi_cov({mu, nu}))});
    return out;
}

std::vector<double> section_residuals(const std::vector<SectionEquation>& eqs, const LagrangianSpec& spec,
                                      const FieldConfiguration& cfg, const Point4& x, double step) {
    std::vector<Expr> components, rhs;
    for (const auto& e : eqs) {
        for (const auto& term : e.lhs) components.push_back(term.component);
        rhs.push_back(e.rhs);
    }
    const LegendreMap fl = restricted_legendre(spec, Chart::Covariant);
    const Program momenta(fl.values, &spec);
    const Program comp_prog(components, &spec);
    const Program rhs_prog(rhs, &spec);
    ProlongOptions po;
    po.order = 3;
    auto section_at = [&](const Point4& p) {
        JetPoint<double> jp = prolong(cfg, p, po);
        auto vals = momenta.run(jp);
        for (std::size_t i = 0; i < fl.momenta.size(); ++i) jp.set(fl.momenta[i], vals[i]);
        return jp;
    };
    const JetPoint<double> centre = section_at(x);
    const auto here = comp_prog.run(centre);
    const auto right = rhs_prog.run(centre);

    // Central differences of every component along each direction, two Richardson levels.
    std::vector<std::array<double, 4>> deriv(components.size());
    for (int dir = 0; dir < kDim; ++dir) {
        auto diff = [&](double h) {
            Point4 p = x, q = x;
            p[static_cast<std::size_t>(dir)] += h;
            q[static_cast<std::size_t>(dir)] -= h;
            auto fp = comp_prog.run(section_at(p));
            auto fq = comp_prog.run(section_at(q));
            std::vector<double> d(fp.size());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = (fp[i] - fq[i]) / (2 * h);
            return d;
        };
        auto d1 = diff(step), d2 = diff(step / 2), d4 = diff(step / 4);
        for (std::size_t i = 0; i < components.size(); ++i) {
            double r1 = (4 * d2[i] - d1[i]) / 3, r2 = (4 * d4[i] - d2[i]) / 3;
            deriv[i][static_cast<std::size_t>(dir)] = (16 * r2 - r1) / 15;
        }
    }
    std::vector<double> out;
    std::size_t slot = 0;
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        double lhs = 0;
        for (const auto& term : eqs[k].lhs) {
            double v = term.direction < 0 ? here[slot] : deriv[slot][static_cast<std::size_t>(term.direction)];
            lhs += term.weight.to_double() * v;
            ++slot;
        }
        out.push_back(lhs - right[k]);
    }
    return out;
}

CodimensionReport codimension(const LagrangianSpec& spec, const JetPoint<double>& jp, double threshold) {
    LegendreJacobian jac(spec);
    Eigen::MatrixXd fl = jac.matrix(jp);
    const auto cols = fl.cols();
    const auto momenta = fl.rows() - 15;
    Eigen::MatrixXd graph(cols + momenta, cols);
    graph.topRows(cols) = Eigen::MatrixXd::Identity(cols, cols);
    graph.bottomRows(momenta) = fl.bottomRows(momenta);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(graph);
    const auto& sv = svd.singularValues();
    CodimensionReport out;
    out.ambient = static_cast<int>(cols + momenta);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > threshold * sv(0)) ++out.graph_rank;
    out.codimension = out.ambient - out.graph_rank;
    return out;
}

}  // namespace horn
