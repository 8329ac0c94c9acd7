#include "horn/hamiltonian.hpp"

#include <cmath>
#include <map>

#include "horn/chart.hpp"
#include "horn/geometry.hpp"

namespace horn {

namespace {

Expr model_expr(const dsl::SExpr& f) { return dsl::to_expr(f, {phi(), kinetic_x()}); }

JetSymbol metric_rate(int a, int b, int tau) { return JetSymbol::coeff(CoeffFamily::MetricVelocity, a, b, {tau}); }
JetSymbol scalar_rate(int tau) { return JetSymbol::coeff(CoeffFamily::ScalarVelocity, 0, 0, {tau}); }
JetSymbol metric_accel_rate(int a, int b, int mu, int tau) {
    return JetSymbol::coeff(CoeffFamily::MetricAcceleration, a, b, {mu, tau});
}
JetSymbol scalar_accel_rate(int mu, int tau) { return JetSymbol::coeff(CoeffFamily::ScalarAcceleration, 0, 0, {mu, tau}); }

std::string idx(std::initializer_list<int> xs) {
    std::string s;
    for (int x : xs) s += static_cast<char>('0' + x);
    return s;
}

/// S^{c ab mu} = g^{cb} g^{a mu} + g^{ca} g^{b mu} - g^{c mu} g^{ab}.
Expr source_bracket(int c, int a, int b, int mu) {
    return add({mul(ginv(c, b), ginv(a, mu)), mul(ginv(c, a), ginv(b, mu)), neg(mul(ginv(c, mu), ginv(a, b)))});
}

/// g^{x(a} g^{b)y} = (g^{xa} g^{by} + g^{xb} g^{ay}) / 2.
Expr sym_pair(int x, int a, int b, int y) {
    return scale(Rational(1, 2), add(mul(ginv(x, a), ginv(b, y)), mul(ginv(x, b), ginv(a, y))));
}

/// Bound Legendre values and the second-order weights L_g^{ab,mn} = p_g^{ab,(mn)} / n(mn),
/// L_phi^{mn} = p_phi^{,(mn)} / n(mn).
struct Tables {
    std::map<JetSymbol, Expr> value;
    Expr lg[10][4][4];
    Expr lphi[4][4];
};

Tables tables(const LagrangianSpec& spec) {
    LegendreMap fl = restricted_legendre(spec, Chart::Covariant);
    Tables t;
    for (std::size_t i = 0; i < fl.momenta.size(); ++i) t.value[fl.momenta[i]] = bind_model(fl.values[i], spec);
    int pair = 0;
    for (auto [a, b] : ordered_pairs()) {
        for (int m = 0; m < kDim; ++m)
            for (int n = m; n < kDim; ++n)
                t.lg[pair][m][n] = t.lg[pair][n][m] =
                    scale(Rational(1, n_factor(m, n)), t.value.at(JetSymbol::pg2(a, b, m, n)));
        ++pair;
    }
    for (int m = 0; m < kDim; ++m)
        for (int n = m; n < kDim; ++n)
            t.lphi[m][n] = t.lphi[n][m] = scale(Rational(1, n_factor(m, n)), t.value.at(JetSymbol::pphi2(m, n)));
    return t;
}

/// Bound partial-chart Lagrangian with the second jets set to zero (it is affine in them).
Expr first_order_lagrangian(const LagrangianSpec& spec) {
    Substitution drop;
    for (auto f : field_indices())
        for (const auto& d : multisets(2)) drop.symbols[intern(f.jet(d))] = zero();
    return substitute(bind_model(build_lagrangian(spec, Chart::Partial), spec), drop);
}

/// One fibre coordinate with the multivector coefficients giving its rate along x^tau.
struct Coordinate {
    JetSymbol symbol;
    std::array<Expr, 4> rate;
};

/// d_tau f = sum_j (df/dz_j) * rate_j(tau) over the given coordinates.
Expr along(Expr f, int tau, const std::vector<Coordinate>& coords) {
    SumBuilder s;
    for (const Coordinate& c : coords) {
        Expr d = partial(f, c.symbol);
        if (!is_zero(d)) s.add(mul(d, c.rate[static_cast<std::size_t>(tau)]));
    }
    return s.build();
}

/// A conjugate pair (Q, P^nu) of the Hamilton-Cartan form.
struct Pair {
    Expr q;
    std::array<Expr, 4> p;
};

/// Contraction of the multivector with the Hamilton-Cartan form along each coordinate:
/// dH/dz_i = sum_{pairs, nu} (dP^nu/dz_i d_nu Q - dQ/dz_i d_nu P^nu).
std::vector<HamiltonEquation> contract(Expr hamiltonian, const std::vector<Pair>& pairs,
                                       const std::vector<Coordinate>& coords,
                                       const std::vector<std::pair<std::string, std::string>>& names) {
    std::vector<Expr> dq(pairs.size() * kDim), dp(pairs.size() * kDim);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        for (int nu = 0; nu < kDim; ++nu) {
            dq[k * kDim + static_cast<std::size_t>(nu)] = along(pairs[k].q, nu, coords);
            dp[k * kDim + static_cast<std::size_t>(nu)] = along(pairs[k].p[static_cast<std::size_t>(nu)], nu, coords);
        }
    std::vector<HamiltonEquation> out;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const JetSymbol& z = coords[i].symbol;
        SumBuilder rhs;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (int nu = 0; nu < kDim; ++nu) {
                std::size_t slot = k * kDim + static_cast<std::size_t>(nu);
                Expr dpi = partial(pairs[k].p[static_cast<std::size_t>(nu)], z);
                if (!is_zero(dpi)) rhs.add(mul(dpi, dq[slot]));
                Expr dqi = partial(pairs[k].q, z);
                if (!is_zero(dqi)) rhs.add(mul(dqi, dp[slot]), -1);
            }
        out.push_back({names[i].first, names[i].second, z, partial(hamiltonian, z), rhs.build()});
    }
    return out;
}

/// Positions and first momenta with their multivector rates (shared by both cases).
void base_coordinates(std::vector<Coordinate>& positions, std::vector<Coordinate>& momenta,
                      std::vector<std::pair<std::string, std::string>>& pos_names,
                      std::vector<std::pair<std::string, std::string>>& mom_names) {
    for (auto [a, b] : ordered_pairs()) {
        Coordinate c{JetSymbol::metric(a, b), {}};
        for (int t = 0; t < kDim; ++t) c.rate[static_cast<std::size_t>(t)] = sym(metric_rate(a, b, t));
        positions.push_back(c);
        pos_names.emplace_back("dH/dg", "g" + idx({a, b}));
    }
    {
        Coordinate c{JetSymbol::phi(), {}};
        for (int t = 0; t < kDim; ++t) c.rate[static_cast<std::size_t>(t)] = sym(scalar_rate(t));
        positions.push_back(c);
        pos_names.emplace_back("dH/dphi", "phi");
    }
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            Coordinate c{JetSymbol::pg1(a, b, m), {}};
            for (int t = 0; t < kDim; ++t) c.rate[static_cast<std::size_t>(t)] = sym(metric_momentum1_coeff(a, b, m, t));
            momenta.push_back(c);
            mom_names.emplace_back("dH/dp_g", "pg" + idx({a, b, m}));
        }
    for (int m = 0; m < kDim; ++m) {
        Coordinate c{JetSymbol::pphi1(m), {}};
        for (int t = 0; t < kDim; ++t) c.rate[static_cast<std::size_t>(t)] = sym(scalar_momentum1_coeff(m, t));
        momenta.push_back(c);
        mom_names.emplace_back("dH/dp_phi", "pphi" + idx({m}));
    }
}

Expr first_momenta_pairing(const std::array<Expr, 40>& metric_velocity, const std::array<Expr, 4>& scalar_velocity) {
    SumBuilder s;
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) s.add(mul(sym(JetSymbol::pg1(a, b, m)), metric_velocity[static_cast<std::size_t>(k++)]));
    for (int m = 0; m < kDim; ++m) s.add(mul(sym(JetSymbol::pphi1(m)), scalar_velocity[static_cast<std::size_t>(m)]));
    return s.build();
}

std::vector<JetSymbol> second_order_coordinates() {
    std::vector<JetSymbol> out = metric_coordinates(2);
    auto s = scalar_coordinates(2, true);
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

}  // namespace

// ---- velocity inversion ----------------------------------------------------------------------

Substitution VelocityInversion::substitution() const {
    Substitution s;
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) s.symbols[intern(JetSymbol::metric(a, b, {m}))] = metric[static_cast<std::size_t>(k++)];
    for (int m = 0; m < kDim; ++m) s.symbols[intern(JetSymbol::phi({m}))] = scalar[static_cast<std::size_t>(m)];
    return s;
}

VelocityInversion invert_velocities(const LagrangianSpec& spec) {
    VelocityInversion inv;
    inv.structural = {{"dG3/dX", model_expr(dsl::mixed(spec.g3, 0, 1))}, {"d2G2/dX2", model_expr(dsl::mixed(spec.g2, 0, 2))}};
    if (!dsl::is_zero(dsl::mixed(spec.g3, 0, 1)))
        throw InapplicableCase("G3 = " + spec.g3_source +
                               " depends on X: the Poincare-Cartan form does not project to J1 (dG3/dX != 0), so the "
                               "velocities cannot be isolated");
    if (!dsl::is_zero(dsl::mixed(spec.g2, 0, 2)))
        throw InapplicableCase("G2 = " + spec.g2_source + " is not affine in X (d2G2/dX2 != 0)");

    inv.denominator = add({one(), model_expr(dsl::mixed(spec.g2, 0, 1)), model_expr(dsl::mixed(spec.g3, 1, 0))});
    inv.pointwise = {{"1 + dG2/dX + dG3/dphi", inv.denominator}};

    const Rational inv_kappa = Rational(1) / spec.kappa;
    const Expr scale_factor = mul(pow(sqrtg(), -1), pow(inv.denominator, -1));
    for (int nu = 0; nu < kDim; ++nu) {
        SumBuilder s;
        for (int mu = 0; mu < kDim; ++mu) s.add(mul(sym(JetSymbol::pphi1(mu)), g(mu, nu)));
        inv.scalar[static_cast<std::size_t>(nu)] = mul(scale(-inv_kappa, scale_factor), s.build());
    }

    // p_g = kappa sqrt(-g) A(g) g_{,} + R(g, phi, phi_{,}); R is the velocity-free part evaluated at phi_{,} = U.
    Substitution rest;
    for (const JetSymbol& v : metric_coordinates(1)) rest.symbols[intern(v)] = zero();
    for (int m = 0; m < kDim; ++m) rest.symbols[intern(JetSymbol::phi({m}))] = inv.scalar[static_cast<std::size_t>(m)];
    LegendreMap fl = restricted_legendre(spec, Chart::Covariant);
    std::array<Expr, 40> reduced{};
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            Expr value = bind_model(fl.value(JetSymbol::pg1(a, b, m)), spec);
            if (max_metric_order(value) > 1 || max_scalar_order(value) > 1)
                throw std::logic_error("first metric momentum depends on second-order jets in the particular case");
            reduced[static_cast<std::size_t>(k++)] = sub(sym(JetSymbol::pg1(a, b, m)), substitute(value, rest));
        }

    // Inverse of A: g_{ab,mu} = 1/(kappa sqrt(-g)) sum_{l<=s, nu} W_{ab mu, ls nu} reduced^{ls,nu}, with
    // W = (g_al g_bs + g_as g_bl) g_mu nu + (g_am g_bn + g_bm g_an) g_ls / 3
    //     - (g_am g_bl g_sn + g_bm g_al g_sn + g_am g_bs g_ln + g_bm g_as g_ln) / 3.
    const Expr prefactor = scale(inv_kappa, pow(sqrtg(), -1));
    k = 0;
    for (auto [al, be] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu) {
            SumBuilder s;
            int j = 0;
            for (auto [la, si] : ordered_pairs())
                for (int nu = 0; nu < kDim; ++nu) {
                    SumBuilder w;
                    w.add(mul({g(al, la), g(be, si), g(mu, nu)}));
                    w.add(mul({g(al, si), g(be, la), g(mu, nu)}));
                    w.add(mul({g(al, mu), g(be, nu), g(la, si)}), Rational(1, 3));
                    w.add(mul({g(be, mu), g(al, nu), g(la, si)}), Rational(1, 3));
                    w.add(mul({g(al, mu), g(be, la), g(si, nu)}), Rational(-1, 3));
                    w.add(mul({g(be, mu), g(al, la), g(si, nu)}), Rational(-1, 3));
                    w.add(mul({g(al, mu), g(be, si), g(la, nu)}), Rational(-1, 3));
                    w.add(mul({g(be, mu), g(al, si), g(la, nu)}), Rational(-1, 3));
                    s.add(mul(w.build(), reduced[static_cast<std::size_t>(j++)]));
                }
            inv.metric[static_cast<std::size_t>(k++)] = mul(prefactor, s.build());
        }
    return inv;
}

std::vector<double> evaluate_inversion(const VelocityInversion& inv, const JetPoint<double>& jp, double tolerance) {
    const double d = evaluate(inv.denominator, jp);
    if (!(std::abs(d) > tolerance))
        throw SingularInversion("1 + dG2/dX + dG3/dphi = " + std::to_string(d) +
                                " at this point: p_phi^{,mu} cannot replace phi_{;mu} as a coordinate");
    std::vector<Expr> roots(inv.scalar.begin(), inv.scalar.end());
    roots.insert(roots.end(), inv.metric.begin(), inv.metric.end());
    return Program(roots).run(jp);
}

Expr velocity_display(const LagrangianSpec& spec, int al, int be, int mu) {
    const Expr g3 = model_expr(spec.g3);
    const Expr denom = add({one(), model_expr(dsl::mixed(spec.g2, 0, 1)), model_expr(dsl::mixed(spec.g3, 1, 0))});
    const Expr ratio = mul(g3, pow(denom, -1));
    SumBuilder total;
    for (auto [la, si] : ordered_pairs())
        for (int nu = 0; nu < kDim; ++nu) {
            SumBuilder shift;
            for (int de = 0; de < kDim; ++de)
                for (int ep = 0; ep < kDim; ++ep) {
                    Expr bracket = add({mul(ginv(nu, la), ginv(ep, si)), mul(ginv(nu, si), ginv(ep, la)),
                                        neg(mul(ginv(la, si), ginv(ep, nu)))});
                    shift.add(mul({sym(JetSymbol::pphi1(de)), g(de, ep), bracket}));
                }
            Expr momentum = sub(sym(JetSymbol::pg1(la, si, nu)), mul({constant(Rational(1, 2)), ratio, shift.build()}));
            SumBuilder w;
            w.add(mul({g(al, la), g(be, mu), g(si, nu)}), -2);
            w.add(mul({g(al, mu), g(be, la), g(si, nu)}), -2);
            w.add(mul({g(al, la), g(be, si), g(mu, nu)}), 6);
            w.add(mul({g(al, nu), g(be, mu), g(la, si)}));
            w.add(mul({g(al, mu), g(be, nu), g(la, si)}));
            total.add(mul(momentum, w.build()));
        }
    Rational c = Rational(1, 3 * n_factor(al, be)) / spec.kappa;
    return mul(scale(c, pow(sqrtg(), -1)), total.build());
}

// ---- M and N tensors ---------------------------------------------------------------------------

Expr velocity_tensor(int r, int l, int s, int a, int b, int mu) {
    SumBuilder t;
    t.add(mul(ginv(r, l), sym_pair(s, a, b, mu)));
    t.add(mul(ginv(r, s), sym_pair(l, a, b, mu)), -1);
    t.add(mul(ginv(l, s), sym_pair(r, a, b, mu)), -1);
    t.add(mul(ginv(s, mu), sym_pair(r, a, b, l)));
    return t.build();
}

Expr velocity_tensor_display(int r, int l, int s, int a, int b, int mu) {
    SumBuilder t;
    t.add(mul(ginv(r, s), sym_pair(mu, a, b, l)), -3);
    t.add(mul(ginv(r, l), sym_pair(mu, a, b, s)), 2);
    t.add(mul({ginv(a, b), ginv(r, s), ginv(mu, l)}), 2);
    t.add(mul(ginv(mu, s), sym_pair(l, a, b, r)), 3);
    t.add(mul(ginv(r, mu), sym_pair(l, a, b, s)), -2);
    t.add(mul({ginv(a, b), ginv(r, l), ginv(mu, s)}), -1);
    t.add(mul({ginv(r, l), ginv(mu, s), ginv(a, b)}), Rational(-1, 2));
    t.add(mul(sym_pair(mu, r, l, s), ginv(a, b)));
    t.add(mul(ginv(mu, s), sym_pair(a, r, l, b)));
    return t.build();
}

Expr momentum_source(const LagrangianSpec& spec, int a, int b, int mu) {
    const Expr g3 = model_expr(spec.g3);
    SumBuilder n;
    for (int c = 0; c < kDim; ++c) n.add(mul({g3, phi({c}), source_bracket(c, a, b, mu)}));
    for (int r = 0; r < kDim; ++r)
        for (int l = 0; l < kDim; ++l)
            for (int s = 0; s < kDim; ++s) n.add(mul(g(r, l, {s}), velocity_tensor(r, l, s, a, b, mu)), -1);
    return n.build();
}

const char* case_name(HamiltonCase c) { return c == HamiltonCase::Particular ? "particular" : "general"; }

// ---- Hamiltonian systems -------------------------------------------------------------------

HamiltonianSystem hamiltonian_particular(const LagrangianSpec& spec) {
    const VelocityInversion inv = invert_velocities(spec);
    const Tables t = tables(spec);
    const Substitution on_image = inv.substitution();

    HamiltonianSystem sys;
    sys.eqs.kind = HamiltonCase::Particular;
    sys.hamiltonian = sub(first_momenta_pairing(inv.metric, inv.scalar), substitute(first_order_lagrangian(spec), on_image));

    std::vector<Coordinate> positions, momenta;
    std::vector<std::pair<std::string, std::string>> pos_names, mom_names;
    base_coordinates(positions, momenta, pos_names, mom_names);
    std::vector<Coordinate> coords = positions;
    coords.insert(coords.end(), momenta.begin(), momenta.end());
    auto names = pos_names;
    names.insert(names.end(), mom_names.begin(), mom_names.end());
    for (const auto& c : coords) sys.coordinates.push_back(c.symbol);

    std::vector<Pair> pairs;
    for (auto [a, b] : ordered_pairs()) {
        Pair p{g(a, b), {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = sym(JetSymbol::pg1(a, b, nu));
        pairs.push_back(p);
    }
    {
        Pair p{phi(), {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = sym(JetSymbol::pphi1(nu));
        pairs.push_back(p);
    }
    for (int k = 0; k < 10; ++k)
        for (int mu = 0; mu < kDim; ++mu) {
            Pair p{inv.metric[static_cast<std::size_t>(4 * k + mu)], {}};
            for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = t.lg[k][mu][nu];
            pairs.push_back(p);
        }
    for (int mu = 0; mu < kDim; ++mu) {
        Pair p{inv.scalar[static_cast<std::size_t>(mu)], {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = t.lphi[mu][nu];
        pairs.push_back(p);
    }
    sys.eqs.equations = contract(sys.hamiltonian, pairs, coords, names);
    sys.notes.push_back("inverse metric-velocity table derived from the first metric momentum; the printed V display "
                        "differs from it (compare velocity_display)");
    return sys;
}

HamiltonianSystem hamiltonian_general(const LagrangianSpec& spec) {
    const Tables t = tables(spec);
    HamiltonianSystem sys;
    sys.eqs.kind = HamiltonCase::General;

    std::array<Expr, 40> metric_velocity{};
    std::array<Expr, 4> scalar_velocity{};
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) metric_velocity[static_cast<std::size_t>(k++)] = g(a, b, {m});
    for (int m = 0; m < kDim; ++m) scalar_velocity[static_cast<std::size_t>(m)] = phi({m});
    sys.hamiltonian = sub(first_momenta_pairing(metric_velocity, scalar_velocity), first_order_lagrangian(spec));

    std::vector<Coordinate> positions, momenta;
    std::vector<std::pair<std::string, std::string>> pos_names, mom_names;
    base_coordinates(positions, momenta, pos_names, mom_names);
    std::vector<Coordinate> coords = positions;
    auto names = pos_names;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            Coordinate c{JetSymbol::metric(a, b, {m}), {}};
            for (int tau = 0; tau < kDim; ++tau) c.rate[static_cast<std::size_t>(tau)] = sym(metric_accel_rate(a, b, m, tau));
            coords.push_back(c);
            names.emplace_back("dH/dg_{,mu}", "g" + idx({a, b}) + "," + idx({m}));
        }
    for (int m = 0; m < kDim; ++m) {
        Coordinate c{JetSymbol::phi({m}), {}};
        for (int tau = 0; tau < kDim; ++tau) c.rate[static_cast<std::size_t>(tau)] = sym(scalar_accel_rate(m, tau));
        coords.push_back(c);
        names.emplace_back("dH/dphi_{;mu}", "phi;" + idx({m}));
    }
    coords.insert(coords.end(), momenta.begin(), momenta.end());
    names.insert(names.end(), mom_names.begin(), mom_names.end());
    for (const auto& c : coords) sys.coordinates.push_back(c.symbol);

    std::vector<Pair> pairs;
    for (auto [a, b] : ordered_pairs()) {
        Pair p{g(a, b), {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = sym(JetSymbol::pg1(a, b, nu));
        pairs.push_back(p);
    }
    {
        Pair p{phi(), {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = sym(JetSymbol::pphi1(nu));
        pairs.push_back(p);
    }
    k = 0;
    for (auto [a, b] : ordered_pairs()) {
        for (int mu = 0; mu < kDim; ++mu) {
            Pair p{g(a, b, {mu}), {}};
            for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = t.lg[k][mu][nu];
            pairs.push_back(p);
        }
        ++k;
    }
    for (int mu = 0; mu < kDim; ++mu) {
        Pair p{phi({mu}), {}};
        for (int nu = 0; nu < kDim; ++nu) p.p[static_cast<std::size_t>(nu)] = t.lphi[mu][nu];
        pairs.push_back(p);
    }
    sys.eqs.equations = contract(sys.hamiltonian, pairs, coords, names);

    // Tangency of the multivector to the constraint p_g^{ab,mu} = -n(ab)/2 kappa sqrt(-g) N^{ab mu}.
    std::vector<Coordinate> velocity_coords(coords.begin(), coords.begin() + 11 + 40 + 4);
    for (auto [a, b] : ordered_pairs())
        for (int mu = 0; mu < kDim; ++mu) {
            Expr constraint_value = mul({constant(Rational(-n_factor(a, b), 2) * spec.kappa), sqrtg(), momentum_source(spec, a, b, mu)});
            for (int tau = 0; tau < kDim; ++tau) {
                Expr e = sub(sym(metric_momentum1_coeff(a, b, mu, tau)), along(constraint_value, tau, velocity_coords));
                sys.eqs.tangency.push_back({"tangency", "pg" + idx({a, b, mu}) + "_" + idx({tau}), e});
            }
        }

    // Which first momenta are constraints: a constraint has no second-order jet dependence.
    const auto second = second_order_coordinates();
    auto classify = [&](const std::string& family, const std::vector<JetSymbol>& momenta_of_family) {
        MomentumClass mc{family, true, {}};
        for (const JetSymbol& s : second)
            for (const JetSymbol& p : momenta_of_family) {
                Expr d = partial(t.value.at(p), s);
                if (!is_zero(d) && !is_identically_zero(d)) {
                    mc.second_order_dependencies.push_back(s);
                    break;
                }
            }
        mc.constraint = mc.second_order_dependencies.empty();
        sys.classification.push_back(mc);
    };
    std::vector<JetSymbol> pg, pphi;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) pg.push_back(JetSymbol::pg1(a, b, m));
    for (int m = 0; m < kDim; ++m) pphi.push_back(JetSymbol::pphi1(m));
    classify("p_g^{ab,mu}", pg);
    classify("p_phi^{,mu}", pphi);

    sys.notes.push_back("dH/dg_{ab,mu} = -F_{g cd,nu} dL_g^{ab,mu nu}/dg_{cd}: the sign is opposite to the printed family");
    sys.notes.push_back("dH/dphi_{;mu} derived from the contraction; the printed family uses abbreviated indices and a "
                        "different grouping of the dL_phi/dX terms");
    sys.notes.push_back("velocity tensor M rederived from the first metric momentum; the printed nine-term M differs "
                        "(compare velocity_tensor_display)");
    return sys;
}

// ---- residuals along sections -----------------------------------------------------------------

HamiltonResidual::HamiltonResidual(const HamiltonianSystem& sys, const LagrangianSpec& spec) {
    const Tables t = tables(spec);
    std::vector<Expr> values, rates;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            momenta_.push_back(JetSymbol::pg1(a, b, m));
            values.push_back(t.value.at(momenta_.back()));
            for (int tau = 0; tau < kDim; ++tau) {
                rate_symbols_.push_back(metric_momentum1_coeff(a, b, m, tau));
                rates.push_back(total_cov(values.back(), tau));
            }
        }
    for (int m = 0; m < kDim; ++m) {
        momenta_.push_back(JetSymbol::pphi1(m));
        values.push_back(t.value.at(momenta_.back()));
        for (int tau = 0; tau < kDim; ++tau) {
            rate_symbols_.push_back(scalar_momentum1_coeff(m, tau));
            rates.push_back(total_cov(values.back(), tau));
        }
    }
    legendre_ = Program(values);
    momentum_rates_ = Program(rates);
    std::vector<Expr> roots;
    for (const auto& e : sys.eqs.equations) roots.push_back(sub(e.lhs, e.rhs));
    for (const auto& c : sys.eqs.tangency) roots.push_back(c.expr);
    residual_ = Program(roots);
}

JetPoint<double> HamiltonResidual::section_point(const JetPoint<double>& jets) const {
    JetPoint<double> jp = jets;
    auto p = legendre_.run(jets);
    for (std::size_t i = 0; i < momenta_.size(); ++i) jp.set(momenta_[i], p[i]);
    auto r = momentum_rates_.run(jets);
    for (std::size_t i = 0; i < rate_symbols_.size(); ++i) jp.set(rate_symbols_[i], r[i]);
    for (int tau = 0; tau < kDim; ++tau) {
        for (auto [a, b] : ordered_pairs()) {
            jp.set(metric_rate(a, b, tau), jets.get(JetSymbol::metric(a, b, {tau})));
            for (int m = 0; m < kDim; ++m) jp.set(metric_accel_rate(a, b, m, tau), jets.get(JetSymbol::metric(a, b, {m, tau})));
        }
        jp.set(scalar_rate(tau), jets.get(JetSymbol::phi({tau})));
        for (int m = 0; m < kDim; ++m) jp.set(scalar_accel_rate(m, tau), jets.get(JetSymbol::phi({m, tau})));
    }
    return jp;
}

std::vector<double> HamiltonResidual::operator()(const JetPoint<double>& jets) const {
    return residual_.run(section_point(jets));
}

}  // namespace horn
