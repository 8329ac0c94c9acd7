#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "horn/hamiltonian.hpp"
#include "horn/solutions.hpp"

using namespace horn;

namespace {

double max_abs(const std::vector<double>& v, std::size_t begin = 0, std::size_t end = ~std::size_t{0}) {
    double m = 0;
    for (std::size_t i = begin; i < std::min(end, v.size()); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

bool mentions_kind(Expr e, std::initializer_list<SymKind> kinds) {
    for (SymId id : free_symbols(e))
        for (SymKind k : kinds)
            if (symbol_of(id).kind == k) return true;
    return false;
}

bool mentions_velocity(Expr e) {
    for (SymId id : free_symbols(e)) {
        const JetSymbol& s = symbol_of(id);
        if ((s.kind == SymKind::Metric || s.kind == SymKind::PhiPartial || s.kind == SymKind::PhiCov) && s.order() > 0)
            return true;
    }
    return false;
}

JetPoint<double> position_point(const std::array<double, 4>& pphi, double phi_value) {
    JetPoint<double> jp;
    for (auto [a, b] : ordered_pairs()) jp.set(JetSymbol::metric(a, b), a == b ? (a == 0 ? -1.0 : 1.0) : 0.0);
    jp.set(JetSymbol::phi(), phi_value);
    for (int m = 0; m < kDim; ++m) jp.set(JetSymbol::pphi1(m), pphi[static_cast<std::size_t>(m)]);
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) jp.set(JetSymbol::pg1(a, b, m), 0.0);
    jp.complete();
    return jp;
}

}  // namespace

TEST_CASE("inversion guards") {
    CHECK_THROWS_AS(invert_velocities(LagrangianSpec::parse("0", "X")), InapplicableCase);
    CHECK_THROWS_AS(invert_velocities(LagrangianSpec::parse("0", "phi*X^2")), InapplicableCase);
    CHECK_THROWS_AS(invert_velocities(LagrangianSpec::parse("X^2", "0")), InapplicableCase);
    CHECK_NOTHROW(invert_velocities(LagrangianSpec::parse("exp(phi)*X + phi^2", "sin(phi)")));

    auto inv = invert_velocities(LagrangianSpec::parse("phi*X", "0"));
    REQUIRE(inv.pointwise.size() == 1);
    CHECK_THROWS_AS(evaluate_inversion(inv, position_point({0.1, 0.2, 0.3, 0.4}, -1.0)), SingularInversion);
    CHECK_NOTHROW(evaluate_inversion(inv, position_point({0.1, 0.2, 0.3, 0.4}, 0.5)));
}

TEST_CASE("scalar velocity on flat space") {
    auto spec = LagrangianSpec::parse("0", "0", Rational(1, 2));
    auto inv = invert_velocities(spec);
    const std::array<double, 4> p{0.3, -0.2, 0.5, 0.1};
    auto v = evaluate_inversion(inv, position_point(p, 0.0));
    // U_nu = -p^mu eta_{mu nu} / (kappa sqrt(-eta)).
    CHECK(v[0] == Catch::Approx(2 * 0.3).margin(1e-14));
    CHECK(v[1] == Catch::Approx(-2 * -0.2).margin(1e-14));
    CHECK(v[2] == Catch::Approx(-2 * 0.5).margin(1e-14));
    CHECK(v[3] == Catch::Approx(-2 * 0.1).margin(1e-14));
    for (std::size_t k = 4; k < v.size(); ++k) CHECK(v[k] == Catch::Approx(0).margin(1e-14));
}

TEST_CASE("round trip velocities to momenta to velocities") {
    for (auto [g2, g3] : std::vector<std::pair<std::string, std::string>>{{"2*X + phi", "phi"}, {"0", "0"}, {"X*exp(phi)", "phi^3/3"}}) {
        auto spec = LagrangianSpec::parse(g2, g3);
        auto inv = invert_velocities(spec);
        auto fl = restricted_legendre(spec);
        std::mt19937_64 rng(21);
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            JetPoint<double> jp = random_jet_point(rng, 0.5, 3);
            fill_momenta(jp, fl, spec);
            auto v = evaluate_inversion(inv, jp);
            for (int m = 0; m < kDim; ++m) worst = std::max(worst, std::abs(v[static_cast<std::size_t>(m)] - jp.get(JetSymbol::phi({m}))));
            std::size_t k = 4;
            for (auto [a, b] : ordered_pairs())
                for (int m = 0; m < kDim; ++m) worst = std::max(worst, std::abs(v[k++] - jp.get(JetSymbol::metric(a, b, {m}))));
        }
        INFO(g2 << ", " << g3);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("vanishing scalar gives vanishing scalar velocity") {
    auto spec = LagrangianSpec::parse("2*X + phi", "phi");
    auto inv = invert_velocities(spec);
    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(4);
    JetPoint<double> jp = random_jet_point(rng, 0.5, 3);
    for (int o = 0; o <= 3; ++o)
        for (const auto& d : multisets(o)) jp.set(JetSymbol::phi(d), 0.0);
    fill_covariant_jets(jp);
    fill_momenta(jp, fl, spec);
    auto v = evaluate_inversion(inv, jp);
    for (int m = 0; m < kDim; ++m) CHECK(v[static_cast<std::size_t>(m)] == Catch::Approx(0).margin(1e-15));
}

TEST_CASE("printed inverse relation differs from the derived one") {
    auto spec = LagrangianSpec::parse("2*X + phi", "phi");
    auto inv = invert_velocities(spec);
    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(8);
    JetPoint<double> jp = random_jet_point(rng, 0.5, 3);
    fill_momenta(jp, fl, spec);
    double gap = 0;
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m)
            gap = std::max(gap, std::abs(evaluate(velocity_display(spec, a, b, m), jp) - evaluate(inv.metric[static_cast<std::size_t>(k++)], jp)));
    CHECK(gap > 1e-3);
}

TEST_CASE("velocity tensor reproduces the first metric momentum") {
    std::mt19937_64 rng(12);
    for (auto [g2, g3] : std::vector<std::pair<std::string, std::string>>{{"0", "0"}, {"X", "phi^2 + 1"}, {"X^2", "phi*X"}}) {
        auto spec = LagrangianSpec::parse(g2, g3, Rational(3, 2));
        auto fl = restricted_legendre(spec);
        JetPoint<double> jp = random_jet_point(rng, 0.5, 3);
        double derived_gap = 0, display_gap = 0;
        for (auto [a, b] : ordered_pairs())
            for (int m = 0; m < kDim; ++m) {
                double mech = evaluate(fl.value(JetSymbol::pg1(a, b, m)), jp, &spec);
                double n = evaluate(momentum_source(spec, a, b, m), jp);
                double pre = -0.5 * n_factor(a, b) * spec.kappa.to_double() * jp.get(JetSymbol::sqrt_det());
                derived_gap = std::max(derived_gap, std::abs(mech - pre * n));
                SumBuilder printed, derived;
                for (int r = 0; r < kDim; ++r)
                    for (int l = 0; l < kDim; ++l)
                        for (int s = 0; s < kDim; ++s) {
                            printed.add(mul(g(r, l, {s}), velocity_tensor_display(r, l, s, a, b, m)));
                            derived.add(mul(g(r, l, {s}), velocity_tensor(r, l, s, a, b, m)));
                        }
                double n_printed = n + evaluate(derived.build(), jp) - evaluate(printed.build(), jp);
                display_gap = std::max(display_gap, std::abs(mech - pre * n_printed));
            }
        INFO(g2 << ", " << g3);
        CHECK(derived_gap < 1e-12);
        CHECK(display_gap > 1e-3);
    }
}

TEST_CASE("velocity tensor symmetries") {
    std::mt19937_64 rng(2);
    JetPoint<double> jp = random_jet_point(rng, 0.5, 1);
    for (int r = 0; r < kDim; ++r)
        for (int l = 0; l < kDim; ++l)
            for (int s = 0; s < kDim; ++s)
                for (int a = 0; a < kDim; ++a)
                    for (int b = 0; b < kDim; ++b)
                        for (int m = 0; m < kDim; ++m) {
                            CHECK(velocity_tensor(r, l, s, a, b, m) == velocity_tensor(r, l, s, b, a, m));
                            CHECK(velocity_tensor(r, l, s, a, b, m) == velocity_tensor(l, r, s, a, b, m));
                            CHECK(velocity_tensor_display(r, l, s, a, b, m) == velocity_tensor_display(r, l, s, b, a, m));
                        }
}

TEST_CASE("source tensor vanishes on a flat jet without scalar") {
    auto spec = LagrangianSpec::parse("X^2", "phi*X");
    JetPoint<double> jp = prolong(FieldConfiguration::minkowski(), {0.1, 0.2, 0.3, 0.4});
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) CHECK(evaluate(momentum_source(spec, a, b, m), jp) == 0.0);
}

TEST_CASE("particular Hamiltonian is written in positions and momenta") {
    auto spec = LagrangianSpec::parse("2*X + phi", "phi");
    auto sys = hamiltonian_particular(spec);
    CHECK_FALSE(mentions_velocity(sys.hamiltonian));
    REQUIRE(sys.eqs.equations.size() == 55);
    for (const auto& e : sys.eqs.equations) {
        CHECK_FALSE(mentions_velocity(e.lhs));
        CHECK_FALSE(mentions_velocity(e.rhs));
        CHECK_FALSE(mentions_kind(e.rhs, {SymKind::PgSecond, SymKind::PphiSecond}));
    }
    CHECK(sys.eqs.tangency.empty());

    // The momentum families pair with the velocity coefficients F_{g ab,mu} and F_{phi,mu}.
    for (const auto& e : sys.eqs.equations) {
        if (e.coordinate.kind == SymKind::PphiFirst) {
            int mu = e.coordinate.idx[0];
            CHECK_FALSE(is_zero(partial(e.rhs, JetSymbol::coeff(CoeffFamily::ScalarVelocity, 0, 0, {mu}))));
        }
        if (e.coordinate.kind == SymKind::PgFirst) {
            int mu = e.coordinate.idx[0];
            Expr c = partial(e.rhs, JetSymbol::coeff(CoeffFamily::MetricVelocity, e.coordinate.a, e.coordinate.b, {mu}));
            CHECK_FALSE(is_zero(c));
        }
    }
}

TEST_CASE("Legendre-dual identity for the particular Hamiltonian") {
    auto spec = LagrangianSpec::parse("2*X + phi", "phi");
    auto sys = hamiltonian_particular(spec);
    auto inv = invert_velocities(spec);
    Expr lag0 = projectability(spec).lagrangian0;

    SumBuilder pairing;
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) pairing.add(mul(sym(JetSymbol::pg1(a, b, m)), inv.metric[static_cast<std::size_t>(k++)]));
    for (int m = 0; m < kDim; ++m) pairing.add(mul(sym(JetSymbol::pphi1(m)), inv.scalar[static_cast<std::size_t>(m)]));
    CHECK(is_zero(sub(sys.hamiltonian, sub(pairing.build(), substitute(lag0, inv.substitution())))));

    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 5; ++i) {
        JetPoint<double> jp = random_jet_point(rng, 0.5, 3);
        fill_momenta(jp, fl, spec);
        double expected = -evaluate(lag0, jp);
        for (auto [a, b] : ordered_pairs())
            for (int m = 0; m < kDim; ++m) expected += jp.get(JetSymbol::pg1(a, b, m)) * jp.get(JetSymbol::metric(a, b, {m}));
        for (int m = 0; m < kDim; ++m) expected += jp.get(JetSymbol::pphi1(m)) * jp.get(JetSymbol::phi({m}));
        CHECK(evaluate(sys.hamiltonian, jp) == Catch::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("Hamilton equations along sections reduce to the Euler-Lagrange equations") {
    for (auto [g2, g3] : std::vector<std::pair<std::string, std::string>>{{"2*X + phi", "phi"}, {"X^2", "phi*X"}, {"X", "X"}}) {
        auto spec = LagrangianSpec::parse(g2, g3);
        auto sys = hamiltonian_general(spec);
        HamiltonResidual residual(sys, spec);
        auto el = mechanical_euler_lagrange(spec);
        std::vector<Expr> roots(el.metric.begin(), el.metric.end());
        roots.push_back(el.scalar);
        Program elp(roots, &spec);
        for (std::uint64_t seed : {1u, 2u}) {
            JetPoint<double> jets = prolong(FieldConfiguration::random_taylor(seed), {0, 0, 0, 0});
            auto r = residual(jets);
            auto e = elp.run(jets);
            INFO(g2 << ", " << g3 << " seed " << seed);
            for (std::size_t i = 0; i < 11; ++i) CHECK(r[i] == Catch::Approx(-e[i]).epsilon(1e-9).margin(1e-12));
            CHECK(max_abs(r, 11) < 1e-10);
        }
    }
}

TEST_CASE("general and particular equations agree on the inversion image") {
    auto spec = LagrangianSpec::parse("X*(1 + phi^2)", "phi/2");
    auto part = hamiltonian_particular(spec);
    auto gen = hamiltonian_general(spec);
    HamiltonResidual rp(part, spec), rg(gen, spec);
    // General coordinates: g (10), phi, g_{ab,mu} (40), phi_{;mu} (4), p_g (40), p_phi (4).
    auto inv = invert_velocities(spec);
    std::vector<Expr> dvel;
    for (const JetSymbol& z : part.coordinates) {
        for (Expr v : inv.metric) dvel.push_back(partial(v, z));
        for (Expr u : inv.scalar) dvel.push_back(partial(u, z));
    }
    Program dvp(dvel);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        JetPoint<double> jets = prolong(FieldConfiguration::random_taylor(seed + 100), {0, 0, 0, 0});
        auto p = rp(jets);
        auto gq = rg(jets);
        auto d = dvp.run(rp.section_point(jets));
        for (std::size_t i = 0; i < part.coordinates.size(); ++i) {
            // Index of the same coordinate in the general list.
            std::size_t gi = i < 11 ? i : i + 44;
            double pulled = gq[gi];
            for (std::size_t k = 0; k < 40; ++k) pulled += d[i * 44 + k] * gq[11 + k];
            for (std::size_t k = 0; k < 4; ++k) pulled += d[i * 44 + 40 + k] * gq[51 + k];
            double scale = std::max(1.0, std::abs(p[i]));
            CHECK(std::abs(p[i] - pulled) / scale < 1e-6);
        }
    }
}

TEST_CASE("tangency and classification in the general case") {
    auto spec = LagrangianSpec::parse("0", "X");
    auto sys = hamiltonian_general(spec);
    REQUIRE(sys.classification.size() == 2);
    CHECK(sys.classification[0].constraint);
    CHECK_FALSE(sys.classification[1].constraint);
    CHECK_FALSE(sys.classification[1].second_order_dependencies.empty());
    CHECK(sys.eqs.tangency.size() == 160);
    CHECK(sys.eqs.equations.size() == 99);

    auto projectable = hamiltonian_general(LagrangianSpec::parse("X^2", "phi"));
    CHECK(projectable.classification[0].constraint);
    CHECK(projectable.classification[1].constraint);

    HamiltonResidual residual(sys, spec);
    auto r = residual(prolong(FieldConfiguration::random_taylor(9), {0, 0, 0, 0}));
    CHECK(max_abs(r, sys.eqs.equations.size()) < 1e-10);
}

TEST_CASE("Hamilton residuals vanish on an FLRW solution") {
    auto spec = LagrangianSpec::parse("X*(1 + phi^2)", "phi/2");
    FlrwSolution sol = solve_flrw(spec, 0.3, 0.4);
    CHECK(sol.residual < 1e-10);
    CHECK(sol.hubble > 0);
    auto sys = hamiltonian_particular(spec);
    HamiltonResidual residual(sys, spec);
    CHECK(max_abs(residual(prolong(sol.config, {0, 0, 0, 0}))) < 1e-6);

    // Off the solution the metric and scalar rows do not vanish.
    FieldConfiguration off = flrw_polynomial(sol.hubble * 1.1, sol.acceleration, 0.3, 0.4, sol.scalar_acceleration);
    CHECK(max_abs(residual(prolong(off, {0, 0, 0, 0}))) > 1e-4);
}
