#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "horn/chart.hpp"
#include "horn/fields.hpp"
#include "horn/geometry.hpp"
#include "horn/legendre.hpp"
#include "horn/oracle.hpp"

using namespace horn;
using Catch::Approx;

namespace {

double relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double gap = 0, scale = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        gap = std::max(gap, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return gap / scale;
}

std::vector<double> run(const LegendreMap& fl, const LagrangianSpec& spec, const JetPoint<double>& jp) {
    return Program(fl.values, &spec).run(jp);
}

}  // namespace

TEST_CASE("second scalar momentum is the metric-weighted G3") {
    auto spec = LagrangianSpec::parse("X", "phi*X + 1", Rational(3, 2));
    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(3);
    auto jp = random_jet_point(rng);
    double x_val = evaluate(kinetic_x(), jp);
    double g3 = dsl::eval(spec.g3, jp.get(JetSymbol::phi()), x_val);
    for (int m = 0; m < 4; ++m)
        for (int n = m; n < 4; ++n) {
            double expected = n_factor(m, n) * 1.5 * jp.get(JetSymbol::sqrt_det()) * jp.get(JetSymbol::inv_metric(m, n)) * g3;
            CHECK(evaluate(fl.value(JetSymbol::pphi2(m, n)), jp, &spec) == Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("first scalar momentum without model functions") {
    auto spec = LagrangianSpec::parse("0", "0", 2);
    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(5);
    auto jp = random_jet_point(rng);
    for (int m = 0; m < 4; ++m) {
        double expected = 0;
        for (int n = 0; n < 4; ++n)
            expected -= 2 * jp.get(JetSymbol::sqrt_det()) * jp.get(JetSymbol::inv_metric(std::min(m, n), std::max(m, n))) *
                        jp.get(JetSymbol::phi({n}));
        CHECK(evaluate(fl.value(JetSymbol::pphi1(m)), jp, &spec) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("momenta on the flat vacuum jet") {
    auto spec = LagrangianSpec::parse("X^2", "X", 2);
    auto fl = extended_legendre(spec);
    auto jp = prolong(FieldConfiguration::minkowski(), {0.1, 0.2, 0.3, 0.4});
    auto vals = run(fl, spec, jp);
    // Only the second metric momenta survive, and they keep their metric-only closed form.
    for (std::size_t i = 100; i < vals.size(); ++i) CHECK(vals[i] == Approx(0.0).margin(1e-14));
    CHECK(evaluate(fl.extended, jp, &spec) == Approx(0.0).margin(1e-14));
}

TEST_CASE("second metric momenta match their closed form") {
    auto spec = LagrangianSpec::parse("phi", "X", Rational(1, 3));
    auto fl = restricted_legendre(spec);
    std::mt19937_64 rng(12);
    auto jp = random_jet_point(rng);
    auto inv = [&](int a, int b) { return jp.get(JetSymbol::inv_metric(std::min(a, b), std::max(a, b))); };
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < 4; ++m)
            for (int n = m; n < 4; ++n) {
                double coefficient = 0.5 * n_factor(a, b) * jp.get(JetSymbol::sqrt_det()) *
                                     (inv(a, m) * inv(b, n) + inv(a, n) * inv(b, m) - 2 * inv(a, b) * inv(m, n));
                double expected = n_factor(m, n) * coefficient / 3.0;
                CHECK(evaluate(fl.value(JetSymbol::pg2(a, b, m, n)), jp, &spec) == Approx(expected).epsilon(1e-12).margin(1e-14));
            }
}

TEST_CASE("covariant and partial charts give the same momenta") {
    for (auto [g2, g3] : {std::pair{"X^2", "phi*X"}, std::pair{"phi", "X"}}) {
        auto spec = LagrangianSpec::parse(g2, g3);
        auto cov = restricted_legendre(spec, Chart::Covariant);
        auto par = restricted_legendre(spec, Chart::Partial);
        std::mt19937_64 rng(17);
        for (int k = 0; k < 3; ++k) {
            auto jp = random_jet_point(rng);
            CHECK(relative_gap(run(cov, spec, jp), run(par, spec, jp)) < 1e-11);
        }
    }
}

TEST_CASE("momenta agree with the dual-number oracle") {
    auto spec = LagrangianSpec::parse("X^2 - phi", "phi*X");
    auto fl = restricted_legendre(spec);
    auto cfg = FieldConfiguration::random_taylor(21, 0.2);
    Point4 x{0.1, 0.0, -0.1, 0.05};
    auto jp = prolong(cfg, x);
    CHECK(relative_gap(run(fl, spec, jp), oracle::momenta(spec, cfg, x)) < 1e-10);
}

TEST_CASE("extended Legendre map") {
    auto spec = LagrangianSpec::parse("X", "phi^2");
    auto restricted = restricted_legendre(spec);
    auto ext = extended_legendre(spec);
    REQUIRE(ext.values.size() == restricted.values.size());
    for (std::size_t i = 0; i < ext.values.size(); ++i) CHECK(ext.values[i] == restricted.values[i]);

    // Pairing identity, checked on a random point with momenta assigned by the map.
    std::mt19937_64 rng(8);
    auto jp = random_jet_point(rng);
    fill_momenta(jp, ext, spec);
    double lag = evaluate(build_lagrangian(spec), jp, &spec);
    double pairing = evaluate(momentum_pairing(), jp, &spec);
    CHECK(jp.get(JetSymbol::p()) + pairing == Approx(lag).epsilon(1e-11));

    // With every velocity zero the extended momentum is the Lagrangian.
    JetPoint<double> still = jp;
    for (int o = 1; o <= 3; ++o) {
        for (const auto& s : metric_coordinates(o)) still.set(s, 0.0);
        for (const auto& s : scalar_coordinates(o, false)) still.set(s, 0.0);
    }
    fill_covariant_jets(still);
    fill_momenta(still, ext, spec);
    CHECK(still.get(JetSymbol::p()) == Approx(evaluate(build_lagrangian(spec), still, &spec)).margin(1e-13));
}

TEST_CASE("kernel directions are structurally absent from the momenta") {
    auto spec = LagrangianSpec::parse("X^2", "phi*X");
    auto fl = restricted_legendre(spec);
    for (std::size_t i = 0; i < fl.values.size(); ++i) {
        CHECK(max_metric_order(fl.values[i]) <= 2);
        CHECK(max_scalar_order(fl.values[i]) <= 2);
    }
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < 4; ++m) {
            Expr v = fl.value(JetSymbol::pg1(a, b, m));
            for (const auto& s : metric_coordinates(2)) CHECK(is_zero(partial(v, s)));
        }
}

TEST_CASE("numeric rank of the Legendre differential") {
    std::mt19937_64 rng(2024);
    LegendreJacobian particular(LagrangianSpec::parse("X", "phi"));
    LegendreJacobian general(LagrangianSpec::parse("X", "X"));
    LegendreJacobian extended(LagrangianSpec::parse("X", "phi"), true);
    for (int k = 0; k < 3; ++k) {
        auto jp = random_jet_point(rng);
        auto r = particular.rank_at(jp);
        CHECK(r.rank == 59);
        CHECK(r.kernel_max < 1e-12);
        auto q = general.rank_at(jp);
        CHECK(q.rank >= 59);
        CHECK(q.kernel_max < 1e-12);
        CHECK(extended.rank_at(jp).rank == r.rank);
    }
    CHECK(particular.columns().size() == 389);
}

TEST_CASE("projectability verdicts") {
    CHECK(projectability(LagrangianSpec::parse("X", "phi")).projects);
    CHECK(projectability(LagrangianSpec::parse("0", "phi^2 + 3")).projects);
    auto rep = projectability(LagrangianSpec::parse("0", "X"));
    CHECK_FALSE(rep.projects);
    REQUIRE_FALSE(rep.obstruction.empty());
    std::mt19937_64 rng(9);
    auto jp = random_jet_point(rng);
    auto spec = LagrangianSpec::parse("0", "X");
    for (const auto& entry : rep.obstruction) {
        CHECK(entry.alpha.scalar);
        CHECK(entry.beta.scalar);
        Expr display = bind_model(obstruction_display(entry.h, entry.i, entry.a), spec);
        CHECK(evaluate(entry.residual, jp, &spec) == Approx(evaluate(display, jp, &spec)).epsilon(1e-11).margin(1e-12));
    }
}

TEST_CASE("unified Hamiltonian") {
    reset_context();
    auto spec = LagrangianSpec::parse("X^2*phi", "phi + X");
    Expr lag = build_lagrangian(spec);
    Expr ham = build_unified_hamiltonian(spec);
    CHECK(max_metric_order(lag) <= 2);
    CHECK(max_scalar_order(lag) <= 2);
    CHECK_FALSE(contains_momentum(lag));

    Substitution no_momenta;
    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            no_momenta.symbols[intern(JetSymbol::pg1(a, b, m))] = zero();
            for (int n = m; n < kDim; ++n) no_momenta.symbols[intern(JetSymbol::pg2(a, b, m, n))] = zero();
        }
    for (int m = 0; m < kDim; ++m) {
        no_momenta.symbols[intern(JetSymbol::pphi1(m))] = zero();
        for (int n = m; n < kDim; ++n) no_momenta.symbols[intern(JetSymbol::pphi2(m, n))] = zero();
    }
    CHECK(is_identically_zero(add(substitute(ham, no_momenta), lag)));

    for (auto [a, b] : ordered_pairs())
        for (int m = 0; m < kDim; ++m) {
            CHECK(partial(ham, JetSymbol::pg1(a, b, m)) == g(a, b, {m}));
            for (int n = m; n < kDim; ++n) CHECK(partial(ham, JetSymbol::pg2(a, b, m, n)) == g(a, b, {m, n}));
        }
    for (int m = 0; m < kDim; ++m)
        for (int n = m; n < kDim; ++n) {
            SumBuilder expected;
            expected.add(phi_cov({m, n}));
            for (int c = 0; c < kDim; ++c) expected.add(mul(phi({c}), christoffel(c, m, n)));
            CHECK(is_identically_zero(sub(partial(ham, JetSymbol::pphi2(m, n)), expected.build())));
        }
}

TEST_CASE("unified Hamiltonian matches a brute-force pairing") {
    auto spec = LagrangianSpec::parse("X*phi", "phi^2");
    Expr ham = build_unified_hamiltonian(spec);
    Expr lag = build_lagrangian(spec);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    auto n = [](int a, int b) { return a == b ? 1.0 : 2.0; };
    for (int trial = 0; trial < 3; ++trial) {
        auto jp = random_jet_point(rng, 0.5, 3);
        for (auto [a, b] : ordered_pairs())
            for (int m = 0; m < kDim; ++m) {
                jp.set(JetSymbol::pg1(a, b, m), u(rng));
                for (int k = m; k < kDim; ++k) jp.set(JetSymbol::pg2(a, b, m, k), u(rng));
            }
        for (int m = 0; m < kDim; ++m) {
            jp.set(JetSymbol::pphi1(m), u(rng));
            for (int k = m; k < kDim; ++k) jp.set(JetSymbol::pphi2(m, k), u(rng));
        }
        auto gam = [&](int c, int m, int k) {
            double s = 0;
            for (int d = 0; d < kDim; ++d)
                s += 0.5 * jp.get(JetSymbol::inv_metric(c, d)) *
                     (jp.get(JetSymbol::metric(d, m, {k})) + jp.get(JetSymbol::metric(d, k, {m})) - jp.get(JetSymbol::metric(m, k, {d})));
            return s;
        };
        double pairing = 0;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b)
                for (int m = 0; m < kDim; ++m) {
                    pairing += jp.get(JetSymbol::pg1(a, b, m)) * jp.get(JetSymbol::metric(a, b, {m})) / n(a, b);
                    for (int k = 0; k < kDim; ++k)
                        pairing += jp.get(JetSymbol::pg2(a, b, m, k)) * jp.get(JetSymbol::metric(a, b, {m, k})) / (n(a, b) * n(m, k));
                }
        for (int m = 0; m < kDim; ++m) {
            pairing += jp.get(JetSymbol::pphi1(m)) * jp.get(JetSymbol::phi({m}));
            for (int k = 0; k < kDim; ++k) {
                double accel = jp.get(JetSymbol::phi_cov({m, k}));
                for (int c = 0; c < kDim; ++c) accel += jp.get(JetSymbol::phi({c})) * gam(c, m, k);
                pairing += jp.get(JetSymbol::pphi2(m, k)) * accel / n(m, k);
            }
        }
        CHECK(evaluate(ham, jp, &spec) + evaluate(lag, jp, &spec) == Approx(pairing).epsilon(1e-12));
    }
}
