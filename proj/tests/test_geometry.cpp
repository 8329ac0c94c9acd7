#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "horn/chart.hpp"
#include "horn/fields.hpp"
#include "horn/geometry.hpp"
#include "horn/lagrangian.hpp"
#include "horn/legendre.hpp"
#include "horn/oracle.hpp"

using namespace horn;
using Catch::Approx;

namespace {
const Point4 kPoint{0.3, 0.7, 1.1, 0.4};
}

TEST_CASE("Christoffel symbols of simple backgrounds") {
    auto flat = prolong(FieldConfiguration::minkowski(), kPoint);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = b; c < 4; ++c) CHECK(evaluate(christoffel(a, b, c), flat) == Approx(0.0).margin(1e-14));

    double hubble = 0.5, t = kPoint[0];
    auto cosmo = prolong(FieldConfiguration::flrw(hubble), kPoint);
    double a = std::exp(hubble * t);
    CHECK(evaluate(christoffel(0, 1, 1), cosmo) == Approx(a * a * hubble));
    CHECK(evaluate(christoffel(1, 0, 1), cosmo) == Approx(hubble));
    CHECK(evaluate(ricci_scalar(), cosmo) == Approx(12 * hubble * hubble));
}

TEST_CASE("Schwarzschild is Ricci flat") {
    auto jp = prolong(FieldConfiguration::schwarzschild(0.2), Point4{0.0, 3.0, 1.2, 0.5});
    CHECK(evaluate(ricci_scalar(), jp) == Approx(0.0).margin(1e-12));
    for (int a = 0; a < 4; ++a) CHECK(evaluate(ricci_tensor(a, a), jp) == Approx(0.0).margin(1e-12));
}

TEST_CASE("kinetic term and box on Minkowski") {
    Point4 k{1.0, 0.0, 0.0, 0.0};
    auto jp = prolong(FieldConfiguration::minkowski_wave(k, 1.0), Point4{0.0, 0.0, 0.0, 0.0});
    // phi = sin(t), so phi_t = 1 and X = -1/2 g^{tt} = 1/2.
    CHECK(evaluate(kinetic_x(), jp) == Approx(0.5));
    auto jp2 = prolong(FieldConfiguration::minkowski_wave(k, 1.0), Point4{0.8, 0.0, 0.0, 0.0});
    CHECK(evaluate(box_phi(), jp2) == Approx(std::sin(0.8)));
    CHECK(evaluate(box_phi_partial(), jp2) == Approx(std::sin(0.8)));
}

TEST_CASE("symbolic Lagrangian agrees with the component oracle") {
    auto spec = LagrangianSpec::parse("phi*X^2 - 1/3*phi^2", "sin(phi) + X");
    Expr cov = build_lagrangian(spec, Chart::Covariant);
    Expr par = build_lagrangian(spec, Chart::Partial);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto cfg = FieldConfiguration::random_taylor(seed);
        auto jp = prolong(cfg, Point4{0.1, -0.2, 0.05, 0.15});
        double reference = oracle::lagrangian(oracle::jets_from_point(jp), spec);
        CHECK(evaluate(cov, jp, &spec) == Approx(reference).epsilon(1e-11));
        CHECK(evaluate(par, jp, &spec) == Approx(reference).epsilon(1e-11));
    }
}

TEST_CASE("forward map matches nested covariant derivatives") {
    auto jp = prolong(FieldConfiguration::random_taylor(7), Point4{0.2, 0.1, -0.1, 0.3});
    auto j = oracle::jets_from_point(jp);
    for (const auto& d : multisets(3)) {
        double expected = oracle::nested_third_derivative(j, d[0], d[1], d[2]);
        CHECK(jp.get(JetSymbol::phi_cov(d)) == Approx(expected).epsilon(1e-11).margin(1e-12));
    }
}

TEST_CASE("chart maps are mutually inverse") {
    std::mt19937_64 rng(11);
    auto jp = random_jet_point(rng);
    for (int order : {2, 3})
        for (const auto& d : multisets(static_cast<std::size_t>(order))) {
            Expr forward = to_covariant(covariant_jet_in_partial(d));
            Expr backward = to_partial(partial_jet_in_covariant(d));
            CHECK(evaluate(forward, jp) == Approx(jp.get(JetSymbol::phi_cov(d))).epsilon(1e-11));
            CHECK(evaluate(backward, jp) == Approx(jp.get(JetSymbol::phi(d))).epsilon(1e-11));
            CHECK(evaluate(covariant_jet_in_partial(d), jp) == Approx(jp.get(JetSymbol::phi_cov(d))).epsilon(1e-11));
        }
}

TEST_CASE("finite-difference prolongation converges to the analytic jets") {
    auto cfg = FieldConfiguration::random_taylor(5);
    ProlongOptions fd;
    fd.mode = Prolongation::FiniteDifference;
    fd.order = 2;
    ProlongOptions an;
    an.order = 2;
    auto a = prolong(cfg, kPoint, an);
    auto b = prolong(cfg, kPoint, fd);
    for (const auto& s : metric_coordinates(2)) CHECK(b.get(s) == Approx(a.get(s)).epsilon(1e-6).margin(1e-7));
}

TEST_CASE("Einstein tensor oracle is symmetric and vanishes for Schwarzschild") {
    auto jp = prolong(FieldConfiguration::schwarzschild(0.3), Point4{0.0, 2.5, 0.9, 0.2});
    auto e = oracle::einstein_upper(oracle::jets_from_point(jp));
    for (auto& row : e)
        for (double v : row) CHECK(v == Approx(0.0).margin(1e-11));
    auto jq = prolong(FieldConfiguration::random_taylor(3), kPoint);
    auto f = oracle::einstein_upper(oracle::jets_from_point(jq));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(f[a][b] == Approx(f[b][a]).epsilon(1e-12));
}

TEST_CASE("variational oracle: GR part reproduces the Einstein tensor") {
    auto spec = LagrangianSpec::parse("0", "0");
    auto cfg = FieldConfiguration::random_taylor(9, 0.2);
    Point4 x{0.05, 0.1, -0.05, 0.0};
    auto e = oracle::variational(spec, cfg, x);
    auto jp = prolong(cfg, x);
    auto j = oracle::jets_from_point(jp);
    auto ein = oracle::einstein_upper(j);
    double sqrtg = jp.get(JetSymbol::sqrt_det());
    double dphi[4];
    for (int m = 0; m < 4; ++m) dphi[m] = j.dphi[m];
    auto c = oracle::curvature(j);
    // Variation of kappa sqrt(-g)(R + X) along ordered g_ab: -n(ab) sqrt(-g)(G^{ab} - T^{ab}/2).
    double x_kin = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) x_kin -= 0.5 * c.ginv[a][b] * dphi[a] * dphi[b];
    int k = 0;
    for (auto [a, b] : ordered_pairs()) {
        double ua = 0, ub = 0;
        for (int m = 0; m < 4; ++m) {
            ua += c.ginv[a][m] * dphi[m];
            ub += c.ginv[b][m] * dphi[m];
        }
        double stress = 0.5 * ua * ub + 0.5 * x_kin * c.ginv[a][b];
        double expected = -n_factor(a, b) * sqrtg * (ein[a][b] - stress);
        CHECK(e[static_cast<std::size_t>(k)] == Approx(expected).epsilon(1e-9).margin(1e-10));
        ++k;
    }
}

TEST_CASE("finite-difference variational oracle tracks the analytic one") {
    auto spec = LagrangianSpec::parse("X^2", "phi");
    auto cfg = FieldConfiguration::random_taylor(4, 0.2);
    Point4 x{0.0, 0.1, 0.0, -0.1};
    auto a = oracle::variational(spec, cfg, x);
    oracle::VariationalOptions opt;
    opt.mode = oracle::Mode::FiniteDifference;
    auto b = oracle::variational(spec, cfg, x, opt);
    double scale = 1.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) / scale < 1e-4);
}
