#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "horn/ladder.hpp"
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

std::vector<double> values(const EulerLagrange& el, const JetPoint<double>& jp, const LagrangianSpec& spec) {
    std::vector<Expr> roots(el.metric.begin(), el.metric.end());
    roots.push_back(el.scalar);
    return Program(roots, &spec).run(jp);
}

}  // namespace

TEST_CASE("constraint census and order bounds") {
    auto spec = LagrangianSpec::parse("X^2", "phi*X");
    auto stages = run_ladder(spec);
    REQUIRE(stages.size() == 4);
    CHECK(stages[0].name == "Wc");
    CHECK(stages[0].constraints.size() == 110);
    CHECK(stages[1].constraints.size() == 44);
    CHECK(stages[2].constraints.size() == 11);
    CHECK(stages[3].constraints.size() == 44);
    CHECK(stages[0].determined.size() == 440);
    CHECK(stages[1].determined.size() == 176);
    for (const auto& c : stages[2].constraints) {
        CHECK_FALSE(contains_momentum(c.expr));
        CHECK(max_metric_order(c.expr) <= 2);
        CHECK(max_scalar_order(c.expr) <= 2);
    }
    for (const auto& c : stages[3].constraints) {
        CHECK_FALSE(contains_momentum(c.expr));
        CHECK(max_metric_order(c.expr) <= 3);
        CHECK(max_scalar_order(c.expr) <= 3);
    }
    CHECK(stages[2].notes.size() == 1);  // no cancellation failures recorded
}

TEST_CASE("contraction equations have the expected families") {
    auto eqs = contraction_equations(LagrangianSpec::parse("X", "phi"));
    std::map<std::string, int> count;
    for (const auto& e : eqs) ++count[e.family];
    CHECK(count["UniVec1"] == 10);
    CHECK(count["UniVec2"] == 1);
    CHECK(count["UniVec3"] == 40);
    CHECK(count["UniVec4"] == 4);
    CHECK(count["UniVec5"] == 100);
    CHECK(count["UniVec6"] == 10);
}

TEST_CASE("contraction equations vanish on the flat vacuum with determined coefficients") {
    auto spec = LagrangianSpec::parse("X^2", "phi*X");
    auto stages = run_ladder(spec, {false});
    Substitution coeffs;
    for (const auto& st : stages)
        for (const auto& [s, v] : st.determined) coeffs.symbols[intern(s)] = v;
    auto jp = prolong(FieldConfiguration::minkowski(), {0.2, 0.1, 0.0, 0.3});
    fill_momenta(jp, restricted_legendre(spec), spec);
    for (const auto& c : contraction_equations(spec))
        CHECK(evaluate(substitute(c.expr, coeffs), jp, &spec) == Approx(0.0).margin(1e-13));
}

TEST_CASE("mechanical W1, closed forms and the variational oracle agree") {
    const std::vector<std::pair<const char*, const char*>> specs{{"0", "0"}, {"X", "0"}, {"0", "phi"}, {"X^2", "phi*X"}, {"X", "X"}};
    for (auto [g2, g3] : specs) {
        auto spec = LagrangianSpec::parse(g2, g3);
        auto mech = mechanical_euler_lagrange(spec);
        auto closed = euler_lagrange_cubic(spec);
        for (std::uint64_t seed = 1; seed <= 2; ++seed) {
            auto cfg = FieldConfiguration::random_taylor(seed * 31, 0.2);
            Point4 x{0.05, -0.1, 0.1, 0.02};
            auto jp = prolong(cfg, x);
            auto m = values(mech, jp, spec);
            auto c = values(closed, jp, spec);
            auto o = oracle::variational(spec, cfg, x);
            CHECK(relative_gap(m, c) < 1e-10);
            CHECK(relative_gap(m, std::vector<double>(o.begin(), o.end())) < 1e-8);
        }
    }
}

TEST_CASE("vacuum reduction to the Einstein tensor") {
    auto spec = LagrangianSpec::parse("0", "0");
    auto el = mechanical_euler_lagrange(spec);
    auto schw = prolong(FieldConfiguration::schwarzschild(0.25), {0.0, 3.0, 1.0, 0.4});
    for (double v : values(el, schw, spec)) CHECK(v == Approx(0.0).margin(1e-10));

    auto jp = prolong(FieldConfiguration::perturbed_flat(0.05), {0.1, 0.2, -0.1, 0.3});
    auto ein = oracle::einstein_upper(oracle::jets_from_point(jp));
    auto v = values(el, jp, spec);
    int k = 0;
    for (auto [a, b] : ordered_pairs())
        CHECK(v[static_cast<std::size_t>(k++)] ==
              Approx(-n_factor(a, b) * jp.get(JetSymbol::sqrt_det()) * ein[a][b]).epsilon(1e-9).margin(1e-12));
    CHECK(v[10] == Approx(0.0).margin(1e-14));

    auto flat = prolong(FieldConfiguration::minkowski(), {0.0, 0.0, 0.0, 0.0});
    for (double x : values(euler_lagrange_cubic(LagrangianSpec::parse("X^2", "phi*X")), flat, spec))
        CHECK(x == Approx(0.0).margin(1e-14));
}

TEST_CASE("section equations") {
    auto spec = LagrangianSpec::parse("X", "phi");
    auto eqs = section_equations(spec);
    std::map<std::string, int> count;
    for (const auto& e : eqs) ++count[e.family];
    CHECK(count.size() == 10);
    CHECK(count["holonomy1"] == 40);
    CHECK(count["holonomy2"] == 160);
    CHECK(count["legendre_pg2"] == 100);

    auto cfg = FieldConfiguration::flrw(0.4, 0.2, 0.3);
    auto res = section_residuals(eqs, spec, cfg, {0.3, 0.1, 0.2, -0.1});
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        const auto& fam = eqs[i].family;
        if (fam.rfind("holonomy", 0) == 0) CHECK(std::abs(res[i]) < 1e-10);
        if (fam.rfind("legendre", 0) == 0 || fam == "divergence_pg2" || fam == "divergence_pphi2")
            CHECK(std::abs(res[i]) < 1e-9);
    }
}

TEST_CASE("codimension bookkeeping") {
    std::mt19937_64 rng(77);
    auto jp = random_jet_point(rng);
    auto rep = codimension(LagrangianSpec::parse("X", "X"), jp);
    CHECK(rep.ambient == 543);
    CHECK(rep.codimension == rep.ambient - rep.graph_rank);
    CHECK(rep.graph_rank == 389);
    CHECK(rep.naive == 154);
    CHECK(rep.stated == 140);
}
