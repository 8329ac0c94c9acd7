#include "horn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "horn/hamiltonian.hpp"
#include "horn/ladder.hpp"
#include "horn/oracle.hpp"

namespace horn {

namespace {

struct Gap {
    double value = 0.0;
    void relative(const std::vector<double>& got, const std::vector<double>& want) {
        double scale = 1.0, gap = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            scale = std::max(scale, std::abs(want[i]));
            gap = std::max(gap, std::abs(got[i] - want[i]));
        }
        value = std::max(value, gap / scale);
    }
    void absolute(double v) { value = std::max(value, std::abs(v)); }
};

std::vector<double> run_el(const EulerLagrange& el, const LagrangianSpec& spec, const JetPoint<double>& jp) {
    std::vector<Expr> roots(el.metric.begin(), el.metric.end());
    roots.push_back(el.scalar);
    return Program(roots, &spec).run(jp);
}

CheckResult make(std::string name, std::string detail, double tol, int points) {
    CheckResult r;
    r.name = std::move(name);
    r.detail = std::move(detail);
    r.tolerance = tol;
    r.points = points;
    return r;
}

// Hamilton residual rows against -EL on the field rows and zero elsewhere.
double hamilton_gap(const HamiltonResidual& residual, const std::vector<double>& el, const JetPoint<double>& jets) {
    auto r = residual(jets);
    double scale = 1.0, gap = 0.0;
    for (double e : el) scale = std::max(scale, std::abs(e));
    for (std::size_t i = 0; i < r.size(); ++i) gap = std::max(gap, std::abs(i < el.size() ? r[i] + el[i] : r[i]));
    return gap / scale;
}

bool identity_family(const std::string& family) { return family != "divergence_pg1" && family != "divergence_pphi1"; }

}  // namespace

Point4 base_point(const FieldConfiguration& cfg) {
    if (cfg.name.rfind("schwarzschild", 0) == 0) return {0.0, 3.0, 1.0, 0.4};
    return {0.05, -0.1, 0.1, 0.02};
}

std::vector<Point4> sample_points(const FieldConfiguration& cfg, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    const Point4 base = base_point(cfg);
    std::vector<Point4> out;
    for (int i = 0; i < n; ++i) {
        Point4 x = base;
        for (double& c : x) c += u(rng);
        out.push_back(x);
    }
    return out;
}

std::vector<CheckResult> verify_configuration(const LagrangianSpec& spec, const FieldConfiguration& cfg,
                                              const VerifyOptions& opt) {
    const auto xs = sample_points(cfg, opt.points, opt.seed);
    const double tol = opt.tolerance;
    const auto mech = mechanical_euler_lagrange(spec);
    const auto closed = euler_lagrange_cubic(spec);
    const auto fl = restricted_legendre(spec, Chart::Partial);
    const Program legendre(fl.values, &spec);
    const auto sections = section_equations(spec);

    std::vector<CheckResult> out;
    CheckResult el_oracle = make("euler_lagrange_oracle", "mechanical W1 vs nested-derivative variational oracle", tol, opt.points);
    CheckResult el_closed = make("euler_lagrange_closed_form", "mechanical W1 vs curvature form of the field equations", tol, opt.points);
    CheckResult momenta = make("legendre_oracle", "partial-chart Legendre values vs dual-number oracle", tol, opt.points);
    CheckResult ident = make("section_identities", "holonomy, Legendre and second-divergence rows along the section", tol, opt.points);
    Gap g_oracle, g_closed, g_momenta, g_ident;
    std::vector<std::vector<double>> el_values;
    std::vector<JetPoint<double>> jets;
    for (const Point4& x : xs) {
        auto jp = prolong(cfg, x);
        auto m = run_el(mech, spec, jp);
        auto o = oracle::variational(spec, cfg, x);
        g_oracle.relative(m, std::vector<double>(o.begin(), o.end()));
        g_closed.relative(m, run_el(closed, spec, jp));
        g_momenta.relative(legendre.run(jp), oracle::momenta(spec, cfg, x));
        auto res = section_residuals(sections, spec, cfg, x);
        for (std::size_t i = 0; i < sections.size(); ++i)
            if (identity_family(sections[i].family)) g_ident.absolute(res[i]);
        el_values.push_back(std::move(m));
        jets.push_back(std::move(jp));
    }
    el_oracle.max_residual = g_oracle.value;
    el_closed.max_residual = g_closed.value;
    momenta.max_residual = g_momenta.value;
    ident.max_residual = g_ident.value;
    out.insert(out.end(), {el_oracle, el_closed, momenta, ident});

    if (!opt.hamilton) return out;
    CheckResult general = make("hamilton_general", "Hamilton equations pulled back along the section equal -W1", tol, opt.points);
    {
        const auto sys = hamiltonian_general(spec);
        const HamiltonResidual residual(sys, spec);
        Gap g;
        for (std::size_t k = 0; k < jets.size(); ++k) g.absolute(hamilton_gap(residual, el_values[k], jets[k]));
        general.max_residual = g.value;
    }
    out.push_back(general);
    CheckResult particular = make("hamilton_particular", "inverted-velocity Hamilton equations along the section", tol, opt.points);
    try {
        const auto sys = hamiltonian_particular(spec);
        const HamiltonResidual residual(sys, spec);
        Gap g;
        for (std::size_t k = 0; k < jets.size(); ++k) g.absolute(hamilton_gap(residual, el_values[k], jets[k]));
        particular.max_residual = g.value;
    } catch (const InapplicableCase& e) {
        particular.skipped = true;
        particular.detail = e.what();
    }
    out.push_back(particular);
    return out;
}

std::vector<BlockAgreement> check_jacobian_blocks(int points, std::uint64_t seed, double step, double study_step) {
    std::mt19937_64 rng(seed);
    std::vector<JetPoint<double>> pts;
    for (int i = 0; i < points; ++i) pts.push_back(random_jet_point(rng, 0.5, 3));

    std::vector<BlockAgreement> out;
    for (Block b : all_blocks()) {
        const auto targets = block_targets(b);
        const auto sources = block_sources(b);
        std::vector<Expr> entries, forward;
        for (const auto& t : targets) {
            forward.push_back(covariant_jet_in_partial(t.derivs()));
            for (const auto& s : sources) entries.push_back(jacobian_block(b, t, s));
        }
        const Program analytic(entries), map(forward);

        auto central = [&](const JetPoint<double>& jp, const JetSymbol& s, double h) {
            auto shifted = [&](double delta) {
                JetPoint<double> q = jp;
                q.set(s, jp.get(s) + delta);
                if (s.kind == SymKind::Metric && s.order() == 0) q.complete();
                return map.run(q);
            };
            auto plus = shifted(h), minus = shifted(-h);
            for (std::size_t i = 0; i < plus.size(); ++i) plus[i] = (plus[i] - minus[i]) / (2 * h);
            return plus;
        };

        BlockAgreement agreement;
        agreement.block = b;
        double coarse = 0.0, fine = 0.0;
        for (const auto& jp : pts) {
            const auto exact = analytic.run(jp);
            for (std::size_t j = 0; j < sources.size(); ++j) {
                const auto d = central(jp, sources[j], step);
                const auto dc = central(jp, sources[j], study_step);
                const auto df = central(jp, sources[j], study_step / 2);
                for (std::size_t i = 0; i < targets.size(); ++i) {
                    const double want = exact[i * sources.size() + j];
                    const double scale = std::max(1.0, std::abs(want));
                    agreement.max_error = std::max(agreement.max_error, std::abs(d[i] - want) / scale);
                    coarse = std::max(coarse, std::abs(dc[i] - want));
                    fine = std::max(fine, std::abs(df[i] - want));
                }
            }
        }
        // Blocks of a map that is quadratic in the source are differenced exactly.
        agreement.convergence_order =
            coarse < 1e-10 ? std::numeric_limits<double>::infinity() : std::log2(coarse / std::max(fine, 1e-300));
        out.push_back(agreement);
    }
    return out;
}

}  // namespace horn
