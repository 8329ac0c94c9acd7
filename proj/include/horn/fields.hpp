#pragma once

// Concrete field configurations (metric and scalar as closed forms in t, x, y, z) and
// their prolongation to jet points.

#include <array>
#include <map>
#include <memory>
#include <random>
#include <string>

#include "horn/dsl.hpp"
#include "horn/program.hpp"

namespace horn {

enum class Prolongation { Analytic, FiniteDifference };

struct ProlongOptions {
    Prolongation mode = Prolongation::Analytic;
    double step = 1e-2;       // finite-difference step
    bool richardson = true;   // one Richardson extrapolation level on every difference
    int order = 4;            // highest jet order filled
};

using Point4 = std::array<double, 4>;

class FieldConfiguration {
public:
    std::string name;
    std::array<dsl::SExpr, 10> metric;  // ordered pairs (0,0), (0,1), ..., (3,3)
    dsl::SExpr scalar;

    FieldConfiguration();

    static FieldConfiguration minkowski();
    /// Minkowski with phi = amplitude * sin(k . x).
    static FieldConfiguration minkowski_wave(const Point4& k, double amplitude = 1.0);
    /// Spatially flat FLRW with a = exp(H t) and phi = phi0 + phi1 t.
    static FieldConfiguration flrw(double hubble, double phi0 = 0.0, double phi1 = 0.0);
    /// Schwarzschild in (t, r, theta, varphi) coordinates mapped to (t, x, y, z).
    static FieldConfiguration schwarzschild(double mass);
    /// Minkowski plus a smooth perturbation of size eps in every metric component.
    static FieldConfiguration perturbed_flat(double eps);
    /// Quartic Taylor polynomial around the origin with random coefficients (reproducible from seed).
    static FieldConfiguration random_taylor(std::uint64_t seed, double scale = 0.3);
    /// Metric components (ordered pairs) and scalar given as coordinate expressions in t, x, y, z;
    /// `params` supplies named constants usable in the text.
    static FieldConfiguration from_closed_forms(const std::string& name, const std::array<std::string, 10>& metric,
                                                const std::string& scalar,
                                                const std::map<std::string, double>& params = {});
    /// Parses "minkowski", "minkowski_wave", "flrw(H)", "schwarzschild(M)", "perturbed_flat(eps)", "taylor(seed)".
    static FieldConfiguration named(const std::string& text);

    /// Derivative of a metric component (ordered pair index) or of the scalar (-1) along a multiset.
    dsl::SExpr derivative(int component, const std::vector<int>& d) const;
    double value(int component, const Point4& x) const;

private:
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

/// Index of an ordered pair in the metric component array.
int pair_index(int a, int b);

/// Jets of the configuration at x, including covariant scalar jets, inverse metric and sqrt(-g).
JetPoint<double> prolong(const FieldConfiguration& cfg, const Point4& x, const ProlongOptions& opt = {});

/// Random jet point: metric = eta + 0.1 (symmetric random), higher jets uniform in [-scale, scale].
JetPoint<double> random_jet_point(std::mt19937_64& rng, double scale = 0.5, int order = 4);

/// Compiled forward map of the covariant chart: outputs follow `covariant_targets(order)`.
const Program& covariant_forward_program(int order);
std::vector<JetSymbol> covariant_targets(int order);

/// Fills covariant scalar jets of the given orders from the partial jets already in the point.
template <class T>
void fill_covariant_jets(JetPoint<T>& jp, int max_order = 3) {
    for (int order = 2; order <= max_order; ++order) {
        auto vals = covariant_forward_program(order).run(jp);
        auto targets = covariant_targets(order);
        for (std::size_t i = 0; i < targets.size(); ++i) jp.set(targets[i], vals[i]);
    }
}

/// Sets every momentum coordinate (and p if present) to its Legendre value at the point.
struct LegendreMap;
void fill_momenta(JetPoint<double>& jp, const LegendreMap& fl, const LagrangianSpec& spec);

}  // namespace horn
