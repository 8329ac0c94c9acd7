#pragma once

// Numeric agreement checks between the symbolic derivations and the independent oracles,
// run on a field configuration at reproducible sample points.

#include <cstdint>
#include <string>
#include <vector>

#include "horn/chart.hpp"
#include "horn/fields.hpp"
#include "horn/lagrangian.hpp"

namespace horn {

struct CheckResult {
    std::string name;
    std::string detail;
    double max_residual = 0.0;  // relative to max(1, |reference|) where a reference exists
    double tolerance = 0.0;
    int points = 0;
    bool skipped = false;       // not applicable to this model
    bool passed() const { return skipped || max_residual <= tolerance; }
};

struct VerifyOptions {
    int points = 3;
    std::uint64_t seed = 1;
    double tolerance = 1e-6;
    bool hamilton = true;
};

/// A point inside the chart domain of a named configuration (outside the horizon for Schwarzschild).
Point4 base_point(const FieldConfiguration& cfg);
/// `n` points within 0.1 of the base point, drawn from `seed`.
std::vector<Point4> sample_points(const FieldConfiguration& cfg, int n, std::uint64_t seed);

/// Euler-Lagrange expressions against the variational oracle and the closed forms, Legendre
/// values against the dual-number oracle, section identities, and the Hamilton equations
/// pulled back along the section.
std::vector<CheckResult> verify_configuration(const LagrangianSpec& spec, const FieldConfiguration& cfg,
                                              const VerifyOptions& opt = {});

struct BlockAgreement {
    Block block{};
    double max_error = 0.0;          // analytic vs central differences at the base step
    double convergence_order = 0.0;  // log2 of the error ratio when the step is halved
};

/// Compares every Jacobian block with central differences of the forward map at random jet points.
std::vector<BlockAgreement> check_jacobian_blocks(int points, std::uint64_t seed, double step = 2e-4,
                                                  double study_step = 4e-2);

}  // namespace horn
