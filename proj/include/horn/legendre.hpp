#pragma once

#include <vector>

#include <Eigen/Dense>

#include "horn/lagrangian.hpp"
#include "horn/program.hpp"

namespace horn {

/// Momentum coordinates of the restricted bundle in a fixed order:
/// p_g^{ab,mn} (100), p_phi^{,mn} (10), p_g^{ab,m} (40), p_phi^{,m} (4).
std::vector<JetSymbol> momentum_coordinates();

struct LegendreMap {
    Chart chart = Chart::Covariant;
    std::vector<JetSymbol> momenta;  // same order as momentum_coordinates()
    std::vector<Expr> values;
    Expr extended = nullptr;         // value of p; set by extended_legendre only

    Expr value(const JetSymbol& p) const;
    /// Substitution replacing every momentum symbol by its Legendre value.
    Substitution as_substitution() const;
};

/// Momentum tables derived mechanically from the Lagrangian in the given chart.
LegendreMap restricted_legendre(const LagrangianSpec& spec, Chart chart = Chart::Covariant);
/// Adds p = L - (all momentum pairings).
LegendreMap extended_legendre(const LagrangianSpec& spec, Chart chart = Chart::Covariant);

/// Coordinates of J^3 in the covariant chart (389 of them), the columns of the Legendre differential.
std::vector<JetSymbol> covariant_jet_coordinates();
/// The directions the Legendre differential must annihilate: g_{ab,mn}, g_{ab,mnl} and phi_{;mnl}.
std::vector<JetSymbol> gauge_directions();

struct RankResult {
    int rank = 0;
    std::vector<double> singular_values;  // descending
    double kernel_max = 0.0;              // largest entry of the gauge-direction columns
};

/// Jacobian of (x, g, phi, momenta[, p]) with respect to the covariant-chart coordinates of J^3.
class LegendreJacobian {
public:
    explicit LegendreJacobian(const LagrangianSpec& spec, bool extended = false);

    /// Dense Jacobian at a point; rows are x (4), g (10), phi (1), the momenta, then p if extended.
    Eigen::MatrixXd matrix(const JetPoint<double>& jp) const;
    const std::vector<JetSymbol>& columns() const { return columns_; }
    /// Numeric rank with singular values above threshold * sigma_max.
    RankResult rank_at(const JetPoint<double>& jp, double threshold = 1e-8) const;

private:
    LagrangianSpec spec_;
    Program momenta_;
    std::vector<JetSymbol> columns_;
    std::size_t outputs_ = 0;
};

/// Convenience wrapper around LegendreJacobian::rank_at.
int legendre_rank_numeric(const LagrangianSpec& spec, const JetPoint<double>& jp, double threshold = 1e-8);

/// Field index of the affine decomposition: the ten ordered metric components, then phi.
struct FieldIndex {
    bool scalar = false;
    int a = 0, b = 0;
    JetSymbol jet(const std::vector<int>& d) const;
    std::string str() const;
};
std::vector<FieldIndex> field_indices();

struct ObstructionEntry {
    FieldIndex alpha, beta;
    int a = 0, h = 0, i = 0;
    Expr residual;
};

struct ProjectabilityReport {
    bool projects = false;
    bool affine = false;
    std::vector<ObstructionEntry> obstruction;  // only the entries that are not identically zero
    Expr lagrangian0 = nullptr;                 // L minus the second-jet part (partial chart)
    std::vector<std::pair<JetSymbol, Expr>> second_order_coefficients;  // L_A^{ij} (symmetric normalization)
};

/// Affine decomposition and affineness residuals of the bound Lagrangian in the partial chart.
ProjectabilityReport projectability(const LagrangianSpec& spec);

/// The closed-form residual sqrt(-g) phi_{,d} dG3/dX (-2 g^{mn} g^{cd} + g^{cn} g^{md} + g^{cm} g^{nd}).
Expr obstruction_display(int m, int n, int c);

}  // namespace horn
