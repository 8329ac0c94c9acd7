#pragma once

// Change of coordinates replacing the scalar partial jets phi_{,mn}, phi_{,mnl} by the
// covariant jets phi_{;mn}, phi_{;mnl}. Metric jets, phi, phi_{,m} and all momenta are
// shared by both charts.
//
// Third covariant jets are stored by the sorted index multiset. The defining formula
// (the covariant derivative along the last index of phi_{;mn}) is evaluated at the sorted
// representative, which keeps the change of coordinates a bijection on the ordered jets.

#include <string>
#include <vector>

#include "horn/expr.hpp"

namespace horn {

/// phi_{;d} written in the partial chart (|d| = 2 or 3).
Expr covariant_jet_in_partial(const std::vector<int>& d);
/// phi_{,d} written in the covariant chart (|d| = 2 or 3).
Expr partial_jet_in_covariant(const std::vector<int>& d);

/// Rewrites partial scalar jets of order 2 and 3 into the covariant chart.
Expr to_covariant(Expr e);
/// Rewrites covariant scalar jets into the partial chart.
Expr to_partial(Expr e);

/// Total derivative rule for expressions written in the covariant chart.
const JetRule& covariant_rule();

/// Total derivative of an expression written in the covariant chart.
Expr total_cov(Expr e, int tau);

/// The eight Jacobian block families of the forward map.
enum class Block {
    HessianMetric,          // d phi_{;mn} / d g_{ab}
    HessianMetric1,         // d phi_{;mn} / d g_{ab,c}
    HessianGradient,        // d phi_{;mn} / d phi_{,c}
    ThirdGradient,          // d phi_{;mnl} / d phi_{,c}
    ThirdHessian,           // d phi_{;mnl} / d phi_{,cd}
    ThirdMetric,            // d phi_{;mnl} / d g_{ab}
    ThirdMetric1,           // d phi_{;mnl} / d g_{ab,c}
    ThirdMetric2,           // d phi_{;mnl} / d g_{ab,cd}
};
const char* block_name(Block b);
std::vector<Block> all_blocks();
/// Target covariant jets and source partial-chart coordinates of a block family.
std::vector<JetSymbol> block_targets(Block b);
std::vector<JetSymbol> block_sources(Block b);
/// One block entry, d target / d source, as an expression in the partial chart.
Expr jacobian_block(Block b, const JetSymbol& target, const JetSymbol& source);

/// A partial-chart basis vector written in the covariant chart.
struct PushedVector {
    JetSymbol source;
    std::vector<std::pair<JetSymbol, Expr>> components;  // (covariant-chart coordinate, coefficient)
};
/// Chain-rule expansion of d/d(source) onto covariant-chart coordinates.
PushedVector pushforward_basis(const JetSymbol& source);
/// Applies a pushed vector to an expression written in the covariant chart.
Expr apply_vector(const PushedVector& v, Expr e);

}  // namespace horn
