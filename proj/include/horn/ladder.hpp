#pragma once

// Constraint algorithm of the unified formalism for the cubic Lagrangian: contraction
// equations of a semiholonomic multivector field, the stages Wc, WL, W1 and Wf, the
// Euler-Lagrange expressions and the field equations for sections.

#include <array>
#include <string>
#include <vector>

#include "horn/fields.hpp"
#include "horn/legendre.hpp"

namespace horn {

struct Constraint {
    std::string family;
    std::string label;
    Expr expr;
};

struct ConstraintStage {
    std::string name;  // "Wc", "WL", "W1", "Wf"
    std::vector<Constraint> constraints;
    /// Multivector coefficients fixed by the tangency step that follows this stage.
    std::vector<std::pair<JetSymbol, Expr>> determined;
    std::vector<std::string> notes;
};

/// Coefficient symbols of the multivector ansatz along momentum directions.
JetSymbol metric_momentum1_coeff(int a, int b, int mu, int tau);
JetSymbol metric_momentum2_coeff(int a, int b, int mu, int nu, int tau);
JetSymbol scalar_momentum1_coeff(int mu, int tau);
JetSymbol scalar_momentum2_coeff(int mu, int nu, int tau);

/// The six contraction families (165 equations) in the covariant chart.
std::vector<Constraint> contraction_equations(const LagrangianSpec& spec);

struct LadderOptions {
    bool tangency = true;  // build Wf (44 total derivatives of W1)
};

/// Runs the constraint algorithm and returns Wc, WL, W1 and (optionally) Wf.
std::vector<ConstraintStage> run_ladder(const LagrangianSpec& spec, const LadderOptions& opt = {});

struct EulerLagrange {
    std::array<Expr, 10> metric;  // ordered pairs
    Expr scalar;
    std::vector<std::string> notes;
};

/// W1 derived mechanically: dL/dg - (chart correction) - D_mu p_g^{ab,mu}, dL/dphi - D_mu p_phi^{,mu},
/// with the Legendre values substituted and the third-order jets eliminated after proving their
/// coefficients vanish.
EulerLagrange mechanical_euler_lagrange(const LagrangianSpec& spec);

/// Closed-form cubic equations of motion written with curvature and covariant jets.
EulerLagrange euler_lagrange_cubic(const LagrangianSpec& spec);

/// One term of the left side of a section equation: weight * d(component along the section)/dx^direction,
/// or weight * component when direction is -1.
struct SectionTerm {
    Rational weight = 1;
    Expr component;
    int direction = -1;
};

struct SectionEquation {
    std::string family;
    std::string label;
    std::vector<SectionTerm> lhs;
    Expr rhs;
};

/// The ten families of field equations for sections.
std::vector<SectionEquation> section_equations(const LagrangianSpec& spec);

/// Residuals lhs - rhs along the section generated by a configuration: momenta are the Legendre
/// image of its jets and the x-derivatives on the left are taken by Richardson-extrapolated central
/// differences with the given base step.
std::vector<double> section_residuals(const std::vector<SectionEquation>& eqs, const LagrangianSpec& spec,
                                      const FieldConfiguration& cfg, const Point4& x, double step = 1e-2);

struct CodimensionReport {
    int ambient = 0;     // dim W_r
    int graph_rank = 0;  // numeric rank of the graph parameterization j -> (j, FL(j))
    int codimension = 0;
    int naive = 154;     // 100 + 10 + 40 + 4 graph equations
    int stated = 140;
};

CodimensionReport codimension(const LagrangianSpec& spec, const JetPoint<double>& jp, double threshold = 1e-8);

}  // namespace horn
