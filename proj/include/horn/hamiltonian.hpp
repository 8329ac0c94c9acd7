#pragma once

// Covariant Hamiltonian formalism on the Legendre image.
//
// Particular case (G3 independent of X and G2 affine in X): the first-order velocities are
// solved in terms of positions and multimomenta, the Hamiltonian is written in
// (x, g, phi, p_g, p_phi) only, and the Hamilton equations are obtained by contracting a
// semiholonomic multivector field with the Hamilton-Cartan form
//
//   dH ^ d4x - dp_g ^ dg ^ d3x_nu - dp_phi ^ dphi ^ d3x_nu - dL_g ^ dV ^ d3x_nu - dL_phi ^ dU ^ d3x_nu.
//
// General case: velocities stay as coordinates next to the momenta and the first metric
// momentum is a constraint whose tangency condition is returned alongside the equations.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "horn/ladder.hpp"

namespace horn {

struct InapplicableCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularInversion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Guard {
    std::string name;
    Expr expr;
};

struct VelocityInversion {
    std::array<Expr, 4> scalar{};   // U_nu = phi_{;nu}(g, phi, p_phi)
    std::array<Expr, 40> metric{};  // V_{ab,mu}(g, phi, p_g, p_phi), index 4 * pair + mu
    Expr denominator = nullptr;     // 1 + dG2/dX + dG3/dphi
    std::vector<Guard> structural;  // identically zero for the case to apply
    std::vector<Guard> pointwise;   // nonzero at every evaluation point

    /// Replaces g_{ab,mu} by V and phi_{,mu} by U.
    Substitution substitution() const;
};

/// Solves the first momenta for the velocities. Throws InapplicableCase when G3 depends on X
/// or G2 is not affine in X.
VelocityInversion invert_velocities(const LagrangianSpec& spec);

/// Velocities at a point holding g, phi and the first momenta: the four U_nu, then the forty V.
/// Throws SingularInversion where |1 + dG2/dX + dG3/dphi| <= tolerance.
std::vector<double> evaluate_inversion(const VelocityInversion& inv, const JetPoint<double>& jp,
                                       double tolerance = 1e-12);

/// The printed inverse relation for V, read with the momentum summed over ordered pairs.
/// Kept for comparison with the derived table.
Expr velocity_display(const LagrangianSpec& spec, int a, int b, int mu);

/// Coefficient of the metric velocities in the first metric momentum:
/// p_g^{ab,mu} = -n(ab)/2 kappa sqrt(-g) N^{ab mu}, N = G3 phi_{;c} S^{c ab mu} - g_{rl,s} M^{rl s ab mu}.
Expr velocity_tensor(int r, int l, int s, int a, int b, int mu);
/// The same tensor as printed (nine terms); differs from the derived one.
Expr velocity_tensor_display(int r, int l, int s, int a, int b, int mu);
Expr momentum_source(const LagrangianSpec& spec, int a, int b, int mu);

enum class HamiltonCase { Particular, General };
const char* case_name(HamiltonCase c);

/// dH/d(coordinate) = rhs, with rhs linear in the multivector coefficients.
struct HamiltonEquation {
    std::string family;
    std::string label;
    JetSymbol coordinate;
    Expr lhs = nullptr;
    Expr rhs = nullptr;
};

struct HamiltonEquations {
    HamiltonCase kind = HamiltonCase::Particular;
    std::vector<HamiltonEquation> equations;
    std::vector<Constraint> tangency;  // general case only
};

struct MomentumClass {
    std::string family;  // "p_g^{ab,mu}" or "p_phi^{,mu}"
    bool constraint = false;
    std::vector<JetSymbol> second_order_dependencies;
};

struct HamiltonianSystem {
    Expr hamiltonian = nullptr;
    HamiltonEquations eqs;
    std::vector<JetSymbol> coordinates;  // fibre coordinates the equations are written in
    std::vector<MomentumClass> classification;
    std::vector<std::string> notes;
};

HamiltonianSystem hamiltonian_particular(const LagrangianSpec& spec);
HamiltonianSystem hamiltonian_general(const LagrangianSpec& spec);

/// Evaluates lhs - rhs of every equation (then every tangency entry) along the section
/// generated by prolonged jets: momenta are the Legendre image, velocity coefficients are the
/// jets one order up and momentum coefficients are total derivatives of the Legendre values.
class HamiltonResidual {
public:
    HamiltonResidual(const HamiltonianSystem& sys, const LagrangianSpec& spec);

    /// `jets` must carry partial and covariant jets through order 3.
    std::vector<double> operator()(const JetPoint<double>& jets) const;
    /// The point with momenta and multivector coefficients filled in.
    JetPoint<double> section_point(const JetPoint<double>& jets) const;
    std::size_t size() const { return residual_.outputs(); }

private:
    Program legendre_;
    std::vector<JetSymbol> momenta_;
    Program momentum_rates_;
    std::vector<JetSymbol> rate_symbols_;
    Program residual_;
};

}  // namespace horn
