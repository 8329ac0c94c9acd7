#pragma once

#include <string>

#include "horn/dsl.hpp"
#include "horn/expr.hpp"

namespace horn {

enum class Chart { Partial, Covariant };
const char* chart_name(Chart c);

/// The model: G2(phi, X), G3(phi, X) and the overall coupling kappa (standing for 1/16 pi G).
struct LagrangianSpec {
    std::string g2_source = "0";
    std::string g3_source = "0";
    dsl::SExpr g2;
    dsl::SExpr g3;
    Rational kappa = 1;

    /// Parses both model functions; throws dsl::ParseError on malformed text.
    static LagrangianSpec parse(const std::string& g2, const std::string& g3, const Rational& kappa = 1);
    const dsl::SExpr& model(FnName f) const { return f == FnName::G2 ? g2 : g3; }
    /// d^{a+b} G / dphi^a dX^b as a scalar-function expression.
    dsl::SExpr model_derivative(const ScalarFn& f) const;
};

/// kappa sqrt(-g) (R + X + G2 + G3 box phi), with G2 and G3 kept as opaque model-function nodes.
Expr build_lagrangian(const LagrangianSpec& spec, Chart chart = Chart::Covariant);

/// Replaces every model-function node by its closed form in (phi, X).
Expr bind_model(Expr e, const LagrangianSpec& spec);

/// The unified Hamiltonian function on the restricted bundle (covariant chart).
Expr build_unified_hamiltonian(const LagrangianSpec& spec);

/// Symmetric-pair pairing sum of the unified Hamiltonian without the Lagrangian.
Expr momentum_pairing();

}  // namespace horn
