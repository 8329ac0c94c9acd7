#pragma once

// Curvature building blocks over concrete component indices. Results are memoized in the
// expression context, so repeated calls return the identical node.

#include "horn/expr.hpp"

namespace horn {

/// Gamma^up_{a b} = 1/2 g^{up r} (g_{b r,a} + g_{r a,b} - g_{a b,r}).
Expr christoffel(int up, int a, int b);
/// Ricci tensor with the convention R_{ab} = D_c Gamma^c_{ab} - D_a Gamma^c_{cb} + Gamma^c_{ab} Gamma^d_{dc} - Gamma^c_{db} Gamma^d_{ac}.
Expr ricci_tensor(int a, int b);
Expr ricci_scalar();
/// Box of the scalar in the covariant chart: g^{mn} phi_{;mn}.
Expr box_phi();
/// The same operator written with partial jets: g^{mn}(phi_{,mn} - phi_{,c} Gamma^c_{mn}).
Expr box_phi_partial();

}  // namespace horn
