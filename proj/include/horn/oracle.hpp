#pragma once

// Independent numeric reference implementations. Nothing here goes through the symbolic
// engine: curvature is assembled from plain component arrays, and variational derivatives
// come either from nested dual numbers or from nested finite differences.

#include <array>

#include "horn/fields.hpp"
#include "horn/lagrangian.hpp"

namespace horn::oracle {

template <class T>
struct FieldJets {
    T g[4][4]{};
    T dg[4][4][4]{};        // dg[a][b][c] = d_c g_ab
    T ddg[4][4][4][4]{};    // ddg[a][b][c][d] = d_c d_d g_ab
    T phi{};
    T dphi[4]{};
    T ddphi[4][4]{};
    T dddphi[4][4][4]{};
};

template <class T>
struct Curvature {
    T ginv[4][4];
    T det;
    T chr[4][4][4];         // chr[a][b][c] = Gamma^a_{bc}
    T dchr[4][4][4][4];     // dchr[a][b][c][d] = d_d Gamma^a_{bc}
    T ricci[4][4];
    T scalar;
};

template <class T>
Curvature<T> curvature(const FieldJets<T>& j) {
    Curvature<T> c;
    JetPoint<T>::invert4(j.g, c.ginv, c.det);
    T dginv[4][4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int e = 0; e < 4; ++e) {
                T s(0.0);
                for (int p = 0; p < 4; ++p)
                    for (int q = 0; q < 4; ++q) s = s - c.ginv[a][p] * j.dg[p][q][e] * c.ginv[q][b];
                dginv[a][b][e] = s;
            }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc) {
                T s(0.0);
                for (int d = 0; d < 4; ++d) s = s + c.ginv[a][d] * (j.dg[d][cc][b] + j.dg[d][b][cc] - j.dg[b][cc][d]);
                c.chr[a][b][cc] = T(0.5) * s;
                for (int e = 0; e < 4; ++e) {
                    T t(0.0);
                    for (int d = 0; d < 4; ++d)
                        t = t + dginv[a][d][e] * (j.dg[d][cc][b] + j.dg[d][b][cc] - j.dg[b][cc][d]) +
                            c.ginv[a][d] * (j.ddg[d][cc][b][e] + j.ddg[d][b][cc][e] - j.ddg[b][cc][d][e]);
                    c.dchr[a][b][cc][e] = T(0.5) * t;
                }
            }
    c.scalar = T(0.0);
    for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc) {
            T s(0.0);
            for (int a = 0; a < 4; ++a) {
                s = s + c.dchr[a][b][cc][a] - c.dchr[a][a][cc][b];
                for (int d = 0; d < 4; ++d) s = s + c.chr[a][a][d] * c.chr[d][b][cc] - c.chr[a][b][d] * c.chr[d][a][cc];
            }
            c.ricci[b][cc] = s;
            c.scalar = c.scalar + c.ginv[b][cc] * s;
        }
    return c;
}

/// kappa sqrt(-g)(R + X + G2 + G3 box phi), all from component arrays.
template <class T>
T lagrangian(const FieldJets<T>& j, const LagrangianSpec& spec) {
    using std::sqrt;
    Curvature<T> c = curvature(j);
    T x(0.0), box(0.0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            x = x - T(0.5) * c.ginv[a][b] * j.dphi[a] * j.dphi[b];
            T hess = j.ddphi[a][b];
            for (int k = 0; k < 4; ++k) hess = hess - c.chr[k][a][b] * j.dphi[k];
            box = box + c.ginv[a][b] * hess;
        }
    std::vector<T> vars{j.phi, x};
    T g2 = dsl::eval<T>(spec.g2, vars);
    T g3 = dsl::eval<T>(spec.g3, vars);
    return T(spec.kappa.to_double()) * sqrt(T(0.0) - c.det) * (c.scalar + x + g2 + g3 * box);
}

/// Reads plain arrays out of a jet point (partial chart).
FieldJets<double> jets_from_point(const JetPoint<double>& jp);

/// Einstein tensor with raised indices, G^{ab} = R^{ab} - R g^{ab} / 2.
std::array<std::array<double, 4>, 4> einstein_upper(const FieldJets<double>& j);

/// Third covariant derivative of the scalar, nabla_l nabla_n nabla_m phi, from component arrays.
double nested_third_derivative(const FieldJets<double>& j, int m, int n, int l);

enum class Mode { Analytic, FiniteDifference };

struct VariationalOptions {
    Mode mode = Mode::Analytic;
    double jet_step = 1e-2;     // finite-difference step for field jets
    double outer_step = 1e-2;   // finite-difference step for the total derivatives
    double inner_step = 1e-3;   // finite-difference step for derivatives with respect to jet coordinates
};

/// Euler-Lagrange expressions dL/du - D_m dL/du_m + sum_{m<=n} D_m D_n dL/du_{mn}
/// for u the ten ordered metric components followed by phi.
std::array<double, 11> variational(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x,
                                   const VariationalOptions& opt = {});

/// Momenta of the partial chart in the order of momentum_coordinates(): dL/d(second jets) and
/// dL/d(first jets) - sum_n D_n dL/du_{mn} / n(mn), from nested dual numbers on the configuration.
std::vector<double> momenta(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x);

}  // namespace horn::oracle
