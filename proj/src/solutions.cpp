#include "horn/solutions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "horn/ladder.hpp"

namespace horn {

FieldConfiguration flrw_polynomial(double a1, double a2, double phi0, double phi1, double phi2) {
    std::array<std::string, 10> metric;
    for (auto [a, b] : ordered_pairs()) metric[static_cast<std::size_t>(pair_index(a, b))] = a != b ? "0" : (a == 0 ? "-1" : "(1 + a1*t + a2*t^2/2)^2");
    return FieldConfiguration::from_closed_forms("flrw_polynomial", metric, "p0 + p1*t + p2*t^2/2",
                                                 {{"a1", a1}, {"a2", a2}, {"p0", phi0}, {"p1", phi1}, {"p2", phi2}});
}

FlrwSolution solve_flrw(const LagrangianSpec& spec, double phi0, double phi1, double hubble_guess) {
    const EulerLagrange el = mechanical_euler_lagrange(spec);
    const Program equations({el.metric[static_cast<std::size_t>(pair_index(0, 0))],
                             el.metric[static_cast<std::size_t>(pair_index(1, 1))], el.scalar},
                            &spec);
    auto residual = [&](const Eigen::Vector3d& u) {
        JetPoint<double> jp = prolong(flrw_polynomial(u[0], u[1], phi0, phi1, u[2]), {0, 0, 0, 0}, ProlongOptions{Prolongation::Analytic, 1e-2, true, 2});
        auto r = equations.run(jp);
        return Eigen::Vector3d(r[0], r[1], r[2]);
    };
    Eigen::Vector3d u(hubble_guess, 0.0, 0.0);
    FlrwSolution out;
    for (int it = 0; it < 60; ++it) {
        Eigen::Vector3d r = residual(u);
        out.iterations = it;
        if (r.cwiseAbs().maxCoeff() < 1e-13) break;
        Eigen::Matrix3d jac;
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(u[k]));
            Eigen::Vector3d up = u, um = u;
            up[k] += h;
            um[k] -= h;
            jac.col(k) = (residual(up) - residual(um)) / (2 * h);
        }
        Eigen::Vector3d step = jac.fullPivLu().solve(r);
        double damping = 1.0;
        while (damping > 1e-4 && residual(u - damping * step).cwiseAbs().maxCoeff() > r.cwiseAbs().maxCoeff()) damping /= 2;
        u -= damping * step;
    }
    out.config = flrw_polynomial(u[0], u[1], phi0, phi1, u[2]);
    out.hubble = u[0];
    out.acceleration = u[1];
    out.scalar_acceleration = u[2];
    out.residual = residual(u).cwiseAbs().maxCoeff();
    if (!(out.residual < 1e-10)) throw std::runtime_error("FLRW solve did not converge (residual " + std::to_string(out.residual) + ")");
    return out;
}

}  // namespace horn
