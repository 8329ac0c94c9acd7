#include "horn/oracle.hpp"

#include <map>

namespace horn::oracle {

FieldJets<double> jets_from_point(const JetPoint<double>& jp) {
    FieldJets<double> j;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            j.g[a][b] = jp.get(JetSymbol::metric(a, b));
            for (int c = 0; c < 4; ++c) {
                j.dg[a][b][c] = jp.get(JetSymbol::metric(a, b, {c}));
                for (int d = 0; d < 4; ++d) j.ddg[a][b][c][d] = jp.get(JetSymbol::metric(a, b, {c, d}));
            }
        }
    j.phi = jp.get(JetSymbol::phi());
    SymId third_probe = intern(JetSymbol::phi({0, 0, 0}));
    for (int a = 0; a < 4; ++a) {
        j.dphi[a] = jp.get(JetSymbol::phi({a}));
        for (int b = 0; b < 4; ++b) {
            j.ddphi[a][b] = jp.get(JetSymbol::phi({a, b}));
            if (jp.has(third_probe))
                for (int c = 0; c < 4; ++c) j.dddphi[a][b][c] = jp.get(JetSymbol::phi({a, b, c}));
        }
    }
    return j;
}

std::array<std::array<double, 4>, 4> einstein_upper(const FieldJets<double>& j) {
    Curvature<double> c = curvature(j);
    std::array<std::array<double, 4>, 4> out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double r = 0;
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) r += c.ginv[a][p] * c.ginv[b][q] * c.ricci[p][q];
            out[a][b] = r - 0.5 * c.scalar * c.ginv[a][b];
        }
    return out;
}

double nested_third_derivative(const FieldJets<double>& j, int m, int n, int l) {
    Curvature<double> c = curvature(j);
    auto hess = [&](int a, int b) {
        double h = j.ddphi[a][b];
        for (int k = 0; k < 4; ++k) h -= c.chr[k][a][b] * j.dphi[k];
        return h;
    };
    // d_l of the Hessian, then the two connection terms of the outer covariant derivative.
    double d = j.dddphi[m][n][l];
    for (int k = 0; k < 4; ++k) d -= c.dchr[k][m][n][l] * j.dphi[k] + c.chr[k][m][n] * j.ddphi[k][l];
    for (int k = 0; k < 4; ++k) d -= c.chr[k][l][m] * hess(k, n) + c.chr[k][l][n] * hess(m, k);
    return d;
}

namespace {

// Which jet entry a seed perturbs: field u (0..9 metric pairs, 10 scalar) at derivative multiset d (|d| <= 2).
template <class T>
void add_seed(FieldJets<T>& j, int field, const std::vector<int>& d, const T& eps) {
    int a = 0, b = 0;
    if (field < 10) {
        auto pairs = ordered_pairs();
        a = pairs[static_cast<std::size_t>(field)].first;
        b = pairs[static_cast<std::size_t>(field)].second;
    }
    auto bump = [&](T& slot) { slot = slot + eps; };
    if (d.empty()) {
        if (field == 10) return bump(j.phi);
        bump(j.g[a][b]);
        if (a != b) bump(j.g[b][a]);
    } else if (d.size() == 1) {
        if (field == 10) return bump(j.dphi[d[0]]);
        bump(j.dg[a][b][d[0]]);
        if (a != b) bump(j.dg[b][a][d[0]]);
    } else {
        int m = d[0], n = d[1];
        if (field == 10) {
            bump(j.ddphi[m][n]);
            if (m != n) bump(j.ddphi[n][m]);
            return;
        }
        auto both = [&](int p, int q) {
            bump(j.ddg[p][q][m][n]);
            if (m != n) bump(j.ddg[p][q][n][m]);
        };
        both(a, b);
        if (a != b) both(b, a);
    }
}

template <class T>
FieldJets<T> jets_at(const FieldConfiguration& cfg, const std::array<T, 4>& x) {
    std::vector<T> vars(x.begin(), x.end());
    FieldJets<T> j;
    for (auto [a, b] : ordered_pairs()) {
        int k = pair_index(a, b);
        T v = dsl::eval<T>(cfg.derivative(k, {}), vars);
        j.g[a][b] = j.g[b][a] = v;
        for (int c = 0; c < 4; ++c) {
            T dv = dsl::eval<T>(cfg.derivative(k, {c}), vars);
            j.dg[a][b][c] = j.dg[b][a][c] = dv;
            for (int d = c; d < 4; ++d) {
                T ddv = dsl::eval<T>(cfg.derivative(k, {c, d}), vars);
                j.ddg[a][b][c][d] = j.ddg[b][a][c][d] = j.ddg[a][b][d][c] = j.ddg[b][a][d][c] = ddv;
            }
        }
    }
    j.phi = dsl::eval<T>(cfg.derivative(-1, {}), vars);
    for (int c = 0; c < 4; ++c) {
        j.dphi[c] = dsl::eval<T>(cfg.derivative(-1, {c}), vars);
        for (int d = c; d < 4; ++d) j.ddphi[c][d] = j.ddphi[d][c] = dsl::eval<T>(cfg.derivative(-1, {c, d}), vars);
    }
    return j;
}

std::array<double, 11> variational_analytic(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x) {
    std::array<double, 11> out{};
    for (int u = 0; u < 11; ++u) {
        double e = 0;
        {
            std::array<D1, 4> xs;
            for (int i = 0; i < 4; ++i) xs[i] = D1(x[i]);
            FieldJets<D1> j = jets_at<D1>(cfg, xs);
            add_seed<D1>(j, u, {}, D1(0.0, 1.0));
            e += lagrangian(j, spec).d;
        }
        for (int m = 0; m < 4; ++m) {
            std::array<D2, 4> xs;
            for (int i = 0; i < 4; ++i) xs[i] = D2(D1(x[i]), D1(i == m ? 1.0 : 0.0));
            FieldJets<D2> j = jets_at<D2>(cfg, xs);
            add_seed<D2>(j, u, {m}, D2(D1(0.0, 1.0), D1(0.0)));
            e -= lagrangian(j, spec).d.d;
        }
        for (int m = 0; m < 4; ++m)
            for (int n = m; n < 4; ++n) {
                std::array<D3, 4> xs;
                for (int i = 0; i < 4; ++i)
                    xs[i] = D3(D2(D1(x[i]), D1(i == m ? 1.0 : 0.0)), D2(D1(i == n ? 1.0 : 0.0), D1(0.0)));
                FieldJets<D3> j = jets_at<D3>(cfg, xs);
                add_seed<D3>(j, u, {m, n}, D3(D2(D1(0.0, 1.0), D1(0.0)), D2(D1(0.0), D1(0.0))));
                e += lagrangian(j, spec).d.d.d;
            }
        out[static_cast<std::size_t>(u)] = e;
    }
    return out;
}

// Finite-difference mode: jets from differences of the closed forms, then differences of dL/d(jet).
class FiniteDifferenceOracle {
public:
    FiniteDifferenceOracle(const LagrangianSpec& spec, const FieldConfiguration& cfg, const VariationalOptions& opt)
        : spec_(spec), cfg_(cfg), opt_(opt) {}

    double jet_partial(int u, const std::vector<int>& d, const Point4& x) {
        const FieldJets<double>& base = jets(x);
        auto at = [&](double eps) {
            FieldJets<double> j = base;
            add_seed<double>(j, u, d, eps);
            return lagrangian(j, spec_);
        };
        auto diff = [&](double h) { return (at(h) - at(-h)) / (2 * h); };
        double h = opt_.inner_step;
        return (4 * diff(h / 2) - diff(h)) / 3;
    }

    double outer1(int u, int m, const Point4& x) {
        auto diff = [&](double h) {
            Point4 p = x, q = x;
            p[m] += h;
            q[m] -= h;
            return (jet_partial(u, {m}, p) - jet_partial(u, {m}, q)) / (2 * h);
        };
        double h = opt_.outer_step;
        return (4 * diff(h / 2) - diff(h)) / 3;
    }

    double outer2(int u, int m, int n, const Point4& x) {
        auto diff = [&](double h) {
            auto f = [&](double sm, double sn) {
                Point4 p = x;
                p[m] += sm;
                p[n] += sn;
                return jet_partial(u, {m, n}, p);
            };
            if (m == n) return (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
            return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
        };
        double h = opt_.outer_step;
        return (4 * diff(h / 2) - diff(h)) / 3;
    }

private:
    const FieldJets<double>& jets(const Point4& x) {
        auto it = cache_.find(x);
        if (it != cache_.end()) return it->second;
        ProlongOptions po;
        po.mode = Prolongation::FiniteDifference;
        po.step = opt_.jet_step;
        po.order = 2;
        FieldJets<double> j{};
        for (auto [a, b] : ordered_pairs()) {
            int k = pair_index(a, b);
            j.g[a][b] = j.g[b][a] = fd(k, {}, x);
            for (int c = 0; c < 4; ++c) {
                j.dg[a][b][c] = j.dg[b][a][c] = fd(k, {c}, x);
                for (int d = c; d < 4; ++d)
                    j.ddg[a][b][c][d] = j.ddg[b][a][c][d] = j.ddg[a][b][d][c] = j.ddg[b][a][d][c] = fd(k, {c, d}, x);
            }
        }
        j.phi = fd(-1, {}, x);
        for (int c = 0; c < 4; ++c) {
            j.dphi[c] = fd(-1, {c}, x);
            for (int d = c; d < 4; ++d) j.ddphi[c][d] = j.ddphi[d][c] = fd(-1, {c, d}, x);
        }
        return cache_.emplace(x, j).first->second;
    }

    double central(int comp, const std::vector<int>& d, std::size_t upto, const Point4& x, double h) {
        if (upto == 0) return cfg_.value(comp, x);
        Point4 p = x, q = x;
        p[d[upto - 1]] += h;
        q[d[upto - 1]] -= h;
        return (central(comp, d, upto - 1, p, h) - central(comp, d, upto - 1, q, h)) / (2 * h);
    }

    double fd(int comp, const std::vector<int>& d, const Point4& x) {
        if (d.empty()) return cfg_.value(comp, x);
        double h = opt_.jet_step;
        return (4 * central(comp, d, d.size(), x, h / 2) - central(comp, d, d.size(), x, h)) / 3;
    }

    const LagrangianSpec& spec_;
    const FieldConfiguration& cfg_;
    VariationalOptions opt_;
    std::map<Point4, FieldJets<double>> cache_;
};

std::array<D1, 4> plain_point(const Point4& x) {
    std::array<D1, 4> xs;
    for (int i = 0; i < 4; ++i) xs[i] = D1(x[i]);
    return xs;
}

double second_partial(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x, int u, int m, int n) {
    FieldJets<D1> j = jets_at<D1>(cfg, plain_point(x));
    add_seed<D1>(j, u, {std::min(m, n), std::max(m, n)}, D1(0.0, 1.0));
    return lagrangian(j, spec).d;
}

double first_momentum(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x, int u, int m) {
    FieldJets<D1> j = jets_at<D1>(cfg, plain_point(x));
    add_seed<D1>(j, u, {m}, D1(0.0, 1.0));
    double out = lagrangian(j, spec).d;
    for (int n = 0; n < 4; ++n) {
        std::array<D2, 4> xs;
        for (int i = 0; i < 4; ++i) xs[i] = D2(D1(x[i]), D1(i == n ? 1.0 : 0.0));
        FieldJets<D2> jn = jets_at<D2>(cfg, xs);
        add_seed<D2>(jn, u, {std::min(m, n), std::max(m, n)}, D2(D1(0.0, 1.0), D1(0.0)));
        out -= lagrangian(jn, spec).d.d / (m == n ? 1.0 : 2.0);
    }
    return out;
}

}  // namespace

std::vector<double> momenta(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x) {
    std::vector<double> out;
    for (int u = 0; u < 10; ++u)
        for (int m = 0; m < 4; ++m)
            for (int n = m; n < 4; ++n) out.push_back(second_partial(spec, cfg, x, u, m, n));
    for (int m = 0; m < 4; ++m)
        for (int n = m; n < 4; ++n) out.push_back(second_partial(spec, cfg, x, 10, m, n));
    for (int u = 0; u < 10; ++u)
        for (int m = 0; m < 4; ++m) out.push_back(first_momentum(spec, cfg, x, u, m));
    for (int m = 0; m < 4; ++m) out.push_back(first_momentum(spec, cfg, x, 10, m));
    return out;
}

std::array<double, 11> variational(const LagrangianSpec& spec, const FieldConfiguration& cfg, const Point4& x,
                                   const VariationalOptions& opt) {
    if (opt.mode == Mode::Analytic) return variational_analytic(spec, cfg, x);
    FiniteDifferenceOracle fdo(spec, cfg, opt);
    std::array<double, 11> out{};
    for (int u = 0; u < 11; ++u) {
        double e = fdo.jet_partial(u, {}, x);
        for (int m = 0; m < 4; ++m) e -= fdo.outer1(u, m, x);
        for (int m = 0; m < 4; ++m)
            for (int n = m; n < 4; ++n) e += fdo.outer2(u, m, n, x);
        out[static_cast<std::size_t>(u)] = e;
    }
    return out;
}

}  // namespace horn::oracle
