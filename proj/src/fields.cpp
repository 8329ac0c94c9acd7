#include "horn/fields.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <map>
#include <mutex>
#include <regex>

#include "horn/chart.hpp"
#include "horn/legendre.hpp"

namespace horn {

using dsl::SExpr;

struct FieldConfiguration::Cache {
    std::mutex mu;
    std::map<std::pair<int, std::vector<int>>, SExpr> derivs;
};

FieldConfiguration::FieldConfiguration() : cache_(std::make_shared<Cache>()) {}

int pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    static const int table[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
    return table[a][b];
}

namespace {

SExpr lit(double x) { return dsl::number(dsl::Num::approx(x)); }
SExpr coordinate_expr(const std::string& src, const std::map<std::string, double>& params = {}) {
    dsl::Grammar gr = dsl::Grammar::coordinates();
    for (const auto& [k, v] : params) gr.parameters[k] = dsl::Num::approx(v);
    return dsl::parse(src, gr);
}

std::array<SExpr, 10> flat_metric() {
    std::array<SExpr, 10> m;
    for (auto [a, b] : ordered_pairs()) m[pair_index(a, b)] = dsl::number(Rational(a == b ? (a == 0 ? -1 : 1) : 0));
    return m;
}

void check_signature(const JetPoint<double>& jp) {
    Eigen::Matrix4d m;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) m(a, b) = jp.metric(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
    int negative = 0, positive = 0;
    for (int i = 0; i < 4; ++i) (es.eigenvalues()(i) < 0 ? negative : positive) += es.eigenvalues()(i) != 0 ? 1 : 0;
    if (negative != 1 || positive != 3) throw SignatureError("metric is not of signature (-,+,+,+)");
}

}  // namespace

FieldConfiguration FieldConfiguration::minkowski() {
    FieldConfiguration c;
    c.name = "minkowski";
    c.metric = flat_metric();
    c.scalar = dsl::number(Rational(0));
    return c;
}

FieldConfiguration FieldConfiguration::minkowski_wave(const Point4& k, double amplitude) {
    FieldConfiguration c = minkowski();
    c.name = "minkowski_wave";
    c.scalar = coordinate_expr("A*sin(k0*t + k1*x + k2*y + k3*z)",
                               {{"A", amplitude}, {"k0", k[0]}, {"k1", k[1]}, {"k2", k[2]}, {"k3", k[3]}});
    return c;
}

FieldConfiguration FieldConfiguration::flrw(double hubble, double phi0, double phi1) {
    FieldConfiguration c = minkowski();
    char buf[64];
    std::snprintf(buf, sizeof buf, "flrw(%g)", hubble);
    c.name = buf;
    SExpr scale2 = coordinate_expr("exp(2*H*t)", {{"H", hubble}});
    for (int i = 1; i < kDim; ++i) c.metric[pair_index(i, i)] = scale2;
    c.scalar = coordinate_expr("p0 + p1*t", {{"p0", phi0}, {"p1", phi1}});
    return c;
}

FieldConfiguration FieldConfiguration::schwarzschild(double mass) {
    FieldConfiguration c = minkowski();
    char buf[64];
    std::snprintf(buf, sizeof buf, "schwarzschild(%g)", mass);
    c.name = buf;
    c.metric[pair_index(0, 0)] = coordinate_expr("-(1 - 2*M/x)", {{"M", mass}});
    c.metric[pair_index(1, 1)] = coordinate_expr("1/(1 - 2*M/x)", {{"M", mass}});
    c.metric[pair_index(2, 2)] = coordinate_expr("x^2");
    c.metric[pair_index(3, 3)] = coordinate_expr("x^2*sin(y)^2");
    return c;
}

FieldConfiguration FieldConfiguration::perturbed_flat(double eps) {
    FieldConfiguration c = minkowski();
    char buf[64];
    std::snprintf(buf, sizeof buf, "perturbed_flat(%g)", eps);
    c.name = buf;
    for (auto [a, b] : ordered_pairs()) {
        std::map<std::string, double> p{{"e", eps}, {"u", 0.3 * (a + 1)}, {"v", 0.7 * (b + 1)}, {"w", 0.1 * (a + b)}};
        SExpr bump = coordinate_expr("e*sin(u*t + v*x + 0.2*y - 0.5*z + w)", p);
        c.metric[pair_index(a, b)] = dsl::add({c.metric[pair_index(a, b)], bump});
    }
    return c;
}

FieldConfiguration FieldConfiguration::random_taylor(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldConfiguration c = minkowski();
    c.name = "taylor(" + std::to_string(seed) + ")";
    auto polynomial = [&](double c0) {
        std::vector<SExpr> terms{lit(c0)};
        for (int order = 1; order <= 4; ++order)
            for (const auto& d : multisets(order)) {
                double coef = scale * u(rng);
                std::vector<SExpr> fs{lit(coef)};
                int counts[4] = {0, 0, 0, 0};
                for (int i : d) ++counts[i];
                double fact = 1;
                for (int i = 0; i < 4; ++i) {
                    for (int k = 2; k <= counts[i]; ++k) fact *= k;
                    if (counts[i]) fs.push_back(dsl::power(dsl::variable(i), counts[i]));
                }
                fs[0] = lit(coef / fact);
                terms.push_back(dsl::mul(fs));
            }
        return dsl::add(terms);
    };
    for (auto [a, b] : ordered_pairs()) {
        double eta = a == b ? (a == 0 ? -1.0 : 1.0) : 0.0;
        c.metric[pair_index(a, b)] = polynomial(eta + 0.1 * u(rng));
    }
    c.scalar = polynomial(scale * u(rng));
    return c;
}

FieldConfiguration FieldConfiguration::from_closed_forms(const std::string& name,
                                                         const std::array<std::string, 10>& metric,
                                                         const std::string& scalar,
                                                         const std::map<std::string, double>& params) {
    FieldConfiguration c;
    c.name = name;
    for (std::size_t i = 0; i < metric.size(); ++i) c.metric[i] = coordinate_expr(metric[i], params);
    c.scalar = coordinate_expr(scalar, params);
    return c;
}

FieldConfiguration FieldConfiguration::named(const std::string& text) {
    static const std::regex call(R"(\s*([a-z_]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, call)) throw std::invalid_argument("malformed configuration name '" + text + "'");
    std::string head = m[1];
    bool has_arg = m[2].matched;
    double arg = has_arg ? std::stod(m[2]) : 0.0;
    if (head == "minkowski" && !has_arg) return minkowski();
    if (head == "minkowski_wave") return minkowski_wave({0.0, has_arg ? arg : 1.0, 0.0, 0.0});
    if (head == "flrw") return flrw(has_arg ? arg : 0.5);
    if (head == "schwarzschild") return schwarzschild(has_arg ? arg : 1.0);
    if (head == "perturbed_flat") return perturbed_flat(has_arg ? arg : 0.05);
    if (head == "taylor") return random_taylor(has_arg ? static_cast<std::uint64_t>(arg) : 1);
    throw std::invalid_argument("unknown configuration '" + head + "'");
}

SExpr FieldConfiguration::derivative(int component, const std::vector<int>& d_in) const {
    std::vector<int> d = d_in;
    std::sort(d.begin(), d.end());
    const SExpr& base = component < 0 ? scalar : metric.at(static_cast<std::size_t>(component));
    if (d.empty()) return base;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->derivs.find({component, d});
        if (it != cache_->derivs.end()) return it->second;
    }
    std::vector<int> parent(d.begin(), d.end() - 1);
    SExpr out = dsl::differentiate(derivative(component, parent), d.back());
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->derivs[{component, d}] = out;
    return out;
}

double FieldConfiguration::value(int component, const Point4& x) const {
    const SExpr& base = component < 0 ? scalar : metric.at(static_cast<std::size_t>(component));
    return dsl::eval<double>(base, std::vector<double>(x.begin(), x.end()));
}

namespace {

double central(const FieldConfiguration& cfg, int comp, const std::vector<int>& d, std::size_t upto, Point4 x, double h) {
    if (upto == 0) return cfg.value(comp, x);
    int dir = d[upto - 1];
    Point4 xp = x, xm = x;
    xp[static_cast<std::size_t>(dir)] += h;
    xm[static_cast<std::size_t>(dir)] -= h;
    return (central(cfg, comp, d, upto - 1, xp, h) - central(cfg, comp, d, upto - 1, xm, h)) / (2 * h);
}

double jet_value(const FieldConfiguration& cfg, int comp, const std::vector<int>& d, const Point4& x,
                 const ProlongOptions& opt) {
    if (opt.mode == Prolongation::Analytic)
        return dsl::eval<double>(cfg.derivative(comp, d), std::vector<double>(x.begin(), x.end()));
    double coarse = central(cfg, comp, d, d.size(), x, opt.step);
    if (!opt.richardson || d.empty()) return coarse;
    double fine = central(cfg, comp, d, d.size(), x, opt.step / 2);
    return (4 * fine - coarse) / 3;
}

}  // namespace

std::vector<JetSymbol> covariant_targets(int order) { return scalar_coordinates(order, true); }

const Program& covariant_forward_program(int order) {
    static std::mutex mu;
    static std::uint64_t epoch[2] = {~0ull, ~0ull};
    static Program prog[2];
    std::lock_guard<std::mutex> lock(mu);
    int k = order - 2;
    if (k < 0 || k > 1) throw std::invalid_argument("covariant jets exist for orders 2 and 3");
    if (epoch[k] != context_epoch()) {
        std::vector<Expr> roots;
        for (const JetSymbol& t : covariant_targets(order)) roots.push_back(covariant_jet_in_partial(t.derivs()));
        prog[k] = Program(roots);
        epoch[k] = context_epoch();
    }
    return prog[k];
}

JetPoint<double> prolong(const FieldConfiguration& cfg, const Point4& x, const ProlongOptions& opt) {
    JetPoint<double> jp;
    for (int m = 0; m < kDim; ++m) jp.set(JetSymbol::coord(m), x[static_cast<std::size_t>(m)]);
    for (int order = 0; order <= opt.order; ++order)
        for (const auto& d : multisets(order)) {
            for (auto [a, b] : ordered_pairs())
                jp.set(JetSymbol::metric(a, b, d), jet_value(cfg, pair_index(a, b), d, x, opt));
            jp.set(JetSymbol::phi(d), jet_value(cfg, -1, d, x, opt));
        }
    check_signature(jp);
    jp.complete();
    fill_covariant_jets(jp, std::min(opt.order, 3));
    return jp;
}

JetPoint<double> random_jet_point(std::mt19937_64& rng, double scale, int order) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    JetPoint<double> jp;
    for (int m = 0; m < kDim; ++m) jp.set(JetSymbol::coord(m), 0.0);
    for (auto [a, b] : ordered_pairs()) {
        double eta = a == b ? (a == 0 ? -1.0 : 1.0) : 0.0;
        jp.set(JetSymbol::metric(a, b), eta + 0.1 * u(rng));
    }
    jp.set(JetSymbol::phi(), scale * u(rng));
    for (int o = 1; o <= order; ++o)
        for (const auto& d : multisets(o)) {
            for (auto [a, b] : ordered_pairs()) jp.set(JetSymbol::metric(a, b, d), scale * u(rng));
            jp.set(JetSymbol::phi(d), scale * u(rng));
        }
    check_signature(jp);
    jp.complete();
    fill_covariant_jets(jp, std::min(order, 3));
    return jp;
}

void fill_momenta(JetPoint<double>& jp, const LegendreMap& fl, const LagrangianSpec& spec) {
    std::vector<Expr> roots = fl.values;
    if (fl.extended) roots.push_back(fl.extended);
    auto vals = Program(roots, &spec).run(jp);
    for (std::size_t i = 0; i < fl.momenta.size(); ++i) jp.set(fl.momenta[i], vals[i]);
    if (fl.extended) jp.set(JetSymbol::p(), vals.back());
}

}  // namespace horn
