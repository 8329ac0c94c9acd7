#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace horn {

constexpr int kDim = 4;
constexpr int kMaxJetOrder = 4;

/// Combinatorial weight of a symmetric index pair: 1 on the diagonal, 2 off it.
inline int n_factor(int mu, int nu) { return mu == nu ? 1 : 2; }

enum class SymKind : std::uint8_t {
    Coord,       // x^mu
    Metric,      // g_{ab,D}
    InvMetric,   // g^{ab}, function of the metric
    SqrtDet,     // sqrt(|det g|), function of the metric
    PhiPartial,  // phi_{,D}
    PhiCov,      // phi_{;D}, |D| in {2,3}; lower orders coincide with PhiPartial
    P,           // scalar momentum p of the extended bundle
    PgFirst,     // p_g^{ab,mu}
    PgSecond,    // p_g^{ab,mu nu}
    PphiFirst,   // p_phi^{,mu}
    PphiSecond,  // p_phi^{,mu nu}
    Coeff,       // component of a multivector field ansatz
};

/// Families of multivector coefficients. Names follow the role of the direction
/// they multiply: F* along velocities, G* along momenta.
enum class CoeffFamily : std::uint8_t {
    MetricVelocity,        // F_{g ab,tau}
    ScalarVelocity,        // F_{phi,tau}
    MetricAcceleration,    // F_{g ab,mu,tau}
    ScalarAcceleration,    // F_{phi mu,tau}
    MetricMomentum1,       // G_g^{ab,mu}_tau
    ScalarMomentum1,       // G_phi^{,mu}_tau
    MetricMomentum2,       // G_g^{ab,mu nu}_tau
    ScalarMomentum2,       // G_phi^{,mu nu}_tau
    MetricFourth,          // F_{g ab,mu nu la,tau}
    ScalarFourth,          // F_{phi mu nu la,tau}
};

struct IndexError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One coordinate (or derived coordinate function) of the jet-multimomentum chart.
/// Symmetric pairs are stored ordered and derivative multisets sorted, so equal
/// coordinates compare equal regardless of how they were spelled.
struct JetSymbol {
    SymKind kind = SymKind::Coord;
    std::uint8_t a = 0, b = 0;         // symmetric field pair (metric-type objects)
    std::uint8_t n = 0;                // number of entries used in idx
    std::array<std::uint8_t, 4> idx{}; // derivative multiset or momentum indices
    std::uint8_t family = 0;           // CoeffFamily for Coeff

    static JetSymbol coord(int mu);
    static JetSymbol metric(int a, int b, std::initializer_list<int> derivs = {});
    static JetSymbol metric(int a, int b, const std::vector<int>& derivs);
    static JetSymbol inv_metric(int a, int b);
    static JetSymbol sqrt_det();
    static JetSymbol phi(std::initializer_list<int> derivs = {});
    static JetSymbol phi(const std::vector<int>& derivs);
    /// Covariant scalar jet; orders 0 and 1 return the partial-chart symbol.
    static JetSymbol phi_cov(const std::vector<int>& derivs);
    static JetSymbol p();
    static JetSymbol pg1(int a, int b, int mu);
    static JetSymbol pg2(int a, int b, int mu, int nu);
    static JetSymbol pphi1(int mu);
    static JetSymbol pphi2(int mu, int nu);
    static JetSymbol coeff(CoeffFamily f, int a, int b, const std::vector<int>& indices);

    std::vector<int> derivs() const { return std::vector<int>(idx.begin(), idx.begin() + n); }
    /// Jet order of field symbols (number of derivative indices); 0 otherwise.
    int order() const;
    bool is_metric_field() const { return kind == SymKind::Metric; }
    bool is_scalar_field() const { return kind == SymKind::PhiPartial || kind == SymKind::PhiCov; }
    bool is_momentum() const;

    std::string str() const;    // plain-text form, e.g. g_{01,23}
    std::string latex() const;  // typeset form
    std::uint64_t content_hash() const;

    friend bool operator==(const JetSymbol& x, const JetSymbol& y) {
        return x.kind == y.kind && x.a == y.a && x.b == y.b && x.n == y.n && x.idx == y.idx && x.family == y.family;
    }
    friend bool operator<(const JetSymbol& x, const JetSymbol& y);
};

using SymId = std::uint32_t;

/// Thread-safe interning of symbols into dense ids.
SymId intern(const JetSymbol& s);
const JetSymbol& symbol_of(SymId id);
std::size_t interned_symbol_count();

/// Ordered chart coordinates, grouped by role (stable order used by matrices and reports).
std::vector<JetSymbol> metric_coordinates(int order);      // g_{ab,D} with |D| = order, a<=b, D sorted
std::vector<JetSymbol> scalar_coordinates(int order, bool covariant);
std::vector<std::pair<int, int>> ordered_pairs();           // (a,b) with a<=b, 10 entries
std::vector<std::vector<int>> multisets(int size);          // sorted index multisets of given size

}  // namespace horn
