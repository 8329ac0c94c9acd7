#pragma once

// Abstract-index tensor expressions over the metric, its inverse, the Kronecker delta and the
// scalar jets. A term is a rational coefficient times a product of indexed atoms; a label that
// occurs twice in a term (once up, once down) is summed. Canonical form contracts deltas and
// g^{ab} g_{bc}, orders symmetric slots, renames dummies to a canonical sequence and merges
// like terms. Component expansion maps a tensor expression onto the concrete jet chart.
// Labels starting with '#' are reserved for canonical summed indices.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "horn/expr.hpp"

namespace horn::tensor {

struct IndexDisciplineError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Index {
    std::string label;
    bool upper = false;
    friend bool operator==(const Index& a, const Index& b) { return a.label == b.label && a.upper == b.upper; }
};
inline Index up(std::string l) { return Index{std::move(l), true}; }
inline Index down(std::string l) { return Index{std::move(l), false}; }

enum class AtomKind : std::uint8_t {
    Metric,     // g_{ab,D}: two pair slots then the derivative slots, all lower
    InvMetric,  // g^{ab}
    Delta,      // delta^a_b
    Scalar,     // phi_{,D}
    CovScalar,  // phi_{;D}, |D| <= 2
    SqrtDet,    // sqrt(-g)
    Model,      // opaque model-function derivative
};

struct Atom {
    AtomKind kind = AtomKind::Metric;
    std::vector<Index> slots;
    ScalarFn fn;  // Model only
};

struct Term {
    Rational coef = 1;
    std::vector<Atom> atoms;
};

class TensorExpr {
public:
    TensorExpr() = default;
    explicit TensorExpr(std::vector<Term> terms) : terms_(std::move(terms)) {}

    const std::vector<Term>& terms() const { return terms_; }
    /// Free indices (label, position), sorted; throws IndexDisciplineError on malformed terms
    /// or when terms of a sum disagree.
    std::vector<Index> free_indices() const;

    friend TensorExpr operator+(const TensorExpr& a, const TensorExpr& b);
    friend TensorExpr operator-(const TensorExpr& a, const TensorExpr& b);
    /// Dummies of the right operand are renamed apart before multiplying.
    friend TensorExpr operator*(const TensorExpr& a, const TensorExpr& b);
    friend TensorExpr operator*(const Rational& c, const TensorExpr& a);

private:
    std::vector<Term> terms_;
};

TensorExpr number(const Rational& c);
TensorExpr metric(Index a, Index b, const std::vector<Index>& derivs = {});
TensorExpr inverse_metric(Index a, Index b);
TensorExpr delta(Index a, Index b);
TensorExpr scalar(const std::vector<Index>& derivs = {});
TensorExpr covariant_scalar(const std::vector<Index>& derivs);
TensorExpr sqrt_det();
TensorExpr model(const ScalarFn& f);

/// Throws IndexDisciplineError unless every label occurs once, or twice with opposite positions.
void check_discipline(const Term& t);

TensorExpr canonicalize(const TensorExpr& e);
/// Deterministic text form; equal canonical expressions print identically.
std::string to_string(const TensorExpr& e);
bool operator==(const TensorExpr& a, const TensorExpr& b);

/// Component expansion with the free labels bound to concrete values.
Expr expand(const TensorExpr& e, const std::map<std::string, int>& free_values = {});

}  // namespace horn::tensor
