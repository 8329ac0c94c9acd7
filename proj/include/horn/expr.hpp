#pragma once

// Symbolic expressions over concrete jet coordinates.
//
// Expressions are hash-consed DAG nodes owned by a process-wide context. Every
// builder returns nodes in a light normal form: sums and products are flattened,
// like terms and like factors are merged, numeric coefficients are pulled to the
// enclosing sum, and operands are sorted by a content-based order. Products of
// sums are left unexpanded so that large derivations stay compact; `canonicalize`
// performs the full polynomial expansion when an exact zero test is needed.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "horn/rational.hpp"
#include "horn/symbol.hpp"

namespace horn {

enum class NodeKind : std::uint8_t { Const, Sym, Fn, Apply, Sum, Prod };
enum class FnName : std::uint8_t { G2, G3 };
enum class ElemFn : std::uint8_t { Exp, Sin, Cos, Log };

/// Opaque partial derivative d^{dphi+dx} G / dphi^dphi dX^dx of a model function.
struct ScalarFn {
    FnName name = FnName::G2;
    std::uint8_t d_phi = 0;
    std::uint8_t d_x = 0;
    friend bool operator==(const ScalarFn& a, const ScalarFn& b) {
        return a.name == b.name && a.d_phi == b.d_phi && a.d_x == b.d_x;
    }
    std::string str() const;
};

struct Node;
using Expr = const Node*;

struct Term {
    Rational coef;
    Expr body;
};
struct Factor {
    Expr base;
    int exp;
};

/// Dependency summary cached on every node.
struct DepInfo {
    std::array<std::uint64_t, 4> bloom{};  // over symbol ids (with derived-symbol closure)
    std::int8_t metric_order = -1;         // highest metric jet order present (-1: none)
    std::int8_t scalar_order = -1;         // highest scalar jet order present (-1: none)
    bool momentum = false;
    bool coefficient = false;
    bool model_fn = false;                 // contains an unbound G2/G3 node
    bool maybe(SymId id) const;
    void add(SymId id);
    void merge(const DepInfo& o);
};

struct Node {
    NodeKind kind{};
    std::uint32_t id = 0;       // creation order inside the context
    std::uint64_t hash = 0;     // content hash, independent of creation order
    DepInfo dep;
    Rational value;             // Const value, constant term of a Sum
    SymId sym = 0;              // Sym
    ScalarFn fn;                // Fn
    ElemFn elem = ElemFn::Exp;  // Apply
    Expr arg = nullptr;         // Apply
    std::vector<Term> terms;    // Sum
    std::vector<Factor> factors;  // Prod
};

struct OrderOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- construction -----------------------------------------------------------

Expr constant(const Rational& r);
inline Expr zero() { return constant(0); }
inline Expr one() { return constant(1); }
Expr sym(const JetSymbol& s);
Expr sym(SymId id);
Expr fn(const ScalarFn& f);
Expr apply(ElemFn f, Expr arg);
Expr add(const std::vector<Expr>& ops);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr neg(Expr a);
Expr scale(const Rational& c, Expr a);
Expr mul(const std::vector<Expr>& ops);
Expr mul(Expr a, Expr b);
Expr pow(Expr base, int exponent);
Expr div(Expr a, Expr b);

/// Accumulates a linear combination efficiently (one final sum node).
class SumBuilder {
public:
    void add(Expr e, const Rational& c = 1);
    Expr build() const;
    bool empty() const { return order_.empty() && constant_.is_zero(); }

private:
    Rational constant_;
    std::unordered_map<Expr, Rational> coef_;
    std::vector<Expr> order_;
};

// ---- convenience symbols ------------------------------------------------------

Expr g(int a, int b, std::initializer_list<int> d = {});  // metric jet
Expr ginv(int a, int b);
Expr sqrtg();
Expr phi(std::initializer_list<int> d = {});
Expr phi_cov(const std::vector<int>& d);
Expr coord(int mu);
/// Kinetic scalar X = -1/2 g^{mn} phi_{,m} phi_{,n} (first jets are shared by both charts).
Expr kinetic_x();

// ---- inspection ---------------------------------------------------------------

bool is_const(Expr e);
bool is_zero(Expr e);
std::optional<Rational> const_value(Expr e);
std::size_t dag_size(Expr e);
/// Node count of the expression printed as a tree, saturating at `cap`.
std::size_t tree_size(Expr e, std::size_t cap = SIZE_MAX);
std::vector<SymId> free_symbols(Expr e);       // exact, sorted by id
int max_metric_order(Expr e);
int max_scalar_order(Expr e);
bool contains_momentum(Expr e);
bool contains_model_fn(Expr e);
bool contains_kind(Expr e, SymKind k);
/// Strict total order used for sorting operands (content based, deterministic).
int compare(Expr a, Expr b);

// ---- calculus -----------------------------------------------------------------

/// Formal partial derivative with respect to an ordered chart coordinate.
Expr partial(Expr e, const JetSymbol& c);
Expr partial(Expr e, SymId c);

/// Supplies total derivatives of symbols whose prolongation depends on the chart.
class JetRule {
public:
    virtual ~JetRule() = default;
    virtual int rule_id() const = 0;
    /// Returns the total derivative of `s` along x^tau, or nullopt to use the default.
    virtual std::optional<Expr> derive_symbol(const JetSymbol& s, int tau) const = 0;
};

/// Total derivative D_tau; raises jet orders by one. Throws OrderOverflow past order 4.
Expr total_derivative(Expr e, int tau, const JetRule* rule = nullptr);

/// Simultaneous substitution of symbols and model-function nodes.
struct Substitution {
    std::unordered_map<SymId, Expr> symbols;
    std::function<std::optional<Expr>(const ScalarFn&)> model_fn;
};
Expr substitute(Expr e, const Substitution& s);

/// Full expansion into a sum of monomials with rational coefficients. Idempotent.
Expr canonicalize(Expr e);
/// Exact zero test through canonicalize.
bool is_identically_zero(Expr e);

// ---- printing -----------------------------------------------------------------

std::string to_string(Expr e);
std::string to_latex(Expr e);

// ---- context ------------------------------------------------------------------

/// Drops every node and memo table. All previously returned Expr values dangle.
void reset_context();
std::size_t context_node_count();
/// Incremented by every reset_context(); lets callers invalidate their own caches.
std::uint64_t context_epoch();

/// Named memo table for derived objects (Christoffel symbols, chart maps, ...).
Expr memo_get_or_build(const std::string& key, const std::function<Expr()>& build);

}  // namespace horn
