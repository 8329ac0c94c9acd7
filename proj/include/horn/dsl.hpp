#pragma once

// A small language for closed-form scalar functions such as G2(phi, X), G3(phi, X)
// and coordinate profiles of field configurations.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' primary)*          left associative, integer exponents
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | log
//
// Numbers are decimal literals (optionally with an exponent) and are read exactly as
// rationals. Names are the variables of the grammar plus caller-supplied parameters.

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "horn/dual.hpp"
#include "horn/expr.hpp"
#include "horn/rational.hpp"

namespace horn::dsl {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(std::size_t at, const std::string& msg)
        : std::runtime_error("at byte " + std::to_string(at) + ": " + msg), offset(at) {}
};
struct UnknownIdentifier : ParseError {
    using ParseError::ParseError;
};

/// Numeric literal: exact when possible, floating otherwise.
struct Num {
    Rational q;
    double r = 0.0;
    bool real = false;
    static Num exact(const Rational& x) { return Num{x, 0.0, false}; }
    static Num approx(double x) { return Num{Rational(0), x, true}; }
    double value() const { return real ? r : q.to_double(); }
    bool is_zero() const { return real ? r == 0.0 : q.is_zero(); }
    bool is_one() const { return real ? r == 1.0 : q.is_one(); }
};
Num operator+(const Num& a, const Num& b);
Num operator*(const Num& a, const Num& b);
Num num_pow(const Num& a, int e);

enum class Kind { Num, Var, Add, Mul, Call };

struct Node;
using SExpr = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Num;
    Num value;                 // Num literal; constant term of Add; coefficient of Mul
    int var = 0;               // Var
    ElemFn fn = ElemFn::Exp;   // Call
    std::vector<SExpr> kids;   // Add terms, Mul bases, Call argument
    std::vector<Num> coefs;    // Add: one coefficient per kid
    std::vector<int> exps;     // Mul: one exponent per kid
    std::string key;           // structural identity, also the sort key
};

/// Variable names accepted by a grammar instance, in index order.
struct Grammar {
    std::vector<std::string> variables;
    std::map<std::string, Num> parameters;
    static Grammar model() { return Grammar{{"phi", "X"}, {}}; }
    static Grammar coordinates() { return Grammar{{"t", "x", "y", "z"}, {}}; }
};

constexpr int kPhi = 0;
constexpr int kX = 1;

SExpr number(const Num& n);
SExpr number(const Rational& q);
SExpr variable(int index);
SExpr call(ElemFn f, SExpr arg);
SExpr add(const std::vector<SExpr>& ops);
SExpr mul(const std::vector<SExpr>& ops);
SExpr power(SExpr base, int e);
SExpr sub(SExpr a, SExpr b);
SExpr neg(SExpr a);
SExpr div(SExpr a, SExpr b);

SExpr parse(const std::string& src, const Grammar& grammar = Grammar::model());
std::string print(const SExpr& e, const Grammar& grammar = Grammar::model());

SExpr differentiate(const SExpr& f, int var, int order = 1);
/// Mixed partial: d^{n_phi + n_x} f / dphi^{n_phi} dX^{n_x} for model functions.
SExpr mixed(const SExpr& f, int n_phi, int n_x);

/// True when no node of the folded tree is the given variable.
bool depends_on(const SExpr& f, int var);
bool is_zero(const SExpr& f);
bool structurally_equal(const SExpr& a, const SExpr& b);

/// Converts into a jet expression with each variable replaced by the given Expr.
Expr to_expr(const SExpr& f, const std::vector<Expr>& vars);

template <class T>
T eval(const SExpr& e, const std::vector<T>& vars) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    switch (e->kind) {
        case Kind::Num:
            return T(e->value.value());
        case Kind::Var:
            return vars.at(static_cast<std::size_t>(e->var));
        case Kind::Add: {
            T out(e->value.value());
            for (std::size_t i = 0; i < e->kids.size(); ++i) out = out + T(e->coefs[i].value()) * eval<T>(e->kids[i], vars);
            return out;
        }
        case Kind::Mul: {
            T out(e->value.value());
            for (std::size_t i = 0; i < e->kids.size(); ++i) out = out * ipow(eval<T>(e->kids[i], vars), e->exps[i]);
            return out;
        }
        case Kind::Call: {
            T a = eval<T>(e->kids[0], vars);
            switch (e->fn) {
                case ElemFn::Exp:
                    return exp(a);
                case ElemFn::Sin:
                    return sin(a);
                case ElemFn::Cos:
                    return cos(a);
                case ElemFn::Log:
                    return log(a);
            }
        }
    }
    return T(0.0);
}

inline double eval(const SExpr& e, double phi, double x) { return eval<double>(e, std::vector<double>{phi, x}); }

}  // namespace horn::dsl
