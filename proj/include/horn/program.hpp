#pragma once

// Numeric evaluation of expression DAGs. A Program is compiled once from a set of root
// expressions and then evaluated at jet points with any arithmetic type that supports
// + - * / and exp/log/sin/cos/sqrt (double and the Dual family).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "horn/dsl.hpp"
#include "horn/dual.hpp"
#include "horn/expr.hpp"
#include "horn/lagrangian.hpp"

namespace horn {

struct MissingSymbol : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SignatureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Values of jet coordinates (indexed by interned symbol id).
template <class T>
struct JetPoint {
    std::vector<T> v;
    std::vector<char> known;

    JetPoint() : v(interned_symbol_count()), known(interned_symbol_count(), 0) {}

    void set(SymId id, const T& x) {
        if (id >= v.size()) {
            v.resize(id + 1);
            known.resize(id + 1, 0);
        }
        v[id] = x;
        known[id] = 1;
    }
    void set(const JetSymbol& s, const T& x) { set(intern(s), x); }
    bool has(SymId id) const { return id < known.size() && known[id]; }
    const T& get(SymId id) const {
        if (!has(id)) throw MissingSymbol("no value for " + symbol_of(id).str());
        return v[id];
    }
    T get(const JetSymbol& s) const { return get(intern(s)); }

    T metric(int a, int b) const { return get(JetSymbol::metric(a, b)); }

    /// Fills the inverse metric and sqrt(-det g) from the metric values.
    void complete() {
        T m[4][4], inv[4][4], det;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) m[a][b] = metric(a, b);
        invert4(m, inv, det);
        if (!(value_of(det) < 0)) throw SignatureError("metric determinant is not negative");
        using std::sqrt;
        set(JetSymbol::sqrt_det(), sqrt(T(0.0) - det));
        for (int a = 0; a < kDim; ++a)
            for (int b = a; b < kDim; ++b) set(JetSymbol::inv_metric(a, b), inv[a][b]);
    }

    template <class U>
    JetPoint<U> convert() const {
        JetPoint<U> out;
        out.v.resize(v.size());
        out.known = known;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (known[i]) out.v[i] = U(value_of(v[i]));
        return out;
    }

    static void invert4(const T m[4][4], T inv[4][4], T& det) {
        // Adjugate through 2x2 sub-determinants.
        T s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
        T s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
        T s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
        T s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
        T s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
        T s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
        T c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
        T c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
        T c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
        T c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
        T c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
        T c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
        det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
        T r = T(1.0) / det;
        inv[0][0] = (m[1][1] * c5 - m[1][2] * c4 + m[1][3] * c3) * r;
        inv[0][1] = (T(0.0) - m[0][1] * c5 + m[0][2] * c4 - m[0][3] * c3) * r;
        inv[0][2] = (m[3][1] * s5 - m[3][2] * s4 + m[3][3] * s3) * r;
        inv[0][3] = (T(0.0) - m[2][1] * s5 + m[2][2] * s4 - m[2][3] * s3) * r;
        inv[1][0] = (T(0.0) - m[1][0] * c5 + m[1][2] * c2 - m[1][3] * c1) * r;
        inv[1][1] = (m[0][0] * c5 - m[0][2] * c2 + m[0][3] * c1) * r;
        inv[1][2] = (T(0.0) - m[3][0] * s5 + m[3][2] * s2 - m[3][3] * s1) * r;
        inv[1][3] = (m[2][0] * s5 - m[2][2] * s2 + m[2][3] * s1) * r;
        inv[2][0] = (m[1][0] * c4 - m[1][1] * c2 + m[1][3] * c0) * r;
        inv[2][1] = (T(0.0) - m[0][0] * c4 + m[0][1] * c2 - m[0][3] * c0) * r;
        inv[2][2] = (m[3][0] * s4 - m[3][1] * s2 + m[3][3] * s0) * r;
        inv[2][3] = (T(0.0) - m[2][0] * s4 + m[2][1] * s2 - m[2][3] * s0) * r;
        inv[3][0] = (T(0.0) - m[1][0] * c3 + m[1][1] * c1 - m[1][2] * c0) * r;
        inv[3][1] = (m[0][0] * c3 - m[0][1] * c1 + m[0][2] * c0) * r;
        inv[3][2] = (T(0.0) - m[3][0] * s3 + m[3][1] * s1 - m[3][2] * s0) * r;
        inv[3][3] = (m[2][0] * s3 - m[2][1] * s1 + m[2][2] * s0) * r;
    }
};

class Program {
public:
    Program() = default;
    /// Model-function nodes are evaluated through `spec`; compiling them without a spec throws.
    explicit Program(const std::vector<Expr>& roots, const LagrangianSpec* spec = nullptr);

    std::size_t size() const { return ops_.size(); }
    std::size_t outputs() const { return roots_.size(); }
    const std::vector<SymId>& inputs() const { return inputs_; }

    template <class T>
    std::vector<T> run(const JetPoint<T>& jp) const;

private:
    enum class Op : std::uint8_t { Const, Input, Sum, Prod, Apply, Model };
    struct Instr {
        Op op;
        ElemFn elem = ElemFn::Exp;
        std::uint32_t begin = 0, end = 0;  // Sum/Prod: range in the operand arrays
        std::uint32_t a = 0;               // Input: symbol id; Apply: operand; Model: model index
        double c = 0.0;                    // Const value; Sum constant term
    };
    int compile(Expr e);

    std::vector<Instr> ops_;
    std::vector<std::uint32_t> arg_;  // operand slots of sums and products
    std::vector<double> num_;         // coefficient (sum) or exponent (product) per operand
    std::vector<std::uint32_t> roots_;
    std::vector<SymId> inputs_;
    std::vector<dsl::SExpr> models_;
    std::uint32_t phi_slot_ = 0, x_slot_ = 0;
    bool has_models_ = false;
    const LagrangianSpec* spec_ = nullptr;
    std::unordered_map<Expr, int> slot_;
};

template <class T>
std::vector<T> Program::run(const JetPoint<T>& jp) const {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    std::vector<T> val(ops_.size());
    for (std::size_t k = 0; k < ops_.size(); ++k) {
        const Instr& in = ops_[k];
        switch (in.op) {
            case Op::Const:
                val[k] = T(in.c);
                break;
            case Op::Input:
                val[k] = jp.get(in.a);
                break;
            case Op::Sum: {
                T acc(in.c);
                for (std::uint32_t i = in.begin; i < in.end; ++i) acc = acc + T(num_[i]) * val[arg_[i]];
                val[k] = acc;
                break;
            }
            case Op::Prod: {
                T acc(1.0);
                for (std::uint32_t i = in.begin; i < in.end; ++i) {
                    int e = static_cast<int>(num_[i]);
                    acc = acc * (e == 1 ? val[arg_[i]] : ipow(val[arg_[i]], e));
                }
                val[k] = acc;
                break;
            }
            case Op::Apply: {
                const T& x = val[in.a];
                switch (in.elem) {
                    case ElemFn::Exp:
                        val[k] = exp(x);
                        break;
                    case ElemFn::Sin:
                        val[k] = sin(x);
                        break;
                    case ElemFn::Cos:
                        val[k] = cos(x);
                        break;
                    case ElemFn::Log:
                        val[k] = log(x);
                        break;
                }
                break;
            }
            case Op::Model:
                val[k] = dsl::eval<T>(models_[in.a], std::vector<T>{val[phi_slot_], val[x_slot_]});
                break;
        }
    }
    std::vector<T> out;
    out.reserve(roots_.size());
    for (std::uint32_t r : roots_) out.push_back(val[r]);
    return out;
}

/// Convenience: compile and evaluate a single expression at a double point.
double evaluate(Expr e, const JetPoint<double>& jp, const LagrangianSpec* spec = nullptr);

}  // namespace horn
