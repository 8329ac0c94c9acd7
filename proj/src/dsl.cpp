#include "horn/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_map>

namespace horn::dsl {

// ---- numbers -------------------------------------------------------------------------

Num operator+(const Num& a, const Num& b) {
    if (a.real || b.real) return Num::approx(a.value() + b.value());
    try {
        return Num::exact(a.q + b.q);
    } catch (const RationalOverflow&) {
        return Num::approx(a.value() + b.value());
    }
}

Num operator*(const Num& a, const Num& b) {
    if (a.real || b.real) return Num::approx(a.value() * b.value());
    try {
        return Num::exact(a.q * b.q);
    } catch (const RationalOverflow&) {
        return Num::approx(a.value() * b.value());
    }
}

Num num_pow(const Num& a, int e) {
    if (!a.real) {
        if (a.q.is_zero() && e < 0) throw std::domain_error("zero raised to a negative power");
        try {
            return Num::exact(a.q.pow(e));
        } catch (const RationalOverflow&) {
        }
    }
    return Num::approx(std::pow(a.value(), e));
}

namespace {

std::string num_key(const Num& n) {
    if (!n.real) return "q" + n.q.str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "r%a", n.r);
    return buf;
}

bool num_negative(const Num& n) { return n.real ? n.r < 0 : n.q.num() < 0; }
Num num_neg(const Num& n) { return n * Num::exact(-1); }

std::shared_ptr<Node> fresh(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}

const char* fn_name(ElemFn f) {
    switch (f) {
        case ElemFn::Exp:
            return "exp";
        case ElemFn::Sin:
            return "sin";
        case ElemFn::Cos:
            return "cos";
        case ElemFn::Log:
            return "log";
    }
    return "?";
}

SExpr make_mul(const Num& coef, std::vector<std::pair<SExpr, int>> fs);

}  // namespace

SExpr number(const Num& n) {
    auto node = fresh(Kind::Num);
    node->value = n;
    node->key = num_key(n);
    return node;
}

SExpr number(const Rational& q) { return number(Num::exact(q)); }

SExpr variable(int index) {
    auto node = fresh(Kind::Var);
    node->var = index;
    node->key = "v" + std::to_string(index);
    return node;
}

SExpr call(ElemFn f, SExpr arg) {
    if (arg->kind == Kind::Num && !arg->value.real) {
        const Rational& q = arg->value.q;
        if (q.is_zero() && f == ElemFn::Exp) return number(Rational(1));
        if (q.is_zero() && f == ElemFn::Sin) return number(Rational(0));
        if (q.is_zero() && f == ElemFn::Cos) return number(Rational(1));
        if (q.is_one() && f == ElemFn::Log) return number(Rational(0));
    }
    auto node = fresh(Kind::Call);
    node->fn = f;
    node->kids = {arg};
    node->key = std::string("C") + fn_name(f) + "(" + arg->key + ")";
    return node;
}

// ---- sums ---------------------------------------------------------------------------------

SExpr add(const std::vector<SExpr>& ops) {
    Num constant = Num::exact(0);
    std::vector<std::pair<SExpr, Num>> terms;
    std::unordered_map<std::string, std::size_t> where;
    auto push = [&](const SExpr& body, const Num& c) {
        auto it = where.find(body->key);
        if (it == where.end()) {
            where.emplace(body->key, terms.size());
            terms.emplace_back(body, c);
        } else {
            terms[it->second].second = terms[it->second].second + c;
        }
    };
    auto push_scaled = [&](const SExpr& e, const Num& c) {
        if (e->kind == Kind::Mul && !e->value.is_one()) {
            std::vector<std::pair<SExpr, int>> fs;
            for (std::size_t i = 0; i < e->kids.size(); ++i) fs.emplace_back(e->kids[i], e->exps[i]);
            push(make_mul(Num::exact(1), fs), c * e->value);
        } else {
            push(e, c);
        }
    };
    for (const SExpr& op : ops) {
        if (op->kind == Kind::Num) {
            constant = constant + op->value;
        } else if (op->kind == Kind::Add) {
            constant = constant + op->value;
            for (std::size_t i = 0; i < op->kids.size(); ++i) push_scaled(op->kids[i], op->coefs[i]);
        } else {
            push_scaled(op, Num::exact(1));
        }
    }
    std::vector<std::pair<SExpr, Num>> kept;
    for (auto& t : terms)
        if (!t.second.is_zero()) kept.push_back(t);
    std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return x.first->key < y.first->key; });
    if (kept.empty()) return number(constant);
    if (kept.size() == 1 && constant.is_zero()) {
        if (kept[0].second.is_one()) return kept[0].first;
        return mul({number(kept[0].second), kept[0].first});
    }
    auto node = fresh(Kind::Add);
    node->value = constant;
    node->key = "A(" + num_key(constant);
    for (auto& [body, c] : kept) {
        node->kids.push_back(body);
        node->coefs.push_back(c);
        node->key += ";" + num_key(c) + "*" + body->key;
    }
    node->key += ")";
    return node;
}

// ---- products ------------------------------------------------------------------------------

namespace {

SExpr make_mul(const Num& coef, std::vector<std::pair<SExpr, int>> fs) {
    std::sort(fs.begin(), fs.end(), [](const auto& x, const auto& y) { return x.first->key < y.first->key; });
    if (coef.is_zero()) return number(Num::exact(0));
    if (fs.empty()) return number(coef);
    if (fs.size() == 1 && fs[0].second == 1 && coef.is_one()) return fs[0].first;
    auto node = fresh(Kind::Mul);
    node->value = coef;
    node->key = "M(" + num_key(coef);
    for (auto& [b, e] : fs) {
        node->kids.push_back(b);
        node->exps.push_back(e);
        node->key += ";" + b->key + "^" + std::to_string(e);
    }
    node->key += ")";
    return node;
}

struct MulAcc {
    Num coef = Num::exact(1);
    std::vector<std::pair<SExpr, int>> fs;
    std::unordered_map<std::string, std::size_t> where;
    bool zero = false;

    void push(const SExpr& e, int k) {
        if (k == 0 || zero) return;
        if (e->kind == Kind::Num) {
            if (e->value.is_zero()) {
                if (k < 0) throw std::domain_error("division by zero");
                zero = true;
                return;
            }
            coef = coef * num_pow(e->value, k);
            return;
        }
        if (e->kind == Kind::Mul) {
            coef = coef * num_pow(e->value, k);
            for (std::size_t i = 0; i < e->kids.size(); ++i) push(e->kids[i], e->exps[i] * k);
            return;
        }
        if (e->kind == Kind::Add && e->value.is_zero() && e->kids.size() == 1) {
            coef = coef * num_pow(e->coefs[0], k);
            push(e->kids[0], k);
            return;
        }
        auto it = where.find(e->key);
        if (it == where.end()) {
            where.emplace(e->key, fs.size());
            fs.emplace_back(e, k);
        } else {
            fs[it->second].second += k;
        }
    }

    SExpr build() {
        if (zero) return number(Num::exact(0));
        std::vector<std::pair<SExpr, int>> kept;
        for (auto& f : fs)
            if (f.second != 0) kept.push_back(f);
        return make_mul(coef, kept);
    }
};

}  // namespace

SExpr mul(const std::vector<SExpr>& ops) {
    MulAcc acc;
    for (const SExpr& op : ops) acc.push(op, 1);
    return acc.build();
}

SExpr power(SExpr base, int e) {
    if (e == 0) return number(Rational(1));
    MulAcc acc;
    acc.push(base, e);
    return acc.build();
}

SExpr sub(SExpr a, SExpr b) { return add({a, neg(b)}); }
SExpr neg(SExpr a) { return mul({number(Rational(-1)), a}); }
SExpr div(SExpr a, SExpr b) { return mul({a, power(b, -1)}); }

// ---- calculus -------------------------------------------------------------------------------

SExpr differentiate(const SExpr& f, int var, int order) {
    if (order < 0) throw std::invalid_argument("negative differentiation order");
    SExpr cur = f;
    for (int k = 0; k < order; ++k) {
        auto d1 = [&](auto&& self, const SExpr& e) -> SExpr {
            switch (e->kind) {
                case Kind::Num:
                    return number(Rational(0));
                case Kind::Var:
                    return number(Rational(e->var == var ? 1 : 0));
                case Kind::Add: {
                    std::vector<SExpr> parts;
                    for (std::size_t i = 0; i < e->kids.size(); ++i)
                        parts.push_back(mul({number(e->coefs[i]), self(self, e->kids[i])}));
                    return add(parts);
                }
                case Kind::Mul: {
                    std::vector<SExpr> parts;
                    for (std::size_t i = 0; i < e->kids.size(); ++i) {
                        SExpr di = self(self, e->kids[i]);
                        if (is_zero(di)) continue;
                        std::vector<SExpr> fs{number(e->value), number(Rational(e->exps[i])), di};
                        for (std::size_t j = 0; j < e->kids.size(); ++j)
                            fs.push_back(power(e->kids[j], e->exps[j] - (i == j ? 1 : 0)));
                        parts.push_back(mul(fs));
                    }
                    return add(parts);
                }
                case Kind::Call: {
                    const SExpr& a = e->kids[0];
                    SExpr da = self(self, a);
                    if (is_zero(da)) return number(Rational(0));
                    SExpr outer;
                    switch (e->fn) {
                        case ElemFn::Exp:
                            outer = e;
                            break;
                        case ElemFn::Sin:
                            outer = call(ElemFn::Cos, a);
                            break;
                        case ElemFn::Cos:
                            outer = neg(call(ElemFn::Sin, a));
                            break;
                        case ElemFn::Log:
                            outer = power(a, -1);
                            break;
                    }
                    return mul({outer, da});
                }
            }
            return number(Rational(0));
        };
        cur = d1(d1, cur);
    }
    return cur;
}

SExpr mixed(const SExpr& f, int n_phi, int n_x) { return differentiate(differentiate(f, kPhi, n_phi), kX, n_x); }

bool depends_on(const SExpr& f, int var) {
    if (f->kind == Kind::Var) return f->var == var;
    for (const SExpr& k : f->kids)
        if (depends_on(k, var)) return true;
    return false;
}

bool is_zero(const SExpr& f) { return f->kind == Kind::Num && f->value.is_zero(); }
bool structurally_equal(const SExpr& a, const SExpr& b) { return a->key == b->key; }

Expr to_expr(const SExpr& f, const std::vector<Expr>& vars) {
    switch (f->kind) {
        case Kind::Num:
            if (f->value.real) throw ExprError("floating literal cannot enter the exact symbolic layer");
            return constant(f->value.q);
        case Kind::Var:
            return vars.at(static_cast<std::size_t>(f->var));
        case Kind::Add: {
            SumBuilder s;
            s.add(to_expr(number(f->value), vars));
            for (std::size_t i = 0; i < f->kids.size(); ++i) {
                if (f->coefs[i].real) throw ExprError("floating literal cannot enter the exact symbolic layer");
                s.add(to_expr(f->kids[i], vars), f->coefs[i].q);
            }
            return s.build();
        }
        case Kind::Mul: {
            std::vector<Expr> parts{to_expr(number(f->value), vars)};
            for (std::size_t i = 0; i < f->kids.size(); ++i) parts.push_back(pow(to_expr(f->kids[i], vars), f->exps[i]));
            return horn::mul(parts);
        }
        case Kind::Call:
            return apply(f->fn, to_expr(f->kids[0], vars));
    }
    return horn::zero();
}

// ---- parsing ----------------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& src, const Grammar& g) : s_(src), g_(g) {}

    SExpr run() {
        skip();
        if (pos_ >= s_.size()) throw ParseError(pos_, "empty expression");
        SExpr e = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError(pos_, std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    SExpr expr() {
        SExpr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = add({lhs, term()});
            else if (eat('-'))
                lhs = sub(lhs, term());
            else
                return lhs;
        }
    }

    SExpr term() {
        SExpr lhs = unary();
        for (;;) {
            if (eat('*')) {
                lhs = mul({lhs, unary()});
            } else if (eat('/')) {
                std::size_t at = pos_;
                SExpr rhs = unary();
                if (is_zero(rhs)) throw ParseError(at, "division by literal zero");
                lhs = div(lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    SExpr unary() {
        if (eat('-')) return neg(unary());
        if (eat('+')) return unary();
        return pow_level();
    }

    SExpr pow_level() {
        SExpr base = primary();
        while (eat('^')) {
            skip();
            std::size_t at = pos_;
            SExpr ex = primary();
            if (ex->kind != Kind::Num || ex->value.real || !ex->value.q.is_integer())
                throw ParseError(at, "exponent must be an integer constant");
            std::int64_t k = ex->value.q.num();
            if (k > 64 || k < -64) throw ParseError(at, "exponent magnitude above 64");
            try {
                base = power(base, static_cast<int>(k));
            } catch (const std::domain_error&) {
                throw ParseError(at, "zero raised to a negative power");
            }
        }
        return base;
    }

    SExpr primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError(pos_, "unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            SExpr e = expr();
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        throw ParseError(pos_, std::string("unexpected '") + c + "'");
    }

    SExpr literal() {
        std::size_t start = pos_;
        std::string digits;
        int frac = 0;
        bool dot = false;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
            if (s_[pos_] == '.') {
                if (dot) throw ParseError(pos_, "second decimal point");
                dot = true;
            } else {
                digits += s_[pos_];
                if (dot) ++frac;
            }
            ++pos_;
        }
        if (digits.empty()) throw ParseError(start, "malformed number");
        int exp10 = 0;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            int sign = 1;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) sign = s_[pos_++] == '-' ? -1 : 1;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                pos_ = save;
            } else {
                int v = 0;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    v = v * 10 + (s_[pos_] - '0');
                    if (v > 400) throw ParseError(start, "exponent too large");
                    ++pos_;
                }
                exp10 = sign * v;
            }
        }
        int scale = exp10 - frac;
        try {
            digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
            if (digits.size() > 18) throw RationalOverflow("long literal");
            Rational q(static_cast<std::int64_t>(std::stoll(digits)));
            q = q * Rational(10).pow(scale);
            return number(q);
        } catch (const RationalOverflow&) {
            return number(Num::approx(std::stod(s_.substr(start, pos_ - start))));
        }
    }

    SExpr name() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        static const std::map<std::string, ElemFn> fns{
            {"exp", ElemFn::Exp}, {"sin", ElemFn::Sin}, {"cos", ElemFn::Cos}, {"log", ElemFn::Log}};
        auto f = fns.find(id);
        if (f != fns.end()) {
            if (!eat('(')) throw ParseError(pos_, "expected '(' after " + id);
            SExpr a = expr();
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            return call(f->second, a);
        }
        for (std::size_t i = 0; i < g_.variables.size(); ++i)
            if (g_.variables[i] == id) return variable(static_cast<int>(i));
        auto p = g_.parameters.find(id);
        if (p != g_.parameters.end()) return number(p->second);
        throw UnknownIdentifier(start, "unknown identifier '" + id + "'");
    }

    const std::string& s_;
    const Grammar& g_;
    std::size_t pos_ = 0;
};

std::string num_text(const Num& n) {
    if (!n.real) return n.q.str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", n.r);
    return buf;
}

std::string num_operand(const Num& n) {
    std::string t = num_text(n);
    bool plain = !num_negative(n) && t.find('/') == std::string::npos;
    return plain ? t : "(" + t + ")";
}

}  // namespace

SExpr parse(const std::string& src, const Grammar& grammar) { return Parser(src, grammar).run(); }

std::string print(const SExpr& e, const Grammar& grammar) {
    switch (e->kind) {
        case Kind::Num:
            return num_text(e->value);
        case Kind::Var:
            return grammar.variables.at(static_cast<std::size_t>(e->var));
        case Kind::Call:
            return std::string(fn_name(e->fn)) + "(" + print(e->kids[0], grammar) + ")";
        case Kind::Mul: {
            std::string out;
            if (!e->value.is_one()) out = num_operand(e->value);
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (!out.empty()) out += "*";
                const SExpr& b = e->kids[i];
                std::string bt = print(b, grammar);
                if (b->kind == Kind::Add || b->kind == Kind::Mul) bt = "(" + bt + ")";
                out += bt;
                int k = e->exps[i];
                if (k != 1) out += k < 0 ? "^(" + std::to_string(k) + ")" : "^" + std::to_string(k);
            }
            return out;
        }
        case Kind::Add: {
            std::string out;
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                Num c = e->coefs[i];
                bool negative = num_negative(c);
                if (negative) c = num_neg(c);
                if (i == 0)
                    out += negative ? "-" : "";
                else
                    out += negative ? " - " : " + ";
                std::string body = print(e->kids[i], grammar);
                if (e->kids[i]->kind == Kind::Add) body = "(" + body + ")";
                out += c.is_one() ? body : num_operand(c) + "*" + body;
            }
            if (!e->value.is_zero()) {
                Num c = e->value;
                bool negative = num_negative(c);
                if (negative) c = num_neg(c);
                out += (negative ? " - " : " + ") + num_operand(c);
            }
            return out;
        }
    }
    return "?";
}

}  // namespace horn::dsl
