#include "horn/chart.hpp"

#include <algorithm>
#include <stdexcept>

#include "horn/geometry.hpp"

namespace horn {

namespace {

std::string key(const char* tag, const std::vector<int>& d) {
    std::string k = tag;
    for (int i : d) k += static_cast<char>('0' + i);
    return k;
}

std::vector<int> sorted(std::vector<int> d) {
    std::sort(d.begin(), d.end());
    return d;
}

Expr phi_jet(const std::vector<int>& d) { return sym(JetSymbol::phi(d)); }

}  // namespace

Expr covariant_jet_in_partial(const std::vector<int>& d_in) {
    std::vector<int> d = sorted(d_in);
    if (d.size() == 2) {
        return memo_get_or_build(key("chart:fwd:", d), [&] {
            SumBuilder s;
            s.add(phi_jet(d));
            for (int c = 0; c < kDim; ++c) s.add(mul(phi({c}), christoffel(c, d[0], d[1])), -1);
            return s.build();
        });
    }
    if (d.size() == 3) {
        return memo_get_or_build(key("chart:fwd:", d), [&] {
            const int m = d[0], n = d[1], l = d[2];
            SumBuilder s;
            s.add(total_derivative(covariant_jet_in_partial({m, n}), l));
            for (int c = 0; c < kDim; ++c) {
                s.add(mul(christoffel(c, l, m), covariant_jet_in_partial({c, n})), -1);
                s.add(mul(christoffel(c, l, n), covariant_jet_in_partial({m, c})), -1);
            }
            return s.build();
        });
    }
    throw ExprError("covariant scalar jets exist for orders 2 and 3 only");
}

Expr partial_jet_in_covariant(const std::vector<int>& d_in) {
    std::vector<int> d = sorted(d_in);
    if (d.size() == 2) {
        return memo_get_or_build(key("chart:inv:", d), [&] {
            SumBuilder s;
            s.add(phi_cov(d));
            for (int c = 0; c < kDim; ++c) s.add(mul(phi({c}), christoffel(c, d[0], d[1])));
            return s.build();
        });
    }
    if (d.size() == 3) {
        return memo_get_or_build(key("chart:inv:", d), [&] {
            // phi_{,mnl} = phi_{;mnl} + (phi_{,mnl} - forward), and the bracket only holds jets of order <= 2.
            Expr rest = sub(phi_jet(d), covariant_jet_in_partial(d));
            return add(phi_cov(d), to_covariant(rest));
        });
    }
    throw ExprError("partial scalar jets of order " + std::to_string(d.size()) + " have no covariant image");
}

Expr to_covariant(Expr e) {
    if (max_scalar_order(e) < 2 || !contains_kind(e, SymKind::PhiPartial)) return e;
    Substitution s;
    for (SymId id : free_symbols(e)) {
        const JetSymbol& js = symbol_of(id);
        if (js.kind != SymKind::PhiPartial || js.n < 2) continue;
        if (js.n > 3) throw ExprError("cannot move " + js.str() + " into the covariant chart");
        s.symbols[id] = partial_jet_in_covariant(js.derivs());
    }
    return s.symbols.empty() ? e : substitute(e, s);
}

Expr to_partial(Expr e) {
    if (!contains_kind(e, SymKind::PhiCov)) return e;
    Substitution s;
    for (SymId id : free_symbols(e)) {
        const JetSymbol& js = symbol_of(id);
        if (js.kind == SymKind::PhiCov) s.symbols[id] = covariant_jet_in_partial(js.derivs());
    }
    return substitute(e, s);
}

namespace {

class CovariantRule final : public JetRule {
public:
    int rule_id() const override { return 1; }
    std::optional<Expr> derive_symbol(const JetSymbol& s, int tau) const override {
        if (s.kind == SymKind::PhiPartial && s.n == 1) {
            const int m = s.idx[0];
            return memo_get_or_build(key("chart:D1:", {m, tau}), [&] {
                SumBuilder out;
                out.add(phi_cov({m, tau}));
                for (int c = 0; c < kDim; ++c) out.add(mul(phi({c}), christoffel(c, m, tau)));
                return out.build();
            });
        }
        if (s.kind == SymKind::PhiPartial && s.n >= 2)
            throw ExprError("partial scalar jet " + s.str() + " inside a covariant-chart expression");
        if (s.kind == SymKind::PhiCov) {
            if (s.n >= 3) throw OrderOverflow("total derivative of a third covariant jet");
            std::vector<int> d = s.derivs();
            d.push_back(tau);
            return memo_get_or_build(key("chart:D2:", d), [&] {
                return to_covariant(total_derivative(covariant_jet_in_partial(s.derivs()), tau));
            });
        }
        return std::nullopt;
    }
};

}  // namespace

const JetRule& covariant_rule() {
    static const CovariantRule rule;
    return rule;
}

Expr total_cov(Expr e, int tau) { return total_derivative(e, tau, &covariant_rule()); }

const char* block_name(Block b) {
    switch (b) {
        case Block::HessianMetric:
            return "dphi;mn/dg_ab";
        case Block::HessianMetric1:
            return "dphi;mn/dg_ab,c";
        case Block::HessianGradient:
            return "dphi;mn/dphi,c";
        case Block::ThirdGradient:
            return "dphi;mnl/dphi,c";
        case Block::ThirdHessian:
            return "dphi;mnl/dphi,cd";
        case Block::ThirdMetric:
            return "dphi;mnl/dg_ab";
        case Block::ThirdMetric1:
            return "dphi;mnl/dg_ab,c";
        case Block::ThirdMetric2:
            return "dphi;mnl/dg_ab,cd";
    }
    return "?";
}

std::vector<Block> all_blocks() {
    return {Block::HessianMetric, Block::HessianMetric1, Block::HessianGradient, Block::ThirdGradient,
            Block::ThirdHessian,  Block::ThirdMetric,    Block::ThirdMetric1,    Block::ThirdMetric2};
}

std::vector<JetSymbol> block_targets(Block b) {
    bool second = b == Block::HessianMetric || b == Block::HessianMetric1 || b == Block::HessianGradient;
    return scalar_coordinates(second ? 2 : 3, true);
}

std::vector<JetSymbol> block_sources(Block b) {
    switch (b) {
        case Block::HessianMetric:
        case Block::ThirdMetric:
            return metric_coordinates(0);
        case Block::HessianMetric1:
        case Block::ThirdMetric1:
            return metric_coordinates(1);
        case Block::ThirdMetric2:
            return metric_coordinates(2);
        case Block::HessianGradient:
        case Block::ThirdGradient:
            return scalar_coordinates(1, false);
        case Block::ThirdHessian:
            return scalar_coordinates(2, false);
    }
    throw std::invalid_argument("unknown Jacobian block");
}

Expr jacobian_block(Block b, const JetSymbol& target, const JetSymbol& source) {
    auto targets = block_targets(b);
    auto sources = block_sources(b);
    if (std::find(targets.begin(), targets.end(), target) == targets.end() ||
        std::find(sources.begin(), sources.end(), source) == sources.end())
        throw std::invalid_argument(std::string("coordinates outside block ") + block_name(b));
    return partial(covariant_jet_in_partial(target.derivs()), source);
}

PushedVector pushforward_basis(const JetSymbol& source) {
    bool known = source.kind == SymKind::Metric ? source.n <= 3 : source.kind == SymKind::PhiPartial && source.n <= 3;
    if (!known) throw std::invalid_argument("no pushforward for basis vector d/d" + source.str());
    PushedVector v{source, {}};
    if (source.kind == SymKind::PhiPartial && source.n >= 2) {
        // Partial second and third jets are not covariant-chart coordinates; only the image directions remain.
    } else {
        v.components.emplace_back(source, one());
    }
    for (int order = 2; order <= 3; ++order)
        for (const JetSymbol& t : scalar_coordinates(order, true)) {
            Expr c = partial(covariant_jet_in_partial(t.derivs()), source);
            if (!is_zero(c)) v.components.emplace_back(t, to_covariant(c));
        }
    return v;
}

Expr apply_vector(const PushedVector& v, Expr e) {
    SumBuilder s;
    for (const auto& [coord, coef] : v.components) {
        Expr d = partial(e, coord);
        if (!is_zero(d)) s.add(mul(coef, d));
    }
    return s.build();
}

}  // namespace horn
