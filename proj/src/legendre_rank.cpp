#include <algorithm>
#include <unordered_set>

#include "horn/legendre.hpp"

namespace horn {

std::vector<JetSymbol> covariant_jet_coordinates() {
    std::vector<JetSymbol> out;
    for (int m = 0; m < kDim; ++m) out.push_back(JetSymbol::coord(m));
    for (int order = 0; order <= 3; ++order) {
        auto g = metric_coordinates(order);
        out.insert(out.end(), g.begin(), g.end());
    }
    for (int order = 0; order <= 3; ++order) {
        auto s = scalar_coordinates(order, true);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::vector<JetSymbol> gauge_directions() {
    std::vector<JetSymbol> out = metric_coordinates(2);
    auto g3 = metric_coordinates(3);
    auto s3 = scalar_coordinates(3, true);
    out.insert(out.end(), g3.begin(), g3.end());
    out.insert(out.end(), s3.begin(), s3.end());
    return out;
}

LegendreJacobian::LegendreJacobian(const LagrangianSpec& spec, bool extended) : spec_(spec) {
    LegendreMap fl = extended ? extended_legendre(spec) : restricted_legendre(spec);
    std::vector<Expr> roots = fl.values;
    if (extended) roots.push_back(fl.extended);
    outputs_ = roots.size();
    momenta_ = Program(roots, &spec_);
    columns_ = covariant_jet_coordinates();
}

Eigen::MatrixXd LegendreJacobian::matrix(const JetPoint<double>& jp) const {
    const std::size_t base_rows = 15;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(base_rows + outputs_),
                                                static_cast<Eigen::Index>(columns_.size()));
    std::vector<JetSymbol> base;
    for (int m = 0; m < kDim; ++m) base.push_back(JetSymbol::coord(m));
    auto g0 = metric_coordinates(0);
    base.insert(base.end(), g0.begin(), g0.end());
    base.push_back(JetSymbol::phi());

    std::unordered_set<SymId> used(momenta_.inputs().begin(), momenta_.inputs().end());
    const JetPoint<D1> seedless = jp.convert<D1>();
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const JetSymbol& col = columns_[c];
        const auto ci = static_cast<Eigen::Index>(c);
        for (std::size_t r = 0; r < base.size(); ++r)
            if (base[r] == col) jac(static_cast<Eigen::Index>(r), ci) = 1.0;
        const bool metric_value = col.kind == SymKind::Metric && col.derivs().empty();
        if (!metric_value && !used.count(intern(col))) continue;
        JetPoint<D1> seeded = seedless;
        SymId id = intern(col);
        seeded.set(id, D1(jp.get(id), 1.0));
        if (metric_value) seeded.complete();
        auto vals = momenta_.run(seeded);
        for (std::size_t r = 0; r < outputs_; ++r) jac(static_cast<Eigen::Index>(base_rows + r), ci) = vals[r].d;
    }
    return jac;
}

RankResult LegendreJacobian::rank_at(const JetPoint<double>& jp, double threshold) const {
    Eigen::MatrixXd jac = matrix(jp);
    RankResult out;
    auto gauge = gauge_directions();
    for (std::size_t c = 0; c < columns_.size(); ++c)
        if (std::find(gauge.begin(), gauge.end(), columns_[c]) != gauge.end())
            out.kernel_max = std::max(out.kernel_max, jac.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    double cut = threshold * (sv.size() ? sv(0) : 0.0);
    for (double s : out.singular_values)
        if (s > cut) ++out.rank;
    return out;
}

int legendre_rank_numeric(const LagrangianSpec& spec, const JetPoint<double>& jp, double threshold) {
    return LegendreJacobian(spec).rank_at(jp, threshold).rank;
}

}  // namespace horn
