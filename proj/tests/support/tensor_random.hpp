#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "horn/tensor.hpp"

namespace horn::testing {

// Fully contracted random scalar built from a small vocabulary of index patterns.
// Each term carries at most `max_dummies` summed labels so component expansion stays cheap.
inline tensor::TensorExpr random_tensor_scalar(std::mt19937_64& rng, int max_dummies = 5) {
    using namespace horn::tensor;
    static const std::vector<std::string> pool = {"a", "b", "c", "m", "n", "r", "s", "alpha", "beta", "mu", "nu"};
    auto pick = [&](int k) {
        std::vector<std::string> l = pool;
        std::shuffle(l.begin(), l.end(), rng);
        l.resize(static_cast<std::size_t>(k));
        return l;
    };
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    struct Pattern {
        int dummies;
        TensorExpr expr;
    };
    auto pattern = [&]() -> Pattern {
        const auto l = pick(4);
        const std::string &x = l[0], &y = l[1], &z = l[2], &w = l[3];
        switch (uni(0, 10)) {
            case 0: return {2, inverse_metric(up(x), up(y)) * scalar({down(x)}) * scalar({down(y)})};
            case 1: return {2, inverse_metric(up(x), up(y)) * covariant_scalar({down(y), down(x)})};
            case 2:
                return {4, inverse_metric(up(x), up(y)) * metric(down(z), down(y)) * inverse_metric(up(w), up(z)) *
                               scalar({down(w)}) * scalar({down(x)})};
            case 3: return {3, delta(up(x), down(y)) * inverse_metric(up(z), up(y)) * scalar({down(x)}) * scalar({down(z)})};
            case 4: return {2, inverse_metric(up(y), up(x)) * metric(down(x), down(y))};
            case 5:
                return {4, inverse_metric(up(x), up(z)) * inverse_metric(up(y), up(w)) * metric(down(y), down(x), {down(z)}) *
                               scalar({down(w)})};
            case 6:
                return {4, inverse_metric(up(x), up(y)) * inverse_metric(up(z), up(w)) *
                               covariant_scalar({down(x), down(z)}) * covariant_scalar({down(w), down(y)})};
            case 7: return {1, delta(up(x), down(x))};
            case 8: return {2, inverse_metric(up(x), up(y)) * scalar({down(x), down(y)})};
            case 9: return {0, uni(0, 1) ? sqrt_det() : scalar()};
            default: {
                ScalarFn f;
                f.name = uni(0, 1) ? FnName::G2 : FnName::G3;
                f.d_phi = static_cast<std::uint8_t>(uni(0, 1));
                f.d_x = static_cast<std::uint8_t>(uni(0, 1));
                return {0, model(f)};
            }
        }
    };

    TensorExpr sum;
    const int terms = uni(1, 4);
    for (int t = 0; t < terms; ++t) {
        TensorExpr term = number(Rational(uni(-6, 6), uni(1, 4)));
        int used = 0;
        for (int f = uni(1, 3); f > 0; --f) {
            Pattern p = pattern();
            if (used + p.dummies > max_dummies) continue;
            used += p.dummies;
            term = term * p.expr;
        }
        sum = sum + term;
    }
    return sum;
}

}  // namespace horn::testing
