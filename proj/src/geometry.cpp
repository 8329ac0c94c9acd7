#include "horn/geometry.hpp"

#include <string>

namespace horn {

namespace {
std::string key(const char* tag, std::initializer_list<int> idx) {
    std::string k = tag;
    for (int i : idx) k += static_cast<char>('0' + i);
    return k;
}
}  // namespace

Expr christoffel(int up, int a, int b) {
    if (a > b) std::swap(a, b);
    return memo_get_or_build(key("geo:chr:", {up, a, b}), [&] {
        SumBuilder s;
        for (int r = 0; r < kDim; ++r) {
            Expr bracket = add({g(b, r, {a}), g(r, a, {b}), neg(g(a, b, {r}))});
            s.add(mul(ginv(up, r), bracket), Rational(1, 2));
        }
        return s.build();
    });
}

Expr ricci_tensor(int a, int b) {
    if (a > b) std::swap(a, b);
    return memo_get_or_build(key("geo:ric:", {a, b}), [&] {
        SumBuilder s;
        for (int c = 0; c < kDim; ++c) {
            s.add(total_derivative(christoffel(c, a, b), c));
            s.add(total_derivative(christoffel(c, c, b), a), -1);
            for (int d = 0; d < kDim; ++d) {
                s.add(mul(christoffel(c, a, b), christoffel(d, d, c)));
                s.add(mul(christoffel(c, d, b), christoffel(d, a, c)), -1);
            }
        }
        return s.build();
    });
}

Expr ricci_scalar() {
    return memo_get_or_build("geo:R", [] {
        SumBuilder s;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) s.add(mul(ginv(a, b), ricci_tensor(a, b)));
        return s.build();
    });
}

Expr box_phi() {
    return memo_get_or_build("geo:box", [] {
        SumBuilder s;
        for (int m = 0; m < kDim; ++m)
            for (int n = 0; n < kDim; ++n) s.add(mul(ginv(m, n), phi_cov({m, n})));
        return s.build();
    });
}

Expr box_phi_partial() {
    return memo_get_or_build("geo:box_partial", [] {
        SumBuilder s;
        for (int m = 0; m < kDim; ++m)
            for (int n = 0; n < kDim; ++n) {
                SumBuilder hess;
                hess.add(phi({m, n}));
                for (int c = 0; c < kDim; ++c) hess.add(mul(phi({c}), christoffel(c, m, n)), -1);
                s.add(mul(ginv(m, n), hess.build()));
            }
        return s.build();
    });
}

}  // namespace horn
