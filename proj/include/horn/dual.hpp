#pragma once

#include <cmath>

namespace horn {

/// Forward-mode dual number. Nesting Dual<Dual<double>> yields mixed second derivatives.
template <class T>
struct Dual {
    T v{};
    T d{};
    Dual() = default;
    Dual(double x) : v(x), d(0.0) {}  // NOLINT(implicit)
    Dual(T value, T deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T inv = T(1.0) / b.v;
        return Dual(a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv);
    }
    friend Dual operator-(const Dual& a) { return Dual(-a.v, -a.d); }
};

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T>
Dual<T> exp(const Dual<T>& x) { using std::exp; T e = exp(x.v); return Dual<T>(e, e * x.d); }
template <class T>
Dual<T> log(const Dual<T>& x) { using std::log; return Dual<T>(log(x.v), x.d / x.v); }
template <class T>
Dual<T> sin(const Dual<T>& x) { using std::sin; using std::cos; return Dual<T>(sin(x.v), cos(x.v) * x.d); }
template <class T>
Dual<T> cos(const Dual<T>& x) { using std::sin; using std::cos; return Dual<T>(cos(x.v), -(sin(x.v) * x.d)); }
template <class T>
Dual<T> sqrt(const Dual<T>& x) { using std::sqrt; T s = sqrt(x.v); return Dual<T>(s, x.d / (T(2.0) * s)); }

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

/// Integer power usable with plain doubles and dual numbers.
template <class T>
T ipow(const T& x, int e) {
    T base = e < 0 ? T(1.0) / x : x;
    T out(1.0);
    for (int i = 0; i < (e < 0 ? -e : e); ++i) out = out * base;
    return out;
}

}  // namespace horn
