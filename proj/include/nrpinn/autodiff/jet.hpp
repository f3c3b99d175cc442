#pragma once

#include "nrpinn/autodiff/tape.hpp"

#include <array>
#include <cmath>

namespace nrpinn::ad {

inline constexpr int kMaxDirs = 2;

/// Second-order Taylor coefficients along up to kMaxDirs input axes: the value, the first
/// derivative and the pure second derivative per axis. Mixed partials are not carried.
/// T is double for plain evaluation or Var to make every coefficient differentiable.
template <class T>
struct Jet2 {
    T value{};
    std::array<T, kMaxDirs> d1{};
    std::array<T, kMaxDirs> d2{};
    int dirs = 0;

    static Jet2 constant(T v, int dirs) {
        Jet2 j;
        j.value = v;
        j.dirs = dirs;
        return j;
    }

    /// Identity function of the coordinate tracked as direction `dir`.
    static Jet2 variable(T v, int dir, int dirs) {
        Jet2 j = constant(v, dirs);
        j.d1[dir] = T(1.0);
        return j;
    }
};

/// Chain rule for a unary map with derivatives f1 = f'(v), f2 = f''(v).
template <class T>
Jet2<T> chain(const Jet2<T> &a, T f0, T f1, T f2) {
    Jet2<T> r = Jet2<T>::constant(f0, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = f1 * a.d1[k];
        r.d2[k] = f2 * a.d1[k] * a.d1[k] + f1 * a.d2[k];
    }
    return r;
}

template <class T>
Jet2<T> operator+(const Jet2<T> &a, const Jet2<T> &b) {
    Jet2<T> r = Jet2<T>::constant(a.value + b.value, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = a.d1[k] + b.d1[k];
        r.d2[k] = a.d2[k] + b.d2[k];
    }
    return r;
}

template <class T>
Jet2<T> operator-(const Jet2<T> &a, const Jet2<T> &b) {
    Jet2<T> r = Jet2<T>::constant(a.value - b.value, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = a.d1[k] - b.d1[k];
        r.d2[k] = a.d2[k] - b.d2[k];
    }
    return r;
}

template <class T>
Jet2<T> operator-(const Jet2<T> &a) {
    Jet2<T> r = Jet2<T>::constant(-a.value, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = -a.d1[k];
        r.d2[k] = -a.d2[k];
    }
    return r;
}

template <class T>
Jet2<T> operator*(const Jet2<T> &a, const Jet2<T> &b) {
    Jet2<T> r = Jet2<T>::constant(a.value * b.value, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = a.d1[k] * b.value + a.value * b.d1[k];
        r.d2[k] = a.d2[k] * b.value + T(2.0) * a.d1[k] * b.d1[k] + a.value * b.d2[k];
    }
    return r;
}

template <class T>
Jet2<T> operator/(const Jet2<T> &a, const Jet2<T> &b) {
    // a / b = a * (1/b); the reciprocal is a unary map with f' = -1/b^2, f'' = 2/b^3.
    const T inv = T(1.0) / b.value;
    return a * chain(b, inv, -inv * inv, T(2.0) * inv * inv * inv);
}

template <class T>
Jet2<T> operator*(const Jet2<T> &a, const T &s) {
    Jet2<T> r = Jet2<T>::constant(a.value * s, a.dirs);
    for (int k = 0; k < a.dirs; ++k) {
        r.d1[k] = a.d1[k] * s;
        r.d2[k] = a.d2[k] * s;
    }
    return r;
}

template <class T>
Jet2<T> operator*(const T &s, const Jet2<T> &a) {
    return a * s;
}

template <class T>
Jet2<T> operator+(const Jet2<T> &a, const T &s) {
    Jet2<T> r = a;
    r.value = a.value + s;
    return r;
}

template <class T>
Jet2<T> sin(const Jet2<T> &a) {
    using std::cos;
    using std::sin;
    const T s = sin(a.value);
    return chain(a, s, cos(a.value), -s);
}

template <class T>
Jet2<T> cos(const Jet2<T> &a) {
    using std::cos;
    using std::sin;
    const T c = cos(a.value);
    return chain(a, c, -sin(a.value), -c);
}

template <class T>
Jet2<T> tanh(const Jet2<T> &a) {
    using std::tanh;
    const T t = tanh(a.value);
    const T s1 = T(1.0) - t * t;
    return chain(a, t, s1, T(-2.0) * t * s1);
}

template <class T>
Jet2<T> exp(const Jet2<T> &a) {
    using std::exp;
    const T e = exp(a.value);
    return chain(a, e, e, e);
}

template <class T>
Jet2<T> sech(const Jet2<T> &a) {
    using std::tanh;
    using nrpinn::sech;
    // sech' = -sech tanh, sech'' = sech (tanh^2 - sech^2)
    const T s = sech(a.value);
    const T t = tanh(a.value);
    return chain(a, s, -s * t, s * (t * t - s * s));
}

template <class T>
Jet2<T> pow(const Jet2<T> &a, int n) {
    using std::pow;
    if (n == 0) {
        return Jet2<T>::constant(T(1.0), a.dirs);
    }
    const T p1 = n == 1 ? T(1.0) : T(pow(a.value, n - 1));
    const T p2 = (n == 1 || n == 2) ? T(1.0) : T(pow(a.value, n - 2));
    return chain(a, p1 * a.value, T(static_cast<double>(n)) * p1,
                 T(static_cast<double>(n * (n - 1))) * p2);
}

}  // namespace nrpinn::ad
