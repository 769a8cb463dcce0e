#pragma once

#include <array>
#include <cmath>

// Forward-mode AD via nested dual numbers. Dual<Dual<double>> carries two
// independent infinitesimals, so seeding each level with a different
// coordinate axis yields one mixed partial per evaluation.

namespace anisoflow::detail {

template <class T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(double c) : v(c), d(0.0) {}  // NOLINT: constants promote implicitly
    Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
template <class T>
Dual<T> operator*(double s, const Dual<T>& a) { return {s * a.v, s * a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, double s) { return {a.v * s, a.d * s}; }
template <class T>
Dual<T> operator+(const Dual<T>& a, double s) { return {a.v + s, a.d}; }
template <class T>
Dual<T> operator+(double s, const Dual<T>& a) { return {s + a.v, a.d}; }
template <class T>
Dual<T> operator-(double s, const Dual<T>& a) { return {s - a.v, -a.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, double s) { return {a.v / s, a.d / s}; }

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
}

template <class T>
Dual<T> pow(const Dual<T>& a, double e) {
    using std::pow;
    return {pow(a.v, e), e * pow(a.v, e - 1.0) * a.d};
}

template <int K>
struct NestedDualT {
    using type = Dual<typename NestedDualT<K - 1>::type>;
};
template <>
struct NestedDualT<0> {
    using type = double;
};
template <int K>
using NestedDual = typename NestedDualT<K>::type;

/// Variable with value x whose level-L infinitesimal is seeded by seed[L].
template <int K>
NestedDual<K> seeded(double x, const std::array<bool, 4>& seed) {
    if constexpr (K == 0) {
        return x;
    } else {
        return NestedDual<K>(seeded<K - 1>(x, seed), NestedDual<K - 1>(seed[K - 1] ? 1.0 : 0.0));
    }
}

/// Coefficient of eps_1 * ... * eps_K.
template <int K>
double mixed_part(const NestedDual<K>& f) {
    if constexpr (K == 0) {
        return f;
    } else {
        return mixed_part<K - 1>(f.d);
    }
}

}  // namespace anisoflow::detail
