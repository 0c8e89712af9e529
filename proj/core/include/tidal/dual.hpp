#pragma once

// Forward-mode dual numbers with a fixed number of infinitesimal directions.
//
// Dual<T, N> carries a value and N first partials. Nesting Dual<Dual<double, N>, M>
// yields mixed second partials without truncation error; the geometry pipeline
// nests up to three levels (phase-space partials over fiber Hessians).

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <type_traits>

namespace tidal {

template <class T, std::size_t N>
struct Dual {
  using value_type = T;
  static constexpr std::size_t size = N;

  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;

  template <class U>
    requires std::convertible_to<U, T>
  constexpr Dual(const U& c) : v(static_cast<T>(c)) {}  // NOLINT(google-explicit-constructor)

  static constexpr Dual variable(const T& value, std::size_t direction) {
    Dual out(value);
    out.d[direction] = T(1.0);
    return out;
  }

  constexpr Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t k = 0; k < N; ++k) d[k] += o.d[k];
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t k = 0; k < N; ++k) d[k] -= o.d[k];
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    for (std::size_t k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
    v *= o.v;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.v;
    v *= inv;
    for (std::size_t k = 0; k < N; ++k) d[k] = (d[k] - v * o.d[k]) * inv;
    return *this;
  }
  constexpr Dual& operator*=(double s) {
    v *= s;
    for (auto& dk : d) dk *= s;
    return *this;
  }
};

template <class>
struct is_dual : std::false_type {};
template <class T, std::size_t N>
struct is_dual<Dual<T, N>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <class T, std::size_t N>
constexpr Dual<T, N> operator-(Dual<T, N> a) {
  a.v = -a.v;
  for (auto& dk : a.d) dk = -dk;
  return a;
}

template <class T, std::size_t N>
constexpr Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) {
  return a *= b;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) {
  return a /= b;
}

// Mixed operations with plain doubles at any nesting depth.
template <class T, std::size_t N>
constexpr Dual<T, N> operator+(Dual<T, N> a, double s) {
  a.v += s;
  return a;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator+(double s, Dual<T, N> a) {
  a.v += s;
  return a;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator-(Dual<T, N> a, double s) {
  a.v -= s;
  return a;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator-(double s, const Dual<T, N>& a) {
  return -a + s;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator*(Dual<T, N> a, double s) {
  return a *= s;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator*(double s, Dual<T, N> a) {
  return a *= s;
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator/(Dual<T, N> a, double s) {
  return a *= (1.0 / s);
}
template <class T, std::size_t N>
constexpr Dual<T, N> operator/(double s, const Dual<T, N>& a) {
  return Dual<T, N>(s) / a;
}

template <class T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  Dual<T, N> out;
  out.v = sqrt(a.v);
  const T half_inv = T(0.5) / out.v;
  for (std::size_t k = 0; k < N; ++k) out.d[k] = a.d[k] * half_inv;
  return out;
}

template <class T, std::size_t N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  Dual<T, N> out;
  out.v = sin(a.v);
  const T c = cos(a.v);
  for (std::size_t k = 0; k < N; ++k) out.d[k] = a.d[k] * c;
  return out;
}

template <class T, std::size_t N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  Dual<T, N> out;
  out.v = cos(a.v);
  const T s = -sin(a.v);
  for (std::size_t k = 0; k < N; ++k) out.d[k] = a.d[k] * s;
  return out;
}

/// Innermost real value of a (possibly nested) dual.
constexpr double real_part(double x) { return x; }
template <class T, std::size_t N>
constexpr double real_part(const Dual<T, N>& x) {
  return real_part(x.v);
}

}  // namespace tidal
