#pragma once

// Test-only reference implementations: central finite differences and a
// plain-double spray built straight from the field jets. Nothing here calls the
// connection or curvature code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "tidal/fields.hpp"
#include "tidal/scenario.hpp"
#include "tidal/tensor.hpp"

namespace tidal::testing {

inline double rel_diff(double a, double b, double floor = 1e-14) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

template <class T>
double max_diff(const T& a, const T& b) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(a - b);
  } else {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, max_diff(a[k], b[k]));
    return m;
  }
}

template <class T>
double max_mag(const T& a) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(a);
  } else {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, max_mag(v));
    return m;
  }
}

/// max|a − b| / max(max|a|, max|b|, floor).
template <class T>
double rel_err(const T& a, const T& b, double floor = 1e-14) {
  return max_diff(a, b) / std::max({max_mag(a), max_mag(b), floor});
}

template <class T>
T axpy(const T& a, double s, const T& b) {
  if constexpr (std::is_arithmetic_v<T>) {
    return a + s * b;
  } else {
    T out = a;
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = axpy(a[k], s, b[k]);
    return out;
  }
}

template <class T>
T scaled(const T& a, double s) {
  if constexpr (std::is_arithmetic_v<T>) {
    return a * s;
  } else {
    T out = a;
    for (auto& v : out) v = scaled(v, s);
    return out;
  }
}

/// Fourth-order central difference of f along direction `k` of a Vec4 argument.
template <class F>
auto central(const F& f, const Vec4<>& at, int k, double h) {
  auto shifted = [&](double d) {
    Vec4<> p = at;
    p[k] += d;
    return f(p);
  };
  const auto near = axpy(shifted(h), -1.0, shifted(-h));
  const auto far = axpy(shifted(2 * h), -1.0, shifted(-2 * h));
  return scaled(axpy(scaled(near, 8.0), -1.0, far), 1.0 / (12.0 * h));
}

/// Spray G^i = ½γ^i_jk y^j y^k − (α/2)‖y‖ F^i_j y^j evaluated with plain doubles.
inline Vec4<> spray_oracle(const MetricField& g, const PotentialField& A, double alpha, const Vec4<>& x,
                           const Vec4<>& y) {
  const auto s = sample_fields(g, A, x);
  const double q = quadratic(s.g, y, y);
  const double n = std::sqrt(std::abs(q));
  const auto Fm = mat_mul(s.ginv, s.F);
  Vec4<> G{};
  for (int i = 0; i < kDim; ++i) {
    double gyy = 0.0, fy = 0.0;
    for (int j = 0; j < kDim; ++j) {
      fy += Fm[i][j] * y[j];
      for (int k = 0; k < kDim; ++k) gyy += s.gamma[i][j][k] * y[j] * y[k];
    }
    G[i] = 0.5 * gyy - 0.5 * alpha * n * fy;
  }
  return G;
}

struct RandomPhase {
  Vec4<> x, y;
};

/// Reproducible phase points inside a scenario's sampling box, independent of the library sampler.
inline std::vector<RandomPhase> random_phase_points(const Scenario& sc, std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  std::vector<RandomPhase> out;
  while (out.size() < count) {
    RandomPhase p;
    for (int i = 0; i < kDim; ++i)
      p.x[i] = sc.sampling.lower[i] + u(rng) * (sc.sampling.upper[i] - sc.sampling.lower[i]);
    if (g.chart_violation(p.x) || A.chart_violation(p.x)) continue;
    const auto gm = g.evaluate(p.x).g;
    // timelike: spatial part small against the time component
    for (int i = 1; i < kDim; ++i) p.y[i] = (2.0 * u(rng) - 1.0) * 0.5 / std::sqrt(gm[i][i]);
    p.y[0] = (0.8 + 1.2 * u(rng)) / std::sqrt(-gm[0][0]);
    if (quadratic(gm, p.y, p.y) >= -0.05) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace tidal::testing
