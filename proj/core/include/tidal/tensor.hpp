#pragma once

// Fixed 4-D tensor arithmetic.
//
// Storage is row-major nested std::array. Index order follows the written name with
// the contravariant index first: E^i_j -> E[i][j], γ^i_jk -> gamma[i][j][k],
// r_j^i_kl -> r[i][j][k][l]. Partial-derivative indices are appended last:
// ∂_k g_ij -> dg[i][j][k].

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "tidal/dual.hpp"
#include "tidal/errors.hpp"

namespace tidal {

inline constexpr int kDim = 4;

template <class T = double>
using Vec4 = std::array<T, 4>;
template <class T = double>
using Mat4 = std::array<Vec4<T>, 4>;
template <class T = double>
using Tensor3 = std::array<Mat4<T>, 4>;
template <class T = double>
using Tensor4 = std::array<Tensor3<T>, 4>;

template <class T>
Mat4<T> zero_mat() {
  Mat4<T> m;
  for (auto& row : m) row.fill(T(0.0));
  return m;
}

template <class T>
Tensor3<T> zero_t3() {
  Tensor3<T> t;
  for (auto& m : t) m = zero_mat<T>();
  return t;
}

inline Mat4<> identity_mat() {
  Mat4<> m = zero_mat<double>();
  for (int i = 0; i < kDim; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4<> diag(double a, double b, double c, double d) {
  Mat4<> m = zero_mat<double>();
  m[0][0] = a;
  m[1][1] = b;
  m[2][2] = c;
  m[3][3] = d;
  return m;
}

template <class T>
Vec4<T> mat_vec(const Mat4<T>& m, const Vec4<T>& v) {
  Vec4<T> out;
  for (int i = 0; i < kDim; ++i) {
    T s(0.0);
    for (int j = 0; j < kDim; ++j) s += m[i][j] * v[j];
    out[i] = s;
  }
  return out;
}

template <class T>
T dot(const Vec4<T>& a, const Vec4<T>& b) {
  T s(0.0);
  for (int i = 0; i < kDim; ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T quadratic(const Mat4<T>& g, const Vec4<T>& a, const Vec4<T>& b) {
  return dot(a, mat_vec(g, b));
}

template <class T>
Mat4<T> mat_mul(const Mat4<T>& a, const Mat4<T>& b) {
  Mat4<T> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      T s(0.0);
      for (int k = 0; k < kDim; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

template <class T>
Mat4<T> transpose(const Mat4<T>& a) {
  Mat4<T> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out[i][j] = a[j][i];
  return out;
}

template <class T>
T trace(const Mat4<T>& a) {
  T s(0.0);
  for (int i = 0; i < kDim; ++i) s += a[i][i];
  return s;
}

/// Cofactor inverse; works for any field-like T (double or Dual).
template <class T>
Mat4<T> inverse(const Mat4<T>& m, T* determinant = nullptr) {
  const auto& a = m;
  T s0 = a[0][0] * a[1][1] - a[1][0] * a[0][1];
  T s1 = a[0][0] * a[1][2] - a[1][0] * a[0][2];
  T s2 = a[0][0] * a[1][3] - a[1][0] * a[0][3];
  T s3 = a[0][1] * a[1][2] - a[1][1] * a[0][2];
  T s4 = a[0][1] * a[1][3] - a[1][1] * a[0][3];
  T s5 = a[0][2] * a[1][3] - a[1][2] * a[0][3];
  T c5 = a[2][2] * a[3][3] - a[3][2] * a[2][3];
  T c4 = a[2][1] * a[3][3] - a[3][1] * a[2][3];
  T c3 = a[2][1] * a[3][2] - a[3][1] * a[2][2];
  T c2 = a[2][0] * a[3][3] - a[3][0] * a[2][3];
  T c1 = a[2][0] * a[3][2] - a[3][0] * a[2][2];
  T c0 = a[2][0] * a[3][1] - a[3][0] * a[2][1];
  T det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
  if (determinant) *determinant = det;
  T inv = T(1.0) / det;
  Mat4<T> b;
  b[0][0] = (a[1][1] * c5 - a[1][2] * c4 + a[1][3] * c3) * inv;
  b[0][1] = (-a[0][1] * c5 + a[0][2] * c4 - a[0][3] * c3) * inv;
  b[0][2] = (a[3][1] * s5 - a[3][2] * s4 + a[3][3] * s3) * inv;
  b[0][3] = (-a[2][1] * s5 + a[2][2] * s4 - a[2][3] * s3) * inv;
  b[1][0] = (-a[1][0] * c5 + a[1][2] * c2 - a[1][3] * c1) * inv;
  b[1][1] = (a[0][0] * c5 - a[0][2] * c2 + a[0][3] * c1) * inv;
  b[1][2] = (-a[3][0] * s5 + a[3][2] * s2 - a[3][3] * s1) * inv;
  b[1][3] = (a[2][0] * s5 - a[2][2] * s2 + a[2][3] * s1) * inv;
  b[2][0] = (a[1][0] * c4 - a[1][1] * c2 + a[1][3] * c0) * inv;
  b[2][1] = (-a[0][0] * c4 + a[0][1] * c2 - a[0][3] * c0) * inv;
  b[2][2] = (a[3][0] * s4 - a[3][1] * s2 + a[3][3] * s0) * inv;
  b[2][3] = (-a[2][0] * s4 + a[2][1] * s2 - a[2][3] * s0) * inv;
  b[3][0] = (-a[1][0] * c3 + a[1][1] * c1 - a[1][2] * c0) * inv;
  b[3][1] = (a[0][0] * c3 - a[0][1] * c1 + a[0][2] * c0) * inv;
  b[3][2] = (-a[3][0] * s3 + a[3][1] * s1 - a[3][2] * s0) * inv;
  b[3][3] = (a[2][0] * s3 - a[2][1] * s1 + a[2][2] * s0) * inv;
  return b;
}

double max_abs(const Vec4<>& v);
double max_abs(const Mat4<>& m);
double max_abs(const Tensor3<>& t);
double max_abs(const Tensor4<>& t);

// ---------------------------------------------------------------------------
// Runtime-ranked tensors for the public API and serialization.

enum class Variance { Up, Down };
enum class Frame { Coordinate, Adapted };

const char* to_string(Frame f);

/// Rank 0..4 tensor over 4 dimensions. Components are stored row-major with
/// flat index Σ_s idx[s]·4^(rank-1-s).
class SmallTensor {
 public:
  SmallTensor() = default;
  SmallTensor(std::vector<Variance> variance, Frame frame);
  SmallTensor(std::vector<Variance> variance, Frame frame, std::vector<double> components);

  static SmallTensor scalar(double value, Frame frame = Frame::Coordinate);
  static SmallTensor vector(const Vec4<>& v, Frame frame = Frame::Coordinate);
  static SmallTensor covector(const Vec4<>& v, Frame frame = Frame::Coordinate);
  /// Both slots covariant (metric-like).
  static SmallTensor covariant2(const Mat4<>& m, Frame frame = Frame::Coordinate);
  static SmallTensor mixed(const Mat4<>& m, Frame frame = Frame::Coordinate);

  int rank() const noexcept { return static_cast<int>(variance_.size()); }
  Frame frame() const noexcept { return frame_; }
  const std::vector<Variance>& variance() const noexcept { return variance_; }
  const std::vector<double>& components() const noexcept { return data_; }

  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;
  std::size_t flat_index(const std::vector<int>& idx) const;

  SmallTensor& operator+=(const SmallTensor& o);
  SmallTensor& operator-=(const SmallTensor& o);
  SmallTensor& operator*=(double s);

 private:
  void require_compatible(const SmallTensor& o) const;

  std::vector<Variance> variance_;
  Frame frame_ = Frame::Coordinate;
  std::vector<double> data_ = {0.0};
};

SmallTensor operator+(SmallTensor a, const SmallTensor& b);
SmallTensor operator-(SmallTensor a, const SmallTensor& b);
SmallTensor operator*(SmallTensor a, double s);

/// Lower `slot` with the covariant metric `g` (rank 2, both slots Down). Scalars pass through.
SmallTensor lower_index(const SmallTensor& t, int slot, const SmallTensor& g);
/// Raise `slot` with the inverse of the covariant metric `g`.
SmallTensor raise_index(const SmallTensor& t, int slot, const SmallTensor& g);

// ---------------------------------------------------------------------------
// Fiber norm, distinguished section, angular metric.

struct NormSign {
  double norm = 0.0;  // sqrt(|g_ij y^i y^j|)
  int sign = 1;       // ε = sign(g_ij y^i y^j)
};

inline constexpr double kDefaultNullTolerance = 1e-12;

/// Throws NullFiberError when |g_ij y^i y^j| < null_tol · max|y^i|².
NormSign norm_and_sign(const Mat4<>& g, const Vec4<>& y, double null_tol = kDefaultNullTolerance);

/// A point (x, y) of TM with cached ‖y‖ and ε. Construct via make_phase_point.
struct PhasePoint {
  Vec4<> x{};
  Vec4<> y{};
  double norm = 0.0;
  int sign = 1;
};

PhasePoint make_phase_point(const Vec4<>& x, const Vec4<>& y, const Mat4<>& g,
                            double null_tol = kDefaultNullTolerance);

struct DistinguishedSection {
  Vec4<> up{};    // l^i = y^i/‖y‖
  Vec4<> down{};  // l_i = g_ij l^j
};

DistinguishedSection distinguished_section(const PhasePoint& p, const Mat4<>& g);

/// h_ij = g_ij − ε l_i l_j, so that h_ij y^j = 0 for either causal sign.
Mat4<> angular_metric(const PhasePoint& p, const Mat4<>& g);

}  // namespace tidal
