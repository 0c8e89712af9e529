#pragma once

// Randers spray, B-contortion family, spray (Ehresmann) connection and affine
// coefficients at a phase point, plus adapted and D-covariant derivatives.
//
// Every coefficient is written once as a template over the scalar type. Lifting
// the base data into Dual<T, 8> (partials in x^0..3 then y^0..3) turns the same
// code into an exact evaluator of first phase-space derivatives; choosing T itself
// a dual over y gives the fiber derivatives needed by the curvature blocks.

#include <cmath>
#include <functional>

#include "tidal/dual.hpp"
#include "tidal/fields.hpp"
#include "tidal/tensor.hpp"

namespace tidal {

struct ConnectionParams {
  double alpha = 0.0;
  /// Constant added to every N^i_j. Nonzero only for the non-spray negative control.
  double offset = 0.0;
};

/// Base data and fiber vector at one phase point, in scalar type S.
template <class S>
struct PhaseJet {
  Mat4<S> g{}, ginv{};
  Tensor3<S> dg{};     // ∂_k g_ij
  Tensor3<S> gamma{};  // γ^i_jk
  Mat4<S> F{};         // F_ij
  Vec4<S> y{};
};

/// All connection coefficients at a phase point, in scalar type S.
template <class S>
struct ConnectionT {
  S q{};     // g_ij y^i y^j
  S norm{};  // ‖y‖
  int sign = 1;
  Vec4<S> l_up{}, l_down{};
  Mat4<S> h{};
  Mat4<S> F_mixed{};  // F^i_j
  Vec4<S> F_y{};      // F^i = F^i_j y^j
  Vec4<S> B{};
  Mat4<S> Bj{};       // B^i_j
  Tensor3<S> Bjk{};   // B^i_jk
  Vec4<S> G{};
  Mat4<S> N{};        // N^i_j
  Tensor3<S> Gjk{};   // G^i_jk
};

using PhaseScalar = Dual<double, 8>;

// ---------------------------------------------------------------------------
// Jets.

/// Base data frozen (no base partials), fiber vector given in T.
template <class T>
PhaseJet<T> constant_jet(const FieldSample& s, const Vec4<T>& y) {
  PhaseJet<T> j;
  for (int i = 0; i < kDim; ++i) {
    for (int k = 0; k < kDim; ++k) {
      j.g[i][k] = T(s.g[i][k]);
      j.ginv[i][k] = T(s.ginv[i][k]);
      j.F[i][k] = T(s.F[i][k]);
      for (int m = 0; m < kDim; ++m) {
        j.dg[i][k][m] = T(s.dg[i][k][m]);
        j.gamma[i][k][m] = T(s.gamma[i][k][m]);
      }
    }
    j.y[i] = y[i];
  }
  return j;
}

/// Base data carrying its first x-partials, fiber vector carrying unit y-partials.
template <class T>
PhaseJet<Dual<T, 8>> lift(const FieldSample& s, const Vec4<T>& y) {
  using S = Dual<T, 8>;
  auto with = [](double v, auto&& partial) {
    S out{T(v)};
    for (int k = 0; k < kDim; ++k) out.d[k] = T(partial(k));
    return out;
  };
  PhaseJet<S> j;
  for (int i = 0; i < kDim; ++i) {
    for (int a = 0; a < kDim; ++a) {
      j.g[i][a] = with(s.g[i][a], [&](int k) { return s.dg[i][a][k]; });
      j.ginv[i][a] = with(s.ginv[i][a], [&](int k) { return s.dginv[i][a][k]; });
      j.F[i][a] = with(s.F[i][a], [&](int k) { return s.dF[i][a][k]; });
      for (int b = 0; b < kDim; ++b) {
        j.dg[i][a][b] = with(s.dg[i][a][b], [&](int k) { return s.ddg[i][a][b][k]; });
        j.gamma[i][a][b] = with(s.gamma[i][a][b], [&](int k) { return s.dgamma[i][a][b][k]; });
      }
    }
    j.y[i] = S(y[i]);
    j.y[i].d[4 + i] = T(1.0);
  }
  return j;
}

/// y seeded as a first-order dual over the four fiber directions.
inline Vec4<Dual<double, 4>> fiber_seed(const Vec4<>& y) {
  Vec4<Dual<double, 4>> out;
  for (int i = 0; i < kDim; ++i) out[i] = Dual<double, 4>::variable(y[i], i);
  return out;
}

/// y seeded as a nested dual: .d[j].d[l] holds ∂²/∂y^j∂y^l.
inline Vec4<Dual<Dual<double, 4>, 4>> fiber_seed2(const Vec4<>& y) {
  Vec4<Dual<Dual<double, 4>, 4>> out;
  for (int i = 0; i < kDim; ++i) {
    out[i] = Dual<Dual<double, 4>, 4>(Dual<double, 4>::variable(y[i], i));
    out[i].d[i] = Dual<double, 4>(1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficients.

/// B^i, B^i_j, B^i_jk. Fills the norm/sign/l/h/F fields of `c` as well.
template <class S>
void b_family_into(const PhaseJet<S>& j, double alpha, ConnectionT<S>& c) {
  using std::sqrt;
  c.q = quadratic(j.g, j.y, j.y);
  const double q0 = real_part(c.q);
  if (!(q0 != 0.0) || !std::isfinite(q0)) throw NullFiberError("fiber vector is null");
  c.sign = q0 > 0.0 ? 1 : -1;
  const double eps = c.sign;
  c.norm = sqrt(c.q * eps);
  const S inv_n = S(1.0) / c.norm;
  for (int i = 0; i < kDim; ++i) c.l_up[i] = j.y[i] * inv_n;
  c.l_down = mat_vec(j.g, c.l_up);
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) c.h[i][k] = j.g[i][k] - eps * c.l_down[i] * c.l_down[k];
  c.F_mixed = mat_mul(j.ginv, j.F);
  c.F_y = mat_vec(c.F_mixed, j.y);

  const double a2 = -0.5 * alpha;
  for (int i = 0; i < kDim; ++i) {
    c.B[i] = a2 * c.norm * c.F_y[i];
    for (int a = 0; a < kDim; ++a) {
      c.Bj[i][a] = a2 * (eps * c.F_y[i] * c.l_down[a] + c.norm * c.F_mixed[i][a]);
      for (int b = 0; b < kDim; ++b)
        c.Bjk[i][a][b] = (a2 * eps) * (c.F_y[i] * c.h[a][b] * inv_n + c.l_down[a] * c.F_mixed[i][b] +
                                       c.l_down[b] * c.F_mixed[i][a]);
    }
  }
}

template <class S>
ConnectionT<S> connection_t(const PhaseJet<S>& j, const ConnectionParams& p) {
  ConnectionT<S> c;
  b_family_into(j, p.alpha, c);
  for (int i = 0; i < kDim; ++i) {
    S gyy(0.0);
    for (int a = 0; a < kDim; ++a) {
      S gy(0.0);
      for (int b = 0; b < kDim; ++b) {
        gy += j.gamma[i][a][b] * j.y[b];
        c.Gjk[i][a][b] = j.gamma[i][a][b] + c.Bjk[i][a][b];
      }
      gyy += gy * j.y[a];
      c.N[i][a] = gy + c.Bj[i][a] + p.offset;
    }
    c.G[i] = 0.5 * gyy + c.B[i];
  }
  return c;
}

/// δ_k f = ∂_{x^k} f − N^m_k ∂_{y^m} f for f carrying phase-space partials.
template <class T>
T adapted(const Dual<T, 8>& f, int k, const Mat4<Dual<T, 8>>& N) {
  T out = f.d[k];
  for (int m = 0; m < kDim; ++m) out -= N[m][k].v * f.d[4 + m];
  return out;
}

// ---------------------------------------------------------------------------
// Public value-level API.

/// ConnectionData: every coefficient at one phase point.
struct ConnectionData {
  PhasePoint point{};
  double alpha = 0.0;
  Vec4<> l_up{}, l_down{};
  Mat4<> h{};
  Tensor3<> gamma{};
  Mat4<> F{}, F_mixed{};
  Vec4<> F_y{};
  Vec4<> B{};
  Mat4<> Bj{};
  Tensor3<> Bjk{};
  Vec4<> G{};
  Mat4<> N{};
  Tensor3<> Gjk{};
};

ConnectionData connection_data(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);
ConnectionData connection_data(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                               const Vec4<>& x, const Vec4<>& y);

struct BFamily {
  Vec4<> B{};
  Mat4<> Bj{};
  Tensor3<> Bjk{};
  Tensor4<> Bjkl{};  // ∂_{y^l} B^i_jk -> [i][j][k][l]
};
BFamily b_family(const FieldSample& s, const PhasePoint& p, double alpha);

Vec4<> spray(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);
Mat4<> nonlinear_connection(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);
Tensor3<> affine_coefficients(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

/// G^i_{·j} by exact fiber differentiation of the spray.
Mat4<> spray_fiber_derivative(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);
/// N^i_{j·k} -> [i][j][k] by exact fiber differentiation of N.
Tensor3<> connection_fiber_derivative(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

/// 𝕋^i_j = y^k N^i_{k·j} − N^i_j.
Mat4<> strong_torsion(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

// ---------------------------------------------------------------------------
// Derivatives of fields on TM.

using ScalarOnTM = std::function<PhaseScalar(const PhaseJet<PhaseScalar>&)>;
using CovectorOnTM = std::function<Vec4<PhaseScalar>(const PhaseJet<PhaseScalar>&)>;
using VectorOnTM = CovectorOnTM;
using Covariant2OnTM = std::function<Mat4<PhaseScalar>(const PhaseJet<PhaseScalar>&)>;

/// Phase point with lifted jet and lifted connection, built once and shared by derivative evaluations.
class PhaseContext {
 public:
  PhaseContext(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

  const FieldSample& sample() const noexcept { return sample_; }
  const PhasePoint& point() const noexcept { return point_; }
  const ConnectionParams& params() const noexcept { return params_; }
  const PhaseJet<PhaseScalar>& jet() const noexcept { return jet_; }
  const ConnectionT<PhaseScalar>& lifted() const noexcept { return conn_; }

  /// δ_k f at the point.
  double adapted_derivative(const ScalarOnTM& f, int k) const;
  /// D_{δk} X_i -> [i][k].
  Mat4<> d_covariant_covector(const CovectorOnTM& X) const;
  /// D_{δk} V^i -> [i][k].
  Mat4<> d_covariant_vector(const VectorOnTM& V) const;
  /// D_{δk} X_ij -> [i][j][k].
  Tensor3<> d_covariant_covariant2(const Covariant2OnTM& X) const;

 private:
  FieldSample sample_;
  PhasePoint point_;
  ConnectionParams params_;
  PhaseJet<PhaseScalar> jet_;
  ConnectionT<PhaseScalar> conn_;
};

/// l_i = g_ij y^j/‖y‖ as a field on TM.
Vec4<PhaseScalar> distinguished_covector(const PhaseJet<PhaseScalar>& j);

/// D_{δj} l_i -> [i][j], through the generic covariant derivative.
Mat4<> d_distinguished_section(const PhaseContext& ctx);

}  // namespace tidal
