#include "tidal/connection.hpp"

namespace tidal {

namespace {

template <class S>
double val(const S& s) {
  return real_part(s);
}

void require_null_free(const FieldSample& s, const PhasePoint& p) {
  norm_and_sign(s.g, p.y);
}

}  // namespace

ConnectionData connection_data(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto c = connection_t(constant_jet(s, p.y), params);
  ConnectionData out;
  out.point = p;
  out.alpha = params.alpha;
  out.l_up = c.l_up;
  out.l_down = c.l_down;
  out.h = c.h;
  out.gamma = s.gamma;
  out.F = s.F;
  out.F_mixed = c.F_mixed;
  out.F_y = c.F_y;
  out.B = c.B;
  out.Bj = c.Bj;
  out.Bjk = c.Bjk;
  out.G = c.G;
  out.N = c.N;
  out.Gjk = c.Gjk;
  return out;
}

ConnectionData connection_data(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                               const Vec4<>& x, const Vec4<>& y) {
  const auto s = sample_fields(g, A, x);
  return connection_data(s, make_phase_point(x, y, s.g), params);
}

BFamily b_family(const FieldSample& s, const PhasePoint& p, double alpha) {
  require_null_free(s, p);
  ConnectionT<Dual<double, 4>> c;
  b_family_into(constant_jet(s, fiber_seed(p.y)), alpha, c);
  BFamily out;
  for (int i = 0; i < kDim; ++i) {
    out.B[i] = c.B[i].v;
    for (int j = 0; j < kDim; ++j) {
      out.Bj[i][j] = c.Bj[i][j].v;
      for (int k = 0; k < kDim; ++k) {
        out.Bjk[i][j][k] = c.Bjk[i][j][k].v;
        for (int l = 0; l < kDim; ++l) out.Bjkl[i][j][k][l] = c.Bjk[i][j][k].d[l];
      }
    }
  }
  return out;
}

Vec4<> spray(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  return connection_data(s, p, params).G;
}

Mat4<> nonlinear_connection(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  return connection_data(s, p, params).N;
}

Tensor3<> affine_coefficients(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  return connection_data(s, p, params).Gjk;
}

Mat4<> spray_fiber_derivative(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto c = connection_t(constant_jet(s, fiber_seed(p.y)), params);
  Mat4<> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out[i][j] = c.G[i].d[j];
  return out;
}

Tensor3<> connection_fiber_derivative(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto c = connection_t(constant_jet(s, fiber_seed(p.y)), params);
  Tensor3<> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) out[i][j][k] = c.N[i][j].d[k];
  return out;
}

Mat4<> strong_torsion(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto c = connection_t(constant_jet(s, fiber_seed(p.y)), params);
  Mat4<> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double t = -c.N[i][j].v;
      for (int k = 0; k < kDim; ++k) t += p.y[k] * c.N[i][k].d[j];
      out[i][j] = t;
    }
  return out;
}

// ---------------------------------------------------------------------------

PhaseContext::PhaseContext(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params)
    : sample_(s), point_(p), params_(params), jet_(lift(s, p.y)) {
  require_null_free(s, p);
  conn_ = connection_t(jet_, params_);
}

double PhaseContext::adapted_derivative(const ScalarOnTM& f, int k) const {
  if (k < 0 || k >= kDim) throw TensorError("adapted derivative direction out of range");
  return adapted(f(jet_), k, conn_.N);
}

Mat4<> PhaseContext::d_covariant_covector(const CovectorOnTM& X) const {
  const auto x = X(jet_);
  Mat4<> out;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      double d = adapted(x[i], k, conn_.N);
      for (int h = 0; h < kDim; ++h) d -= val(conn_.Gjk[h][i][k]) * x[h].v;
      out[i][k] = d;
    }
  return out;
}

Mat4<> PhaseContext::d_covariant_vector(const VectorOnTM& V) const {
  const auto v = V(jet_);
  Mat4<> out;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      double d = adapted(v[i], k, conn_.N);
      for (int h = 0; h < kDim; ++h) d += val(conn_.Gjk[i][h][k]) * v[h].v;
      out[i][k] = d;
    }
  return out;
}

Tensor3<> PhaseContext::d_covariant_covariant2(const Covariant2OnTM& X) const {
  const auto x = X(jet_);
  Tensor3<> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        double d = adapted(x[i][j], k, conn_.N);
        for (int h = 0; h < kDim; ++h)
          d -= val(conn_.Gjk[h][i][k]) * x[h][j].v + val(conn_.Gjk[h][j][k]) * x[i][h].v;
        out[i][j][k] = d;
      }
  return out;
}

Vec4<PhaseScalar> distinguished_covector(const PhaseJet<PhaseScalar>& j) {
  const PhaseScalar q = quadratic(j.g, j.y, j.y);
  const double eps = q.v > 0.0 ? 1.0 : -1.0;
  const PhaseScalar inv_n = PhaseScalar(1.0) / sqrt(q * eps);
  auto out = mat_vec(j.g, j.y);
  for (auto& c : out) c *= inv_n;
  return out;
}

Mat4<> d_distinguished_section(const PhaseContext& ctx) { return ctx.d_covariant_covector(distinguished_covector); }

}  // namespace tidal
