#include "tidal/curvature.hpp"

namespace tidal {

namespace {

template <class T>
Tensor3<T> curvature_of(const ConnectionT<Dual<T, 8>>& c) {
  Tensor3<T> R;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) R[i][j][k] = adapted(c.N[i][j], k, c.N) - adapted(c.N[i][k], j, c.N);
  return R;
}

void require_null_free(const FieldSample& s, const PhasePoint& p) { norm_and_sign(s.g, p.y); }

}  // namespace

Tensor3<> nonlinear_curvature(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  return curvature_of<double>(connection_t(lift(s, p.y), params));
}

TidalTensors tidal_tensor(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  const auto R = nonlinear_curvature(s, p, params);
  const auto h = angular_metric(p, s.g);
  TidalTensors t;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double e = 0.0;
      for (int k = 0; k < kDim; ++k) e += R[i][j][k] * p.y[k];
      t.E[i][j] = e;
    }
  t.E_tilde = mat_mul(h, t.E);
  t.trace = trace(t.E);
  return t;
}

Mat4<> electrogravitic_tensor(const BaseCurvature& base, const Vec4<>& y) {
  Mat4<> e;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      double s = 0.0;
      for (int j = 0; j < kDim; ++j)
        for (int l = 0; l < kDim; ++l) s += base.riemann[i][j][k][l] * y[j] * y[l];
      e[i][k] = s;
    }
  return e;
}

DCurvature d_curvature(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  using T = Dual<Dual<double, 4>, 4>;
  const auto y2 = fiber_seed2(p.y);
  const auto R = curvature_of<T>(connection_t(lift(s, y2), params));
  DCurvature out;
  Mat4<T> E;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      T e(0.0);
      for (int l = 0; l < kDim; ++l) e += R[i][k][l] * y2[l];
      E[i][k] = e;
    }
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          out.R_block[i][j][k][l] = R[i][k][l].d[j].v;
          out.symmetrized_hessian_block[i][j][k][l] = 0.5 * E[i][k].d[j].d[l];
        }
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      double hess = 0.0, contracted = 0.0;
      for (int i = 0; i < kDim; ++i) {
        hess += E[i][i].d[j].d[l];
        contracted += out.R_block[i][j][l][i];
      }
      out.ricci[j][l] = -0.5 * hess;
      out.ricci_from_block[j][l] = contracted;
    }
  out.B_block = b_family(s, p, params.alpha).Bjkl;
  return out;
}

double divergence_b(const FieldSample& s, const PhasePoint& p, double alpha) {
  require_null_free(s, p);
  const auto jet = lift(s, p.y);
  ConnectionT<PhaseScalar> c;
  b_family_into(jet, alpha, c);
  double div = 0.0;
  for (int i = 0; i < kDim; ++i) {
    div += c.B[i].d[i];
    for (int m = 0; m < kDim; ++m) {
      double n0 = 0.0;
      for (int k = 0; k < kDim; ++k) n0 += s.gamma[m][i][k] * p.y[k];
      div -= n0 * c.B[i].d[4 + m];
    }
    for (int h = 0; h < kDim; ++h) div += s.gamma[i][h][i] * c.B[h].v;
  }
  return div;
}

double divergence_norm_gradient(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto jet = lift(s, p.y);
  const auto c = connection_t(jet, params);
  const auto y_low = mat_vec(jet.g, jet.y);
  Vec4<PhaseScalar> dq;
  for (int h = 0; h < kDim; ++h) {
    PhaseScalar v(0.0);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) v += jet.dg[a][b][h] * jet.y[a] * jet.y[b];
    for (int m = 0; m < kDim; ++m) v -= 2.0 * c.N[m][h] * y_low[m];
    dq[h] = v;
  }
  const auto V = mat_vec(jet.ginv, dq);
  double div = 0.0;
  for (int i = 0; i < kDim; ++i) {
    div += 0.5 * adapted(V[i], i, c.N);
    for (int h = 0; h < kDim; ++h) div += 0.5 * c.Gjk[i][h][i].v * V[h].v;
  }
  return div;
}

DlDerivatives dl_derivatives(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  require_null_free(s, p);
  const auto jet = lift(s, p.y);
  const auto c = connection_t(jet, params);
  const double eps = c.sign;
  const PhaseScalar inv_n = PhaseScalar(1.0) / c.norm;
  Mat4<PhaseScalar> X;
  for (int j = 0; j < kDim; ++j) {
    PhaseScalar dq(0.0);  // ∂_j g_ab y^a y^b
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) dq += jet.dg[a][b][j] * jet.y[a] * jet.y[b];
    for (int i = 0; i < kDim; ++i) {
      PhaseScalar dl(0.0);
      for (int a = 0; a < kDim; ++a) dl += jet.dg[i][a][j] * jet.y[a];
      dl = dl * inv_n - (0.5 * eps) * c.l_down[i] * dq * inv_n * inv_n;
      for (int m = 0; m < kDim; ++m) dl -= c.N[m][j] * c.h[i][m] * inv_n;
      for (int k = 0; k < kDim; ++k) dl -= c.Gjk[k][i][j] * c.l_down[k];
      X[i][j] = dl;
    }
  }
  DlDerivatives out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out.dl[i][j] = X[i][j].v;
  for (int i = 0; i < kDim; ++i) {
    double box = 0.0;
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        double d = adapted(X[i][j], k, c.N);
        for (int h = 0; h < kDim; ++h) d -= c.Gjk[h][i][k].v * X[h][j].v + c.Gjk[h][j][k].v * X[i][h].v;
        box += s.ginv[j][k] * d;
      }
    out.box_l[i] = box;
    out.l_box_l += c.l_up[i].v * box;
  }
  return out;
}

TraceDecomposition trace_decomposition(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  TraceDecomposition t;
  t.lhs = tidal_tensor(s, p, params).trace;
  t.e_trace = trace(electrogravitic_tensor(base_riemann(Christoffel{s.gamma, s.dgamma}), p.y));
  t.divergence = divergence_b(s, p, params.alpha);
  const auto b = b_family(s, p, params.alpha);
  t.b_quadratic = trace(mat_mul(b.Bj, b.Bj));
  t.rhs = t.e_trace - 2.0 * t.divergence + t.b_quadratic;
  return t;
}

TidalPacket compute_packet(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params) {
  TidalPacket t;
  t.point = p;
  t.connection = connection_data(s, p, params);
  t.R = nonlinear_curvature(s, p, params);
  const auto tt = tidal_tensor(s, p, params);
  t.E = tt.E;
  t.E_tilde = tt.E_tilde;
  t.trace_E = tt.trace;
  t.base = base_riemann(Christoffel{s.gamma, s.dgamma});
  t.e = electrogravitic_tensor(t.base, p.y);
  t.torsion = strong_torsion(s, p, params);
  t.d = d_curvature(s, p, params);
  return t;
}

TidalPacket compute_packet(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                           const Vec4<>& x, const Vec4<>& y) {
  const auto s = sample_fields(g, A, x);
  return compute_packet(s, make_phase_point(x, y, s.g), params);
}

}  // namespace tidal
