#pragma once

// Curvature of the spray connection, tidal tensors, curvature blocks of the
// affine connection D and the base-space curvature they reduce to.

#include "tidal/connection.hpp"
#include "tidal/fields.hpp"
#include "tidal/tensor.hpp"

namespace tidal {

/// R^i_jk = δ_k N^i_j − δ_j N^i_k -> [i][j][k].
Tensor3<> nonlinear_curvature(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

struct TidalTensors {
  Mat4<> E{};        // E^i_j = R^i_jk y^k
  Mat4<> E_tilde{};  // Ẽ_ij = h_ik E^k_j
  double trace = 0.0;
};
TidalTensors tidal_tensor(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

/// e^i_k = r_j^i_kl y^j y^l from the base Riemann tensor.
Mat4<> electrogravitic_tensor(const BaseCurvature& base, const Vec4<>& y);

struct DCurvature {
  Tensor4<> R_block{};      // R_j^i_kl = ∂_{y^j} R^i_kl -> [i][j][k][l]
  Tensor4<> B_block{};      // B^i_{·jkl} -> [i][j][k][l]
  Mat4<> ricci{};           // R_jl = −½ ∂²(E^i_i)/∂y^j∂y^l
  Mat4<> ricci_from_block{};  // R_j^i_li
  Tensor4<> symmetrized_hessian_block{};  // ½ ∂²E^i_k/∂y^j∂y^l -> [i][j][k][l]
};
DCurvature d_curvature(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

struct TraceDecomposition {
  double lhs = 0.0;         // E^i_i
  double rhs = 0.0;         // e^i_i − D⁰_{δi}(2B^i) + B^l_i B^i_l
  double e_trace = 0.0;
  double divergence = 0.0;  // D⁰_{δi} B^i
  double b_quadratic = 0.0; // B^l_i B^i_l
};
TraceDecomposition trace_decomposition(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

/// D⁰_{δi} B^i, the Levi-Civita-lifted divergence of the B vector field.
double divergence_b(const FieldSample& s, const PhasePoint& p, double alpha);

/// D_{δi} V^i with V^i = ½ g^ih δ_h(g_ab y^a y^b) under the full connection.
double divergence_norm_gradient(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

struct DlDerivatives {
  Mat4<> dl{};          // D_{δj} l_i -> [i][j], closed-form lift
  Vec4<> box_l{};       // □l_i = g^{jk} D_{δk} D_{δj} l_i
  double l_box_l = 0.0; // l^i □l_i
};
DlDerivatives dl_derivatives(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);

struct TidalPacket {
  PhasePoint point{};
  ConnectionData connection{};
  Tensor3<> R{};
  Mat4<> E{}, E_tilde{};
  double trace_E = 0.0;
  Mat4<> e{};
  Mat4<> torsion{};
  BaseCurvature base{};
  DCurvature d{};
};

TidalPacket compute_packet(const FieldSample& s, const PhasePoint& p, const ConnectionParams& params);
TidalPacket compute_packet(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                           const Vec4<>& x, const Vec4<>& y);

}  // namespace tidal
