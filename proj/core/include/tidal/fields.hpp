#pragma once

// Metric and 4-potential catalog with exact partial derivatives to second order,
// and the base-space objects derived from them.
//
// Units: c = G = 1, Gaussian-style charges (Q appears in g_00 as Q²/r²).
// Charts: Schwarzschild-type metrics use (t, r, θ, φ); flat space uses (t, x, y, z).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tidal/dual.hpp"
#include "tidal/tensor.hpp"

namespace tidal {

enum class Chart { Cartesian, Spherical };
const char* to_string(Chart c);

using Params = std::map<std::string, double>;

/// g_ij with ∂_k g_ij -> dg[i][j][k] and ∂_l ∂_k g_ij -> ddg[i][j][k][l].
struct MetricJet {
  Mat4<> g{};
  Tensor3<> dg{};
  Tensor4<> ddg{};
};

/// A_i with ∂_j A_i -> dA[i][j] and ∂_k ∂_j A_i -> ddA[i][j][k].
struct PotentialJet {
  Vec4<> A{};
  Mat4<> dA{};
  Tensor3<> ddA{};
};

/// Returns a diagnostic when x is outside the chart, nothing when valid.
using ChartGuard = std::function<std::optional<std::string>(const Vec4<>&)>;

/// Scalar type used by the generic evaluators: nested duals over the 4 base directions.
using BaseJet2 = Dual<Dual<double, 4>, 4>;

class MetricField {
 public:
  using Evaluator = std::function<MetricJet(const Vec4<>&)>;

  MetricField(std::string name, Params params, Chart chart, Evaluator evaluator, ChartGuard guard);

  const std::string& name() const noexcept { return name_; }
  const Params& params() const noexcept { return params_; }
  Chart chart() const noexcept { return chart_; }
  bool is_flat() const noexcept { return name_ == "minkowski"; }

  std::optional<std::string> chart_violation(const Vec4<>& x) const;
  /// Throws ChartError outside the chart.
  MetricJet evaluate(const Vec4<>& x) const;

 private:
  std::string name_;
  Params params_;
  Chart chart_;
  Evaluator evaluator_;
  ChartGuard guard_;
};

class PotentialField {
 public:
  using Evaluator = std::function<PotentialJet(const Vec4<>&)>;

  PotentialField(std::string name, Params params, Chart chart, Evaluator evaluator, ChartGuard guard);

  const std::string& name() const noexcept { return name_; }
  const Params& params() const noexcept { return params_; }
  Chart chart() const noexcept { return chart_; }

  std::optional<std::string> chart_violation(const Vec4<>& x) const;
  PotentialJet evaluate(const Vec4<>& x) const;

 private:
  std::string name_;
  Params params_;
  Chart chart_;
  Evaluator evaluator_;
  ChartGuard guard_;
};

/// minkowski; schwarzschild {M}; reissner_nordstrom {M, Q, allow_naked}.
MetricField builtin_metric(const std::string& name, const Params& params = {});

/// zero; uniform_b {B, axis}; uniform_e {E, axis}; coulomb {Q}; pure_gauge {c}.
/// `chart` must match the metric the potential is paired with; uniform fields are Cartesian only.
PotentialField builtin_potential(const std::string& name, const Params& params = {},
                                 Chart chart = Chart::Cartesian);

struct CatalogEntry {
  std::string name;
  std::vector<std::string> param_keys;
  std::string description;
};
std::vector<CatalogEntry> metric_catalog();
std::vector<CatalogEntry> potential_catalog();

/// Derivatives by nested forward propagation of a user-supplied generic expression.
MetricField metric_from_generic(std::string name, Chart chart,
                                std::function<Mat4<BaseJet2>(const Vec4<BaseJet2>&)> g, ChartGuard guard = {});
PotentialField potential_from_generic(std::string name, Chart chart,
                                      std::function<Vec4<BaseJet2>(const Vec4<BaseJet2>&)> A,
                                      ChartGuard guard = {});

/// True when the pair is an exact Einstein(–Maxwell) solution in the catalog:
/// minkowski/schwarzschild with zero potential, reissner_nordstrom(M, Q) with coulomb(±Q).
bool solves_einstein(const MetricField& g, const PotentialField& A);

// ---------------------------------------------------------------------------
// Derived base-space objects.

/// γ^i_jk -> gamma[i][j][k], ∂_l γ^i_jk -> dgamma[i][j][k][l].
struct Christoffel {
  Tensor3<> gamma{};
  Tensor4<> dgamma{};
};
Christoffel christoffel(const MetricJet& jet);
Christoffel christoffel(const MetricField& g, const Vec4<>& x);

/// F_ij = ∂_i A_j − ∂_j A_i, ∂_k F_ij -> dF[i][j][k].
struct Faraday {
  Mat4<> F{};
  Tensor3<> dF{};
};
Faraday faraday(const PotentialJet& jet);
Faraday faraday(const PotentialField& A, const Vec4<>& x);

/// r_j^i_kl -> riemann[i][j][k][l] (sign convention with e^i_k = r_j^i_kl u^j u^l),
/// r_jl = r_j^i_li -> ricci[j][l].
struct BaseCurvature {
  Tensor4<> riemann{};
  Mat4<> ricci{};
};
BaseCurvature base_riemann(const Christoffel& c);
BaseCurvature base_riemann(const MetricField& g, const Vec4<>& x);

/// J^j = (1/4π) ∇_i F^{ij} (Levi-Civita).
Vec4<> current(const PotentialField& A, const MetricField& g, const Vec4<>& x);

struct StressEnergy {
  Mat4<> em{};
  Mat4<> matter{};
  Mat4<> total() const;
};

/// T^em_ij = (1/4π)(F_ih F_j^h − ¼ g_ij F_kh F^kh), the (−,+,+,+) form; traceless.
Mat4<> stress_energy_em(const Mat4<>& F, const Mat4<>& g);

/// Everything the tangent-bundle pipeline needs from the base at one point.
struct FieldSample {
  Vec4<> x{};
  Mat4<> g{}, ginv{};
  Tensor3<> dg{};       // ∂_k g_ij
  Tensor4<> ddg{};      // ∂_l ∂_k g_ij
  Tensor3<> dginv{};    // ∂_k g^ij
  Tensor3<> gamma{};    // γ^i_jk
  Tensor4<> dgamma{};   // ∂_l γ^i_jk
  Mat4<> F{};           // F_ij
  Tensor3<> dF{};       // ∂_k F_ij
};

FieldSample sample_fields(const MetricField& g, const PotentialField& A, const Vec4<>& x);

}  // namespace tidal
