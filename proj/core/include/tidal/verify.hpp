#pragma once

// Cross-validation of the tidal-tensor identities and field equations at sampled
// phase points. Every check compares two sides computed along separate paths.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tidal/curvature.hpp"
#include "tidal/scenario.hpp"

namespace tidal {

/// Below this magnitude a check compares absolutely instead of relatively.
inline constexpr double kAbsoluteFloor = 1e-14;

enum class ResidualMode { Relative, Absolute };
const char* to_string(ResidualMode m);

struct CheckResult {
  std::string check;
  std::string scenario;
  std::size_t point = 0;
  double alpha = 0.0;
  Vec4<> x{}, y{};
  std::vector<double> lhs, rhs;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  ResidualMode mode = ResidualMode::Relative;
  bool pass = false;
};

/// abs = max|lhs − rhs|; scale = max(|lhs|, |rhs|, term_scale); relative unless scale < kAbsoluteFloor.
/// `term_scale` is the largest individual term that cancels inside either side.
CheckResult make_check(std::string id, std::vector<double> lhs, std::vector<double> rhs, double tolerance,
                       double term_scale = 0.0);

namespace tolerance {
inline constexpr double structural = 1e-9;
inline constexpr double maxwell_cyclic = 1e-8;
inline constexpr double trace_decomposition = 1e-8;
inline constexpr double inhomogeneous_maxwell = 1e-8;
inline constexpr double maxwell_variants = 1e-9;
inline constexpr double field_equation = 1e-7;
}  // namespace tolerance

struct ChargeAndMatterDensities {
  double rho_c = 0.0;  // −J^i l_i
  double rho_m = 0.0;  // T^m_ij l^i l^j
  Mat4<> T_matter{};
};

/// Everything one phase point needs, shared by all checks at that point.
struct CheckContext {
  std::string scenario;
  std::size_t point = 0;
  MetricField metric;
  PotentialField potential;
  FieldSample sample;
  PhasePoint p;
  ConnectionParams params;
  bool einstein_consistent = false;
  Mat4<> T_matter{};  // zero for every catalog scenario
};

CheckContext make_context(const Scenario& sc, const Vec4<>& x, const Vec4<>& y, double alpha,
                          std::size_t point = 0);

ChargeAndMatterDensities densities(const CheckContext& ctx);

/// Terms of the trace form of the Einstein equations written with □l.
struct EinsteinTidalTerms {
  double alpha = 0.0;
  int sign = -1;
  double norm2 = 0.0;        // ‖y‖²
  double l_box_l = 0.0;      // l^i □l_i
  double div_b = 0.0;        // D⁰_{δi} B^i
  double b_quadratic = 0.0;  // B^i_l B^l_i
  double rho_m = 0.0;
  double matter_trace = 0.0; // T^m_l^l
};
/// (2ε/α²) l□l − (2/‖y‖²)(ε/α² + 1) D⁰B + BB/‖y‖² − 8π(ρ_m − ½ε T^m_l^l); equals E^i_i/‖y‖².
double einstein_tidal_rhs(const EinsteinTidalTerms& t);

/// homogeneous_maxwell (Ẽ_[ij] = 0) and maxwell_cyclic (agreement with the cyclic ∇F side).
std::vector<CheckResult> check_homogeneous_maxwell(const CheckContext& ctx);
/// inhomogeneous_maxwell, inhomogeneous_maxwell_alt, maxwell_variants_agree.
std::vector<CheckResult> check_inhomogeneous_maxwell(const CheckContext& ctx);
/// einstein_trace, and einstein_tidal when α ≠ 0. Empty unless the scenario solves the Einstein equations.
std::vector<CheckResult> check_einstein_trace(const CheckContext& ctx);
/// Structural identities of the connection and its curvature; alpha0_reduction at α = 0.
std::vector<CheckResult> check_structural(const CheckContext& ctx);
/// All of the above plus trace_decomposition, in a fixed order.
std::vector<CheckResult> run_checks(const CheckContext& ctx);

struct PhaseSample {
  Vec4<> x{}, y{};
};
/// Uniform x in the sampling box, y by rejection with g_ij y^i y^j in [q_min, q_max].
/// Deterministic in (scenario id, seed).
std::vector<PhaseSample> sample_phase_points(const Scenario& sc, std::size_t count, std::uint64_t seed);

inline const std::vector<double> kAcceptanceAlphas{-1.0, 0.0, 0.5, 1.0, 3.0};

struct SuiteConfig {
  std::size_t points = 50;
  std::uint64_t seed = 0;
  std::vector<double> alphas;  // empty: each scenario's own α
  unsigned threads = 0;        // 0: hardware concurrency
};

struct CheckSummary {
  std::size_t pass = 0, fail = 0;
  double max_rel_residual = 0.0;
  double max_abs_residual = 0.0;
};

struct Report {
  std::string version;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::vector<std::string> scenarios;
  std::vector<CheckResult> checks;
  std::size_t pass = 0, fail = 0;
  double max_rel_residual = 0.0;  // over relative-mode checks
  std::map<std::string, CheckSummary> per_check;

  bool all_pass() const noexcept { return fail == 0; }
};

Report run_suite(const std::vector<Scenario>& scenarios, const SuiteConfig& cfg);
std::string report_to_json(const Report& r);

const char* library_version();

}  // namespace tidal
