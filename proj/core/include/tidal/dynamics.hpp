#pragma once

// Charged-particle worldlines (autoparallels of the spray connection) and
// worldline-deviation fields, in tidal form and in the classical flat-space form.
//
// Trajectories are integrated in the arbitrary parameter t of the spray. The
// natural parameter follows from norm conservation: s = t·‖y(0)‖.

#include <cstddef>
#include <string>
#include <vector>

#include "tidal/connection.hpp"
#include "tidal/fields.hpp"
#include "tidal/tensor.hpp"

namespace tidal {

enum class Method { RK45, RK4 };
const char* to_string(Method m);

struct IntegratorConfig {
  Method method = Method::RK45;
  double step = 1e-2;  // fixed step for rk4, initial guess for rk45
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 1'000'000;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t samples = 101;  // evenly spaced output times, both ends included
};

/// Throws ValidationError naming the offending field.
void validate(const IntegratorConfig& cfg);
std::vector<double> sample_times(const IntegratorConfig& cfg);

/// Rescale y so that g_ij y^i y^j = target (±1). Throws NullFiberError, or
/// ValidationError when the causal sign of y differs from the target.
Vec4<> normalize_velocity(const Mat4<>& g, const Vec4<>& y, int target);

struct WorldlineRate {
  Vec4<> dx{};
  Vec4<> dy{};
};
/// dx/dt = y, dy^i/dt = −γ^i_jk y^j y^k + α‖y‖F^i_j y^j.
WorldlineRate worldline_rhs(const MetricField& g, const PotentialField& A, double alpha, const Vec4<>& x,
                            const Vec4<>& y);

struct Truncation {
  bool truncated = false;
  std::string reason;
  double t = 0.0;  // parameter of the last accepted state
};

struct WorldlineSample {
  double t = 0.0;
  Vec4<> x{}, y{};
};

struct Trajectory {
  std::vector<WorldlineSample> samples;
  Truncation truncation;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;  // max |g y y(t) − g y y(t_start)| over samples
};

Trajectory integrate_worldline(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                               const Vec4<>& x0, const Vec4<>& y0, const IntegratorConfig& cfg);

/// Which rate accompanies w in a deviation sample.
enum class RateFrame {
  Adapted,     // δw/dt = dw/dt + N w
  LeviCivita,  // ∇w/ds = (dw/dt + γ(y, w))/‖y‖
};

struct DeviationSample {
  double t = 0.0;
  Vec4<> x{}, y{}, w{}, v{};
};

struct DeviationTrajectory {
  std::vector<DeviationSample> samples;
  RateFrame frame = RateFrame::Adapted;
  Truncation truncation;
  std::size_t steps = 0;
};

/// D²w/dt² = E w along the worldline, as dw/dt = v − N w, dv/dt = −N v + E w.
DeviationTrajectory integrate_deviation_tidal(const MetricField& g, const PotentialField& A,
                                              const ConnectionParams& params, const Vec4<>& x0,
                                              const Vec4<>& y0, const Vec4<>& w0, const Vec4<>& v0,
                                              const IntegratorConfig& cfg);

/// Flat-space Lorentz-force deviation with the full F·∇w term:
/// d²w/dt² = α‖y‖(y^j ∂_k F^i_j w^k + F^i_k dw^k/dt).
/// `v0` is the adapted rate δw/dt; samples carry ∇w/ds. Throws ScopeError on a curved metric.
/// The linearisation drops the variation of ‖y‖, so it describes families with y·dw/dt = 0.
DeviationTrajectory integrate_deviation_classical(const MetricField& g, const PotentialField& A,
                                                  const ConnectionParams& params, const Vec4<>& x0,
                                                  const Vec4<>& y0, const Vec4<>& w0, const Vec4<>& v0,
                                                  const IntegratorConfig& cfg);

/// (neighbour − reference)/ε for the worldline started at (x0 + εw0, y0 + ε(v0 − N w0)).
/// Both worldlines share one step sequence. Samples carry the adapted rate.
DeviationTrajectory two_worldline_oracle(const MetricField& g, const PotentialField& A,
                                         const ConnectionParams& params, const Vec4<>& x0, const Vec4<>& y0,
                                         const Vec4<>& w0, const Vec4<>& v0, double epsilon,
                                         const IntegratorConfig& cfg);

/// Re-express every sample's rate in `target` using the connection along the stored worldline.
DeviationTrajectory convert_deviation_frame(const DeviationTrajectory& traj, const MetricField& g,
                                            const PotentialField& A, const ConnectionParams& params,
                                            RateFrame target);

}  // namespace tidal
