#include "tidal/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "tidal/curvature.hpp"

namespace tidal {

const char* to_string(Method m) { return m == Method::RK45 ? "rk45" : "rk4"; }

void validate(const IntegratorConfig& cfg) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(cfg.step)) throw ValidationError("integrator.step", "must be positive and finite");
  if (!positive(cfg.abs_tol)) throw ValidationError("integrator.abs_tol", "must be positive and finite");
  if (!positive(cfg.rel_tol)) throw ValidationError("integrator.rel_tol", "must be positive and finite");
  if (cfg.max_steps == 0) throw ValidationError("integrator.max_steps", "must be at least 1");
  if (!std::isfinite(cfg.t_start)) throw ValidationError("integrator.t_start", "must be finite");
  if (!std::isfinite(cfg.t_end) || !(cfg.t_end > cfg.t_start))
    throw ValidationError("integrator.t_end", "must be finite and greater than t_start");
  if (cfg.samples < 2) throw ValidationError("integrator.samples", "must be at least 2");
}

std::vector<double> sample_times(const IntegratorConfig& cfg) {
  std::vector<double> t(cfg.samples);
  const double span = cfg.t_end - cfg.t_start;
  const auto last = static_cast<double>(cfg.samples - 1);
  for (std::size_t k = 0; k < cfg.samples; ++k) t[k] = cfg.t_start + span * (static_cast<double>(k) / last);
  t.back() = cfg.t_end;
  return t;
}

Vec4<> normalize_velocity(const Mat4<>& g, const Vec4<>& y, int target) {
  if (target != 1 && target != -1) throw ValidationError("initial.normalize", "target must be -1 or 1");
  const auto ns = norm_and_sign(g, y);
  if (ns.sign != target)
    throw ValidationError("initial.normalize", ns.sign < 0 ? "y0 is timelike, cannot normalize to +1"
                                                            : "y0 is spacelike, cannot normalize to -1");
  Vec4<> out;
  for (int i = 0; i < kDim; ++i) out[i] = y[i] / ns.norm;
  return out;
}

WorldlineRate worldline_rhs(const MetricField& g, const PotentialField& A, double alpha, const Vec4<>& x,
                            const Vec4<>& y) {
  const auto s = sample_fields(g, A, x);
  const auto cd = connection_data(s, make_phase_point(x, y, s.g), {alpha, 0.0});
  WorldlineRate r;
  r.dx = y;
  for (int i = 0; i < kDim; ++i) r.dy[i] = -2.0 * cd.G[i];
  return r;
}

namespace {

namespace ode = boost::numeric::odeint;

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
Vec4<> part(const State<N>& s, std::size_t block) {
  return {s[4 * block], s[4 * block + 1], s[4 * block + 2], s[4 * block + 3]};
}

template <std::size_t N>
void put(State<N>& s, std::size_t block, const Vec4<>& v) {
  for (int i = 0; i < kDim; ++i) s[4 * block + i] = v[i];
}

template <std::size_t N>
void require_finite(const State<N>& s) {
  for (double v : s)
    if (!std::isfinite(v)) throw ChartError("state became non-finite");
}

// Advances through the sample times, recording each. Steps that leave the chart
// (the right-hand side throws) are retried with half the step; below the minimum
// step the run is truncated at the last accepted state.
template <std::size_t N, class Rhs, class Record>
Truncation drive(const Rhs& rhs, State<N> x, const IntegratorConfig& cfg, const Record& record,
                 std::size_t& steps) {
  validate(cfg);
  auto sys = [&](const State<N>& s, State<N>& d, double t) { rhs(s, d, t); };
  State<N> probe;
  sys(x, probe, cfg.t_start);

  const auto times = sample_times(cfg);
  const double min_step = 1e-12 * std::max(1.0, cfg.t_end - cfg.t_start);
  auto controlled = ode::make_controlled(cfg.abs_tol, cfg.rel_tol, ode::runge_kutta_dopri5<State<N>>());
  ode::runge_kutta4<State<N>> rk4;

  double t = cfg.t_start;
  double dt = cfg.step;
  steps = 0;
  record(t, x);
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double target = times[n];
    while (t < target) {
      if (steps >= cfg.max_steps) return {true, "step limit reached", t};
      const double h = std::min(dt, target - t);
      const bool clamped = h < dt || h == target - t;
      ++steps;
      try {
        State<N> trial = x;
        double t_new = t + h;
        if (cfg.method == Method::RK4) {
          rk4.do_step(sys, trial, t, h);
        } else {
          double tt = t, hh = h;
          if (controlled.try_step(sys, trial, tt, hh) == ode::fail) {
            dt = hh;
            if (dt < min_step) return {true, "step size underflow", t};
            continue;
          }
          t_new = tt;
          dt = clamped ? std::max(dt, hh) : hh;
        }
        require_finite(trial);
        sys(trial, probe, t_new);
        x = trial;
        t = clamped ? target : t_new;
      } catch (const Error& e) {
        controlled.reset();
        dt = 0.5 * h;
        if (dt < min_step) return {true, e.what(), t};
      }
    }
    record(t, x);
  }
  return {};
}

struct PointData {
  ConnectionData conn;
  Mat4<> E;
};

PointData point_data(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                     const Vec4<>& x, const Vec4<>& y, bool with_tidal) {
  const auto s = sample_fields(g, A, x);
  const auto p = make_phase_point(x, y, s.g);
  PointData d{connection_data(s, p, params), {}};
  if (with_tidal) d.E = tidal_tensor(s, p, params).E;
  return d;
}

Vec4<> gamma_yw(const Tensor3<>& gamma, const Vec4<>& y, const Vec4<>& w) {
  Vec4<> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) out[i] += gamma[i][j][k] * y[j] * w[k];
  return out;
}

}  // namespace

Trajectory integrate_worldline(const MetricField& g, const PotentialField& A, const ConnectionParams& params,
                               const Vec4<>& x0, const Vec4<>& y0, const IntegratorConfig& cfg) {
  auto rhs = [&](const State<8>& s, State<8>& d, double) {
    const auto x = part(s, 0), y = part(s, 1);
    const auto pd = point_data(g, A, params, x, y, false);
    put(d, 0, y);
    Vec4<> dy;
    for (int i = 0; i < kDim; ++i) dy[i] = -2.0 * pd.conn.G[i];
    put(d, 1, dy);
  };
  State<8> s0{};
  put(s0, 0, x0);
  put(s0, 1, y0);
  Trajectory out;
  double q0 = 0.0;
  auto record = [&](double t, const State<8>& s) {
    const auto x = part(s, 0), y = part(s, 1);
    const double q = quadratic(g.evaluate(x).g, y, y);
    if (out.samples.empty()) q0 = q;
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(q - q0));
    out.samples.push_back({t, x, y});
  };
  out.truncation = drive(rhs, s0, cfg, record, out.steps);
  return out;
}

DeviationTrajectory integrate_deviation_tidal(const MetricField& g, const PotentialField& A,
                                              const ConnectionParams& params, const Vec4<>& x0,
                                              const Vec4<>& y0, const Vec4<>& w0, const Vec4<>& v0,
                                              const IntegratorConfig& cfg) {
  auto rhs = [&](const State<16>& s, State<16>& d, double) {
    const auto x = part(s, 0), y = part(s, 1), w = part(s, 2), v = part(s, 3);
    const auto pd = point_data(g, A, params, x, y, true);
    const auto Nw = mat_vec(pd.conn.N, w), Nv = mat_vec(pd.conn.N, v), Ew = mat_vec(pd.E, w);
    Vec4<> dy, dw, dv;
    for (int i = 0; i < kDim; ++i) {
      dy[i] = -2.0 * pd.conn.G[i];
      dw[i] = v[i] - Nw[i];
      dv[i] = -Nv[i] + Ew[i];
    }
    put(d, 0, y);
    put(d, 1, dy);
    put(d, 2, dw);
    put(d, 3, dv);
  };
  State<16> s0{};
  put(s0, 0, x0);
  put(s0, 1, y0);
  put(s0, 2, w0);
  put(s0, 3, v0);
  DeviationTrajectory out;
  out.frame = RateFrame::Adapted;
  auto record = [&](double t, const State<16>& s) {
    out.samples.push_back({t, part(s, 0), part(s, 1), part(s, 2), part(s, 3)});
  };
  out.truncation = drive(rhs, s0, cfg, record, out.steps);
  return out;
}

DeviationTrajectory integrate_deviation_classical(const MetricField& g, const PotentialField& A,
                                                  const ConnectionParams& params, const Vec4<>& x0,
                                                  const Vec4<>& y0, const Vec4<>& w0, const Vec4<>& v0,
                                                  const IntegratorConfig& cfg) {
  if (!g.is_flat())
    throw ScopeError("classical deviation equation is implemented for flat space only (metric '" + g.name() +
                     "')");
  const double alpha = params.alpha;
  auto rhs = [&](const State<16>& s, State<16>& d, double) {
    const auto x = part(s, 0), y = part(s, 1), w = part(s, 2), wdot = part(s, 3);
    const auto f = sample_fields(g, A, x);
    const double n = norm_and_sign(f.g, y).norm;
    const auto Fm = mat_mul(f.ginv, f.F);
    Vec4<> dy{}, ddw{};
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        dy[i] += alpha * n * Fm[i][j] * y[j];
        ddw[i] += alpha * n * Fm[i][j] * wdot[j];
        for (int k = 0; k < kDim; ++k) {
          double dFm = 0.0;
          for (int h = 0; h < kDim; ++h) dFm += f.ginv[i][h] * f.dF[h][j][k];
          ddw[i] += alpha * n * y[j] * dFm * w[k];
        }
      }
    }
    put(d, 0, y);
    put(d, 1, dy);
    put(d, 2, wdot);
    put(d, 3, ddw);
  };
  const auto pd0 = point_data(g, A, params, x0, y0, false);
  const auto Nw0 = mat_vec(pd0.conn.N, w0);
  State<16> s0{};
  put(s0, 0, x0);
  put(s0, 1, y0);
  put(s0, 2, w0);
  Vec4<> wdot0;
  for (int i = 0; i < kDim; ++i) wdot0[i] = v0[i] - Nw0[i];
  put(s0, 3, wdot0);
  DeviationTrajectory out;
  out.frame = RateFrame::LeviCivita;
  auto record = [&](double t, const State<16>& s) {
    const auto x = part(s, 0), y = part(s, 1), w = part(s, 2), wdot = part(s, 3);
    const double n = norm_and_sign(g.evaluate(x).g, y).norm;
    Vec4<> u;
    for (int i = 0; i < kDim; ++i) u[i] = wdot[i] / n;
    out.samples.push_back({t, x, y, w, u});
  };
  out.truncation = drive(rhs, s0, cfg, record, out.steps);
  return out;
}

DeviationTrajectory two_worldline_oracle(const MetricField& g, const PotentialField& A,
                                         const ConnectionParams& params, const Vec4<>& x0, const Vec4<>& y0,
                                         const Vec4<>& w0, const Vec4<>& v0, double epsilon,
                                         const IntegratorConfig& cfg) {
  if (!(std::isfinite(epsilon) && epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  auto rhs = [&](const State<16>& s, State<16>& d, double) {
    for (std::size_t b = 0; b < 2; ++b) {
      const auto x = part(s, 2 * b), y = part(s, 2 * b + 1);
      const auto pd = point_data(g, A, params, x, y, false);
      Vec4<> dy;
      for (int i = 0; i < kDim; ++i) dy[i] = -2.0 * pd.conn.G[i];
      put(d, 2 * b, y);
      put(d, 2 * b + 1, dy);
    }
  };
  const auto pd0 = point_data(g, A, params, x0, y0, false);
  const auto Nw0 = mat_vec(pd0.conn.N, w0);
  Vec4<> x1, y1;
  for (int i = 0; i < kDim; ++i) {
    x1[i] = x0[i] + epsilon * w0[i];
    y1[i] = y0[i] + epsilon * (v0[i] - Nw0[i]);
  }
  State<16> s0{};
  put(s0, 0, x0);
  put(s0, 1, y0);
  put(s0, 2, x1);
  put(s0, 3, y1);
  DeviationTrajectory out;
  out.frame = RateFrame::Adapted;
  auto record = [&](double t, const State<16>& s) {
    const auto x = part(s, 0), y = part(s, 1), xn = part(s, 2), yn = part(s, 3);
    Vec4<> w, wdot;
    for (int i = 0; i < kDim; ++i) {
      w[i] = (xn[i] - x[i]) / epsilon;
      wdot[i] = (yn[i] - y[i]) / epsilon;
    }
    const auto Nw = mat_vec(point_data(g, A, params, x, y, false).conn.N, w);
    Vec4<> v;
    for (int i = 0; i < kDim; ++i) v[i] = wdot[i] + Nw[i];
    out.samples.push_back({t, x, y, w, v});
  };
  out.truncation = drive(rhs, s0, cfg, record, out.steps);
  return out;
}

DeviationTrajectory convert_deviation_frame(const DeviationTrajectory& traj, const MetricField& g,
                                            const PotentialField& A, const ConnectionParams& params,
                                            RateFrame target) {
  DeviationTrajectory out = traj;
  out.frame = target;
  if (traj.frame == target) return out;
  for (auto& smp : out.samples) {
    const auto pd = point_data(g, A, params, smp.x, smp.y, false);
    const double n = pd.conn.point.norm;
    const auto Nw = mat_vec(pd.conn.N, smp.w);
    const auto gyw = gamma_yw(pd.conn.gamma, smp.y, smp.w);
    for (int i = 0; i < kDim; ++i) {
      if (target == RateFrame::LeviCivita)
        smp.v[i] = (smp.v[i] - Nw[i] + gyw[i]) / n;
      else
        smp.v[i] = n * smp.v[i] - gyw[i] + Nw[i];
    }
  }
  return out;
}

}  // namespace tidal
