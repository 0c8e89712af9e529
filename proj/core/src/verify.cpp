#include "tidal/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <json.hpp>

namespace tidal {

const char* library_version() { return "1.0.0"; }

const char* to_string(ResidualMode m) { return m == ResidualMode::Relative ? "relative" : "absolute"; }

CheckResult make_check(std::string id, std::vector<double> lhs, std::vector<double> rhs, double tolerance,
                       double term_scale) {
  if (lhs.size() != rhs.size()) throw TensorError("check '" + id + "': sides differ in size");
  CheckResult r;
  r.check = std::move(id);
  double scale = std::abs(term_scale);
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    r.abs_residual = std::max(r.abs_residual, std::abs(lhs[k] - rhs[k]));
    scale = std::max({scale, std::abs(lhs[k]), std::abs(rhs[k])});
  }
  r.tolerance = tolerance;
  if (scale < kAbsoluteFloor) {
    r.mode = ResidualMode::Absolute;
    r.rel_residual = 0.0;
    r.pass = r.abs_residual <= kAbsoluteFloor;
  } else {
    r.mode = ResidualMode::Relative;
    r.rel_residual = r.abs_residual / scale;
    r.pass = r.rel_residual <= tolerance;
  }
  if (!std::isfinite(r.abs_residual)) r.pass = false;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  return r;
}

namespace {

std::vector<double> flat(const Mat4<>& m) {
  std::vector<double> out;
  for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<double> flat(const Tensor3<>& t) {
  std::vector<double> out;
  for (const auto& m : t)
    for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
  return out;
}

void append(std::vector<double>& a, const std::vector<double>& b) { a.insert(a.end(), b.begin(), b.end()); }

}  // namespace

CheckContext make_context(const Scenario& sc, const Vec4<>& x, const Vec4<>& y, double alpha, std::size_t point) {
  auto g = sc.metric_field();
  auto A = sc.potential_field();
  auto s = sample_fields(g, A, x);
  auto p = make_phase_point(x, y, s.g);
  const bool consistent = solves_einstein(g, A);
  return CheckContext{sc.id, point, std::move(g), std::move(A), s, p, sc.connection_params(alpha), consistent, {}};
}

ChargeAndMatterDensities densities(const CheckContext& ctx) {
  ChargeAndMatterDensities d;
  const auto l = distinguished_section(ctx.p, ctx.sample.g);
  const auto J = current(ctx.potential, ctx.metric, ctx.p.x);
  d.rho_c = -dot(J, l.down);
  d.T_matter = ctx.T_matter;
  d.rho_m = quadratic(ctx.T_matter, l.up, l.up);
  return d;
}

double einstein_tidal_rhs(const EinsteinTidalTerms& t) {
  if (t.alpha == 0.0) throw ScopeError("the □l form of the Einstein trace needs α ≠ 0");
  const double eps = t.sign;
  const double a2 = t.alpha * t.alpha;
  return 2.0 * eps / a2 * t.l_box_l - 2.0 / t.norm2 * (eps / a2 + 1.0) * t.div_b + t.b_quadratic / t.norm2 -
         8.0 * std::numbers::pi * (t.rho_m - 0.5 * eps * t.matter_trace);
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> check_structural(const CheckContext& ctx) {
  const auto& s = ctx.sample;
  const auto& p = ctx.p;
  const auto& y = p.y;
  const double alpha = ctx.params.alpha;
  const auto pk = compute_packet(s, p, ctx.params);
  const auto& cd = pk.connection;
  const auto bf = b_family(s, p, alpha);
  const auto Gd = spray_fiber_derivative(s, p, ctx.params);
  const auto Nd = connection_fiber_derivative(s, p, ctx.params);
  const double tol = tolerance::structural;
  std::vector<CheckResult> out;

  {
    std::vector<double> lhs, rhs;
    for (int i = 0; i < kDim; ++i) {
      double by = 0.0, ny = 0.0;
      for (int j = 0; j < kDim; ++j) {
        by += bf.Bj[i][j] * y[j];
        ny += cd.N[i][j] * y[j];
      }
      lhs.push_back(by);
      rhs.push_back(2.0 * bf.B[i]);
      lhs.push_back(ny);
      rhs.push_back(2.0 * cd.G[i]);
      for (int j = 0; j < kDim; ++j) {
        double bjk = 0.0, gjk = 0.0;
        for (int k = 0; k < kDim; ++k) {
          bjk += bf.Bjk[i][j][k] * y[k];
          gjk += cd.Gjk[i][j][k] * y[k];
          double bjkl = 0.0;
          for (int l = 0; l < kDim; ++l) bjkl += bf.Bjkl[i][j][k][l] * y[l];
          lhs.push_back(bjkl);
          rhs.push_back(0.0);
          lhs.push_back(cd.Gjk[i][j][k]);
          rhs.push_back(cd.Gjk[i][k][j]);
        }
        lhs.push_back(bjk);
        rhs.push_back(bf.Bj[i][j]);
        lhs.push_back(gjk);
        rhs.push_back(cd.N[i][j]);
      }
    }
    out.push_back(make_check("homogeneity_ladder", std::move(lhs), std::move(rhs), tol));
  }
  {
    auto lhs = flat(Gd), rhs = flat(cd.N);
    append(lhs, flat(Nd));
    append(rhs, flat(cd.Gjk));
    out.push_back(make_check("spray_coherence", std::move(lhs), std::move(rhs), tol));
  }
  {
    Mat4<> yN{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) yN[i][j] += y[k] * Nd[i][k][j];
    out.push_back(make_check("strong_torsion", flat(yN), flat(cd.N), tol));
  }

  double gl_scale = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double t = 0.0;
      for (int h = 0; h < kDim; ++h) t += std::abs(cd.Gjk[h][i][j] * cd.l_down[h]);
      gl_scale = std::max(gl_scale, t);
    }
  const PhaseContext pctx(s, p, ctx.params);
  {
    Mat4<> half_f;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) half_f[i][j] = 0.5 * alpha * s.F[i][j];
    out.push_back(make_check("dl_identity", flat(d_distinguished_section(pctx)), flat(half_f), tol, gl_scale));
  }
  {
    const auto dl = dl_derivatives(s, p, ctx.params);
    Mat4<> af, anti;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        af[i][j] = alpha * s.F[i][j];
        anti[i][j] = dl.dl[i][j] - dl.dl[j][i];
      }
    out.push_back(make_check("f_from_dl", flat(af), flat(anti), tol, gl_scale));
  }
  out.push_back(make_check("ricci_hessian", flat(pk.d.ricci), flat(pk.d.ricci_from_block), tol));
  {
    Mat4<> rec{};
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k)
        for (int j = 0; j < kDim; ++j)
          for (int l = 0; l < kDim; ++l) rec[i][k] += pk.d.R_block[i][j][k][l] * y[j] * y[l];
    out.push_back(make_check("tidal_reconstruction", flat(rec), flat(pk.E), tol));
  }
  {
    Tensor3<> minus;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) minus[i][j][k] = -pk.R[i][k][j];
    out.push_back(make_check("curvature_antisymmetry", flat(pk.R), flat(minus), tol));
  }
  {
    const auto E_low = mat_mul(s.g, pk.E);
    double llE = 0.0, terms = 0.0;
    for (int k = 0; k < kDim; ++k)
      for (int i = 0; i < kDim; ++i) {
        const double t = cd.l_up[k] * cd.l_up[i] * E_low[k][i];
        llE += t;
        terms += std::abs(t);
      }
    out.push_back(make_check("longitudinal_tidal", {llE}, {0.0}, tol, terms));
  }
  {
    double tr = 0.0, terms = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        const double t = s.ginv[i][j] * pk.E_tilde[j][i];
        tr += t;
        terms += std::abs(t);
      }
    out.push_back(make_check("tilde_trace", {tr}, {pk.trace_E}, tol, terms));
  }
  {
    const auto lj = distinguished_covector(pctx.jet());
    std::vector<double> lhs = flat(cd.h), rhs;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) rhs.push_back(p.norm * lj[i].d[4 + j]);
    double terms = 0.0;
    for (int i = 0; i < kDim; ++i) {
      double hy = 0.0, t = 0.0;
      for (int j = 0; j < kDim; ++j) {
        hy += cd.h[i][j] * y[j];
        t += std::abs(cd.h[i][j] * y[j]);
      }
      lhs.push_back(hy);
      rhs.push_back(0.0);
      terms = std::max(terms, t);
    }
    out.push_back(make_check("angular_metric", std::move(lhs), std::move(rhs), tol, terms));
  }
  if (alpha == 0.0) {
    std::vector<double> lhs = flat(pk.E), rhs = flat(pk.e);
    append(lhs, flat(pk.d.ricci));
    append(rhs, flat(pk.base.ricci));
    Tensor3<> r{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l) r[i][j][k] += pk.base.riemann[i][l][j][k] * y[l];
    append(lhs, flat(pk.R));
    append(rhs, flat(r));
    out.push_back(make_check("alpha0_reduction", std::move(lhs), std::move(rhs), tol));
  }
  return out;
}

std::vector<CheckResult> check_homogeneous_maxwell(const CheckContext& ctx) {
  const auto& s = ctx.sample;
  const auto& p = ctx.p;
  const auto tt = tidal_tensor(s, p, ctx.params);
  Mat4<> sym, anti, cyc;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      sym[i][j] = tt.E_tilde[j][i];
      anti[i][j] = 0.5 * (tt.E_tilde[i][j] - tt.E_tilde[j][i]);
    }
  // ∇_k F_ij with the Levi-Civita connection.
  auto nabla = [&](int k, int i, int j) {
    double v = s.dF[i][j][k];
    for (int h = 0; h < kDim; ++h) v -= s.gamma[h][i][k] * s.F[h][j] + s.gamma[h][j][k] * s.F[i][h];
    return v;
  };
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double c = 0.0;
      for (int k = 0; k < kDim; ++k) c += (nabla(k, i, j) + nabla(j, k, i) + nabla(i, j, k)) * p.y[k];
      cyc[i][j] = -ctx.params.alpha * p.norm * c;
    }
  const double scale = max_abs(tt.E_tilde);
  std::vector<CheckResult> out;
  out.push_back(make_check("homogeneous_maxwell", flat(tt.E_tilde), flat(sym), tolerance::structural));
  out.push_back(make_check("maxwell_cyclic", flat(anti), flat(cyc), tolerance::maxwell_cyclic, scale));
  return out;
}

std::vector<CheckResult> check_inhomogeneous_maxwell(const CheckContext& ctx) {
  const auto td = trace_decomposition(ctx.sample, ctx.p, ctx.params);
  const auto dens = densities(ctx);
  const double alpha = ctx.params.alpha;
  const double n2 = ctx.p.norm * ctx.p.norm;
  const double charge = std::numbers::pi * alpha * dens.rho_c * n2;
  const double dv = divergence_norm_gradient(ctx.sample, ctx.p, ctx.params);
  const double rhs46 = td.e_trace - 4.0 * charge + td.b_quadratic;
  const double rhs47 = td.e_trace - 2.0 * charge - dv;
  const double s46 = std::max({std::abs(td.e_trace), std::abs(4.0 * charge), std::abs(td.b_quadratic)});
  const double s47 = std::max({std::abs(td.e_trace), std::abs(2.0 * charge), std::abs(dv)});
  std::vector<CheckResult> out;
  out.push_back(make_check("inhomogeneous_maxwell", {td.lhs}, {rhs46}, tolerance::inhomogeneous_maxwell, s46));
  out.push_back(make_check("inhomogeneous_maxwell_alt", {td.lhs}, {rhs47}, tolerance::inhomogeneous_maxwell, s47));
  out.push_back(make_check("maxwell_variants_agree", {rhs46}, {rhs47}, tolerance::maxwell_variants,
                           std::max(s46, s47)));
  return out;
}

namespace {

CheckResult check_trace_decomposition(const CheckContext& ctx) {
  const auto td = trace_decomposition(ctx.sample, ctx.p, ctx.params);
  const double terms =
      std::max({std::abs(td.e_trace), std::abs(2.0 * td.divergence), std::abs(td.b_quadratic)});
  return make_check("trace_decomposition", {td.lhs}, {td.rhs}, tolerance::trace_decomposition, terms);
}

}  // namespace

std::vector<CheckResult> check_einstein_trace(const CheckContext& ctx) {
  if (!ctx.einstein_consistent) return {};
  const auto& s = ctx.sample;
  const auto& p = ctx.p;
  const double pi = std::numbers::pi;
  const auto e = electrogravitic_tensor(base_riemann(Christoffel{s.gamma, s.dgamma}), p.y);
  Mat4<> T = stress_energy_em(s.F, s.g);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) T[i][j] += ctx.T_matter[i][j];
  const double q = p.sign * p.norm * p.norm;
  const double Tyy = quadratic(T, p.y, p.y);
  const double Ttr = trace(mat_mul(s.ginv, T));
  const double rhs = -8.0 * pi * (Tyy - 0.5 * Ttr * q);
  std::vector<CheckResult> out;
  out.push_back(make_check("einstein_trace", {trace(e)}, {rhs}, tolerance::field_equation,
                           std::max({max_abs(e), 8.0 * pi * std::abs(Tyy), 4.0 * pi * std::abs(Ttr * q)})));
  if (ctx.params.alpha != 0.0) {
    const auto dens = densities(ctx);
    const auto tt = tidal_tensor(s, p, ctx.params);
    const auto dl = dl_derivatives(s, p, ctx.params);
    const auto bf = b_family(s, p, ctx.params.alpha);
    EinsteinTidalTerms t;
    t.alpha = ctx.params.alpha;
    t.sign = p.sign;
    t.norm2 = p.norm * p.norm;
    t.l_box_l = dl.l_box_l;
    t.div_b = divergence_b(s, p, t.alpha);
    t.b_quadratic = trace(mat_mul(bf.Bj, bf.Bj));
    t.rho_m = dens.rho_m;
    t.matter_trace = trace(mat_mul(s.ginv, ctx.T_matter));
    const double a2 = t.alpha * t.alpha;
    const double terms = std::max({max_abs(tt.E) / t.norm2, std::abs(2.0 / a2 * t.l_box_l),
                                   std::abs(2.0 / t.norm2 * (1.0 / a2 + 1.0) * t.div_b),
                                   std::abs(t.b_quadratic / t.norm2), 8.0 * pi * std::abs(t.rho_m),
                                   4.0 * pi * std::abs(t.matter_trace)});
    out.push_back(make_check("einstein_tidal", {tt.trace / t.norm2}, {einstein_tidal_rhs(t)},
                             tolerance::field_equation, terms));
  }
  return out;
}

std::vector<CheckResult> run_checks(const CheckContext& ctx) {
  auto out = check_structural(ctx);
  for (auto&& group : {check_homogeneous_maxwell(ctx), std::vector<CheckResult>{check_trace_decomposition(ctx)},
                       check_inhomogeneous_maxwell(ctx), check_einstein_trace(ctx)})
    out.insert(out.end(), group.begin(), group.end());
  for (auto& c : out) {
    c.scenario = ctx.scenario;
    c.point = ctx.point;
    c.alpha = ctx.params.alpha;
    c.x = ctx.p.x;
    c.y = ctx.p.y;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<PhaseSample> sample_phase_points(const Scenario& sc, std::size_t count, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a of the scenario id
  for (unsigned char c : sc.id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  const auto& box = sc.sampling;
  std::vector<PhaseSample> out;
  out.reserve(count);
  constexpr int kMaxAttempts = 100000;
  while (out.size() < count) {
    PhaseSample smp;
    int attempts = 0;
    do {
      if (++attempts > kMaxAttempts)
        throw ValidationError("sampling", "no in-chart base point found in the sampling box of '" + sc.id + "'");
      for (int i = 0; i < kDim; ++i) smp.x[i] = box.lower[i] + uniform() * (box.upper[i] - box.lower[i]);
    } while (g.chart_violation(smp.x) || A.chart_violation(smp.x));
    const auto metric = g.evaluate(smp.x).g;
    attempts = 0;
    while (true) {
      if (++attempts > kMaxAttempts)
        throw ValidationError("sampling", "no fiber vector with g(y, y) in [q_min, q_max] for '" + sc.id + "'");
      for (int i = 0; i < kDim; ++i) {
        const double d = std::abs(metric[i][i]);
        const double c = d > 0.0 ? 2.0 / std::sqrt(d) : 2.0;
        smp.y[i] = i == 0 ? uniform() * c : (2.0 * uniform() - 1.0) * c;
      }
      const double q = quadratic(metric, smp.y, smp.y);
      if (q >= box.q_min && q <= box.q_max) break;
    }
    out.push_back(smp);
  }
  return out;
}

Report run_suite(const std::vector<Scenario>& scenarios, const SuiteConfig& cfg) {
  Report r;
  r.version = library_version();
  r.seed = cfg.seed;
  r.points = cfg.points;
  struct Task {
    std::size_t scenario, point;
    PhaseSample smp;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    r.scenarios.push_back(scenarios[i].id);
    const auto pts = sample_phase_points(scenarios[i], cfg.points, cfg.seed);
    for (std::size_t k = 0; k < pts.size(); ++k) tasks.push_back({i, k, pts[k]});
  }

  std::vector<std::vector<CheckResult>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const auto& task = tasks[t];
        const auto& sc = scenarios[task.scenario];
        const std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{sc.alpha} : cfg.alphas;
        for (double a : alphas) {
          auto checks = run_checks(make_context(sc, task.smp.x, task.smp.y, a, task.point));
          results[t].insert(results[t].end(), checks.begin(), checks.end());
        }
        std::stable_sort(results[t].begin(), results[t].end(),
                         [](const CheckResult& a, const CheckResult& b) { return a.check < b.check; });
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  for (auto& group : results)
    for (auto& c : group) {
      auto& pc = r.per_check[c.check];
      (c.pass ? pc.pass : pc.fail)++;
      (c.pass ? r.pass : r.fail)++;
      pc.max_abs_residual = std::max(pc.max_abs_residual, c.abs_residual);
      if (c.mode == ResidualMode::Relative) {
        pc.max_rel_residual = std::max(pc.max_rel_residual, c.rel_residual);
        r.max_rel_residual = std::max(r.max_rel_residual, c.rel_residual);
      }
      r.checks.push_back(std::move(c));
    }
  return r;
}

std::string report_to_json(const Report& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["scenarios"] = r.scenarios;
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    // Only the worst component of each side is serialized.
    std::size_t worst = 0;
    double diff = -1.0;
    for (std::size_t k = 0; k < c.lhs.size(); ++k)
      if (std::abs(c.lhs[k] - c.rhs[k]) > diff) {
        diff = std::abs(c.lhs[k] - c.rhs[k]);
        worst = k;
      }
    ordered_json e;
    e["check"] = c.check;
    e["scenario"] = c.scenario;
    e["point"] = c.point;
    e["alpha"] = c.alpha;
    e["x"] = c.x;
    e["y"] = c.y;
    e["component"] = worst;
    e["components"] = c.lhs.size();
    e["lhs"] = c.lhs.empty() ? 0.0 : c.lhs[worst];
    e["rhs"] = c.rhs.empty() ? 0.0 : c.rhs[worst];
    e["abs_residual"] = c.abs_residual;
    e["rel_residual"] = c.rel_residual;
    e["tolerance"] = c.tolerance;
    e["mode"] = to_string(c.mode);
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  ordered_json per = ordered_json::object();
  for (const auto& [id, s] : r.per_check)
    per[id] = {{"pass", s.pass},
               {"fail", s.fail},
               {"max_rel_residual", s.max_rel_residual},
               {"max_abs_residual", s.max_abs_residual}};
  j["summary"] = {{"pass", r.pass}, {"fail", r.fail}, {"max_rel_residual", r.max_rel_residual}, {"per_check", per}};
  return j.dump(2) + "\n";
}

}  // namespace tidal
