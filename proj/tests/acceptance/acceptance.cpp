// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tidal/curvature.hpp"
#include "tidal/dynamics.hpp"
#include "tidal/io.hpp"
#include "tidal/scenario.hpp"
#include "tidal/verify.hpp"

namespace fs = std::filesystem;
using namespace tidal;
using tidal::testing::max_mag;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Worst residual over a set of check ids, re-judged against `tol` (relative) or 1e-14 (absolute mode).
struct Tally {
  std::size_t count = 0, bad = 0;
  double worst_rel = 0.0;
};

Tally tally(const Report& r, const std::set<std::string>& ids, double tol,
            const std::function<bool(const CheckResult&)>& keep = {}) {
  Tally t;
  for (const auto& c : r.checks) {
    if (!ids.count(c.check) || (keep && !keep(c))) continue;
    ++t.count;
    const bool ok = c.mode == ResidualMode::Absolute ? c.abs_residual <= kAbsoluteFloor : c.rel_residual <= tol;
    if (!ok || !c.pass) ++t.bad;
    if (c.mode == ResidualMode::Relative) t.worst_rel = std::max(t.worst_rel, c.rel_residual);
  }
  return t;
}

std::string describe(const Tally& t) {
  return std::to_string(t.count) + " checks, " + std::to_string(t.bad) + " over tolerance, max rel " + sci(t.worst_rel);
}

Scenario suite_member(const std::string& id) {
  for (const auto& s : default_suite())
    if (s.id == id) return s;
  throw std::runtime_error("no scenario " + id);
}

std::string scenario_path(const std::string& name) {
  return (fs::path(TIDAL_SCENARIO_DIR) / (name + ".json")).string();
}

// ---------------------------------------------------------------------------

Verdict structural(const Report& r, double seconds) {
  const auto t = tally(r, {"homogeneity_ladder", "spray_coherence", "strong_torsion", "dl_identity", "f_from_dl",
                           "ricci_hessian", "tidal_reconstruction", "curvature_antisymmetry", "longitudinal_tidal",
                           "tilde_trace", "angular_metric", "alpha0_reduction"},
                       1e-9);
  Verdict v;
  v.pass = t.bad == 0 && t.count > 0 && seconds < 30.0;
  v.detail = describe(t) + ", suite " + sci(seconds) + " s";
  return v;
}

Verdict homogeneous_maxwell(const Report& r) {
  const auto a = tally(r, {"homogeneous_maxwell"}, 1e-9);
  const auto b = tally(r, {"maxwell_cyclic"}, 1e-8);
  return {a.bad == 0 && b.bad == 0 && a.count > 0 && b.count > 0,
          "antisymmetric part " + describe(a) + "; cyclic side " + describe(b)};
}

Verdict inhomogeneous_maxwell(const Report& r) {
  const auto a = tally(r, {"inhomogeneous_maxwell", "inhomogeneous_maxwell_alt"}, 1e-8);
  const auto b = tally(r, {"maxwell_variants_agree"}, 1e-9);
  return {a.bad == 0 && b.bad == 0 && a.count > 0 && b.count > 0,
          "variants " + describe(a) + "; agreement " + describe(b)};
}

Verdict trace_decomposition(const Report& r) {
  const auto t = tally(r, {"trace_decomposition"}, 1e-8);
  return {t.bad == 0 && t.count > 0, describe(t)};
}

Verdict einstein_trace() {
  const auto rn = suite_member("rn_coulomb");
  const auto sch = suite_member("schwarzschild_vacuum");
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_rel = 0.0, worst_abs = 0.0;
  std::size_t n = 0;
  for (int k = 0; k < 20; ++k) {
    const double r = 4.0 + 46.0 * k / 19.0;
    const Vec4<> x{10 * u(rng), r, 0.5 + (kPi - 1) * u(rng), 2 * kPi * u(rng)};
    for (const Scenario* sc : {&rn, &sch}) {
      const auto g = sc->metric_field().evaluate(x).g;
      Vec4<> y{(1.0 + u(rng)) / std::sqrt(-g[0][0]), 0.3 * (2 * u(rng) - 1) / std::sqrt(g[1][1]),
               0.3 * (2 * u(rng) - 1) / std::sqrt(g[2][2]), 0.3 * (2 * u(rng) - 1) / std::sqrt(g[3][3])};
      for (double alpha : {0.0, 1.0}) {
        for (const auto& c : check_einstein_trace(make_context(*sc, x, y, alpha))) {
          if (c.check != "einstein_trace") continue;
          ++n;
          if (sc == &rn) worst_rel = std::max(worst_rel, c.rel_residual);
          else worst_abs = std::max(worst_abs, c.abs_residual);
        }
      }
    }
  }
  return {n == 80 && worst_rel < 1e-7 && worst_abs < 1e-10,
          std::to_string(n) + " checks at r in [4M, 50M], charged max rel " + sci(worst_rel) + ", vacuum max abs " +
              sci(worst_abs)};
}

// Plain RK4 on dx = y, dy = −γ(y, y), using only the Christoffel symbols.
std::vector<Vec4<>> levi_civita_path(const MetricField& g, Vec4<> x, Vec4<> y, double t_end, double h,
                                     const std::vector<double>& at) {
  auto rate = [&](const Vec4<>& xx, const Vec4<>& yy) {
    const auto c = christoffel(g, xx);
    Vec4<> a{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) a[i] -= c.gamma[i][j][k] * yy[j] * yy[k];
    return a;
  };
  auto add = [](const Vec4<>& a, double s, const Vec4<>& b) {
    Vec4<> o;
    for (int i = 0; i < kDim; ++i) o[i] = a[i] + s * b[i];
    return o;
  };
  std::vector<Vec4<>> out;
  std::size_t next = 0;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) * h;
    while (next < at.size() && std::abs(at[next] - t) < 1e-9 * h) {
      out.push_back(x);
      ++next;
    }
    if (s == steps) break;
    const auto k1x = y, k1y = rate(x, y);
    const auto k2x = add(y, h / 2, k1y), k2y = rate(add(x, h / 2, k1x), k2x);
    const auto k3x = add(y, h / 2, k2y), k3y = rate(add(x, h / 2, k2x), k3x);
    const auto k4x = add(y, h, k3y), k4y = rate(add(x, h, k3x), k4x);
    for (int i = 0; i < kDim; ++i) {
      x[i] += h / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
      y[i] += h / 6 * (k1y[i] + 2 * k2y[i] + 2 * k3y[i] + k4y[i]);
    }
  }
  return out;
}

Verdict alpha_zero_reduction() {
  // tensors
  double worst_e = 0.0, worst_ricci = 0.0;
  for (const auto& sc : default_suite()) {
    const auto g = sc.metric_field();
    const auto A = sc.potential_field();
    for (const auto& p : sample_phase_points(sc, 50, 6)) {
      const auto s = sample_fields(g, A, p.x);
      const auto pp = make_phase_point(p.x, p.y, s.g);
      const auto base = base_riemann(g, p.x);
      const auto tt = tidal_tensor(s, pp, {0.0, 0.0});
      const auto e = electrogravitic_tensor(base, p.y);
      const auto d = d_curvature(s, pp, {0.0, 0.0});
      const double se = std::max({max_mag(e), max_mag(tt.E), 1e-14});
      const double sr = std::max({max_mag(d.R_block), max_mag(base.riemann), 1e-14});
      worst_e = std::max(worst_e, tidal::testing::max_diff(tt.E, e) / se);
      worst_ricci = std::max(worst_ricci, tidal::testing::max_diff(d.ricci, base.ricci) / sr);
    }
  }
  // worldlines
  IntegratorConfig cfg;
  cfg.t_end = 50;
  cfg.samples = 51;
  const auto times = sample_times(cfg);
  double worst_path = 0.0;
  const Vec4<> x0{0, 10, kPi / 2, 0};
  for (const auto& sc : {suite_member("schwarzschild_vacuum"), suite_member("rn_coulomb")}) {
    const auto g = sc.metric_field();
    for (const Vec4<>& y_raw : {Vec4<>{1, 0, 0, 0.0316}, Vec4<>{1, 0.05, 0.002, 0.02}}) {
      const auto y0 = normalize_velocity(g.evaluate(x0).g, y_raw, -1);
      const auto lib = integrate_worldline(g, sc.potential_field(), {0.0, 0.0}, x0, y0, cfg);
      const auto ref = levi_civita_path(g, x0, y0, cfg.t_end, 2e-3, times);
      if (lib.truncation.truncated || lib.samples.size() != ref.size()) return {false, "trajectory truncated"};
      for (std::size_t k = 0; k < ref.size(); ++k)
        for (int i = 0; i < kDim; ++i)
          worst_path = std::max(worst_path, std::abs(lib.samples[k].x[i] - ref[k][i]) / std::max(1.0, std::abs(ref[k][i])));
    }
  }
  return {worst_e < 1e-10 && worst_ricci < 1e-9 && worst_path < 1e-8,
          "E vs e " + sci(worst_e) + ", Ricci vs base " + sci(worst_ricci) + ", worldline vs Levi-Civita path " +
              sci(worst_path) + " over t in [0, 50]"};
}

std::pair<double, double> w_mismatch(const DeviationTrajectory& a, const DeviationTrajectory& b) {
  double m = 0.0, s = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    for (int i = 0; i < kDim; ++i) {
      m = std::max(m, std::abs(a.samples[k].w[i] - b.samples[k].w[i]));
      s = std::max(s, std::abs(a.samples[k].w[i]));
    }
  return {m, s};
}

Verdict dynamics_oracles() {
  bool ok = true;
  std::ostringstream detail;
  const auto flat = builtin_metric("minkowski");
  const auto ub = builtin_potential("uniform_b", {{"B", 0.7}, {"axis", 3}});
  // (a) cyclotron: radius u/(αB), closure after 2π/(αB)
  {
    const double u = 0.3, omega = 0.7;
    const Vec4<> x0{0, 1, 1, 1}, y0{std::sqrt(1 + u * u), u, 0, 0};
    IntegratorConfig cfg;
    cfg.t_end = 2 * kPi / omega;
    cfg.samples = 201;
    const auto tr = integrate_worldline(flat, ub, {1.0, 0.0}, x0, y0, cfg);
    const double R = u / omega;
    double radius = 0.0;
    for (const auto& s : tr.samples) radius = std::max(radius, std::abs(std::hypot(s.x[1] - 1, s.x[2] - (1 - R)) - R) / R);
    const auto& end = tr.samples.back();
    const double closure = std::hypot(end.x[1] - x0[1], end.x[2] - x0[2]) / R;
    ok = ok && radius < 1e-6 && closure < 1e-6;
    detail << "(a) radius " << sci(radius) << " closure " << sci(closure);
  }
  // (b) circular orbit at r = 10
  {
    const auto sch = builtin_metric("schwarzschild", {{"M", 1}});
    const Vec4<> x0{0, 10, kPi / 2, 0};
    const double omega = std::sqrt(1.0 / 1000.0);
    const auto y0 = normalize_velocity(sch.evaluate(x0).g, {1, 0, 0, omega}, -1);
    IntegratorConfig cfg;
    cfg.t_end = 2 * kPi / (omega * y0[0]);
    const auto tr = integrate_worldline(sch, builtin_potential("zero", {}, Chart::Spherical), {0.0, 0.0}, x0, y0, cfg);
    double dev = 0.0;
    for (const auto& s : tr.samples) dev = std::max(dev, std::abs(s.x[1] - 10) / 10);
    ok = ok && dev < 1e-6 && !tr.truncation.truncated;
    detail << "; (b) r drift " << sci(dev);
  }
  // (c) tidal form against two neighbouring worldlines, every catalog scenario
  {
    double worst = 0.0, ratio_lo = 1e9, ratio_hi = 0.0;
    int resolved = 0, unresolved = 0;
    IntegratorConfig cfg;
    cfg.t_end = 10;
    cfg.samples = 11;
    cfg.abs_tol = cfg.rel_tol = 1e-13;
    IntegratorConfig loose = cfg;
    loose.abs_tol = loose.rel_tol = 1e-12;
    for (const auto& sc : default_suite()) {
      const auto g = sc.metric_field();
      const auto A = sc.potential_field();
      const auto y0 = sc.initial_velocity();
      const bool spherical = g.chart() == Chart::Spherical;
      const Vec4<> w0 = spherical ? Vec4<>{0, 0.5, 0, 0.01} : Vec4<>{0, 0.1, 0.2, 0};
      const Vec4<> v0{0, 0.05, 0, 0.01};
      for (double alpha : {0.0, 1.0}) {
        const ConnectionParams cp{alpha, 0.0};
        const auto tidal = integrate_deviation_tidal(g, A, cp, sc.x0, y0, w0, v0, cfg);
        const auto coarse = two_worldline_oracle(g, A, cp, sc.x0, y0, w0, v0, 1e-5, cfg);
        const auto fine = two_worldline_oracle(g, A, cp, sc.x0, y0, w0, v0, 5e-6, cfg);
        const auto [m1, s1] = w_mismatch(tidal, coarse);
        const auto [m2, s2] = w_mismatch(tidal, fine);
        worst = std::max(worst, m1 / s1);
        // integrator noise in the difference quotient, from the same ε at a looser tolerance
        auto [noise, _] = w_mismatch(coarse, two_worldline_oracle(g, A, cp, sc.x0, y0, w0, v0, 1e-5, loose));
        double xmax = 0.0;  // plus round-off of the quotient itself
        for (const auto& smp : coarse.samples)
          for (int i = 0; i < kDim; ++i) xmax = std::max(xmax, std::abs(smp.x[i]));
        noise = std::max(noise, 16 * std::numeric_limits<double>::epsilon() * xmax / 1e-5);
        if (m1 < 10 * noise) {  // no O(ε) term above the noise: families linear in the separation
          ++unresolved;
          continue;
        }
        ++resolved;
        ratio_lo = std::min(ratio_lo, m1 / m2);
        ratio_hi = std::max(ratio_hi, m1 / m2);
      }
    }
    ok = ok && worst < 1e-3 && resolved >= 4 && ratio_lo >= 1.6 && ratio_hi <= 2.4;
    detail << "; (c) deviation vs two worldlines " << sci(worst) << ", Richardson " << sci(ratio_lo) << ".."
           << sci(ratio_hi) << " over " << resolved << " families (" << unresolved << " below integrator noise)";
  }
  return {ok, detail.str()};
}

Verdict classical_equivalence() {
  const auto flat = builtin_metric("minkowski");
  const Vec4<> x0{0, 3, 1, 1}, y0{std::sqrt(1.09), 0.3, 0, 0};
  IntegratorConfig cfg;
  cfg.t_end = 10;
  cfg.samples = 11;
  double worst = 0.0;
  for (const auto& A : {builtin_potential("uniform_b", {{"B", 0.7}, {"axis", 3}}), builtin_potential("coulomb", {{"Q", 1}})}) {
    for (double alpha : {-1.0, 0.5, 1.0, 3.0}) {
      const auto s = sample_fields(flat, A, x0);
      const auto cd = connection_data(s, make_phase_point(x0, y0, s.g), {alpha, 0.0});
      Vec4<> wd{0, 0.02, 0.01, 0};
      wd[0] = y0[1] * wd[1] / y0[0];  // y·dw/dt = 0
      const Vec4<> w0{0, 0.1, 0.2, 0.05};
      Vec4<> v0 = wd;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) v0[i] += cd.N[i][j] * w0[j];
      const auto tidal = integrate_deviation_tidal(flat, A, {alpha, 0.0}, x0, y0, w0, v0, cfg);
      const auto converted = convert_deviation_frame(tidal, flat, A, {alpha, 0.0}, RateFrame::LeviCivita);
      const auto classical = integrate_deviation_classical(flat, A, {alpha, 0.0}, x0, y0, w0, v0, cfg);
      double m = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < classical.samples.size(); ++k)
        for (int i = 0; i < kDim; ++i) {
          m = std::max({m, std::abs(classical.samples[k].w[i] - converted.samples[k].w[i]),
                        std::abs(classical.samples[k].v[i] - converted.samples[k].v[i])});
          scale = std::max({scale, std::abs(classical.samples[k].w[i]), std::abs(classical.samples[k].v[i])});
        }
      worst = std::max(worst, m / scale);
    }
  }
  return {worst < 1e-6, "uniform B and Coulomb fields at α in {-1, 0.5, 1, 3}: max rel " + sci(worst)};
}

// ---------------------------------------------------------------------------
// End-to-end runs of the executable.

int shell(const std::string& args, const fs::path& out, const fs::path& err) {
  const std::string cmd = std::string("\"") + TIDAL_EXE + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const fs::path& dir) {
  std::ostringstream detail;
  bool ok = true;
  // two verify runs with the same seed
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const auto report = dir / ("report" + std::to_string(k) + ".json");
    const int code = shell("verify --seed 7 --points 10 --out \"" + report.string() + "\"", dir / "verify.out",
                           dir / "verify.err");
    ok = ok && code == 0;
    reports[k] = slurp(report);
  }
  const bool same_report = !reports[0].empty() && reports[0] == reports[1];
  ok = ok && same_report;
  detail << "report identical " << (same_report ? "yes" : "no");

  std::size_t csv_same = 0, csv_total = 0;
  for (const std::string& args : {"simulate --scenario \"" + scenario_path("cyclotron") + "\"",
                                  "simulate --scenario \"" + scenario_path("schwarzschild_circular") + "\"",
                                  "deviate --scenario \"" + scenario_path("cyclotron") + "\"",
                                  "deviate --scenario \"" + scenario_path("schwarzschild_deviation") + "\" --form oracle",
                                  "deviate --scenario \"" + scenario_path("flat_free") + "\" --form classical",
                                  "sweep --scenario \"" + scenario_path("rn_coulomb") + "\" --points 3"}) {
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / ("out" + std::to_string(k) + ".csv");
      ok = ok && shell(args, path, dir / "csv.err") == 0;
      runs[k] = slurp(path);
    }
    ++csv_total;
    if (!runs[0].empty() && runs[0] == runs[1] && to_csv(parse_csv(runs[0])) == runs[0]) ++csv_same;
  }
  ok = ok && csv_same == csv_total;
  detail << ", CSV identical " << csv_same << "/" << csv_total;

  // exit-code contract
  struct Expect {
    std::string args;
    int code;
  };
  const std::vector<Expect> expectations{
      {"list", 0},
      {"verify --points 2 --out \"" + (dir / "r.json").string() + "\"", 0},
      {"verify --negative-control --points 2 --out \"" + (dir / "r.json").string() + "\"", 1},
      {"simulate --scenario \"" + scenario_path("does_not_exist") + "\"", 2},
      {"compute --scenario \"" + scenario_path("schwarzschild_vacuum") + "\" --x 0,1.5,1,0", 2},
      {"simulate --scenario \"" + scenario_path("radial_infall") + "\"", 3},
  };
  std::size_t honoured = 0;
  for (const auto& e : expectations) {
    const int code = shell(e.args, dir / "exit.out", dir / "exit.err");
    if (code == e.code) ++honoured;
    else detail << " [" << e.args.substr(0, e.args.find(' ')) << " gave " << code << ", expected " << e.code << "]";
  }
  ok = ok && honoured == expectations.size();
  detail << ", exit codes " << honoured << "/" << expectations.size();
  return {ok, detail.str()};
}

Verdict negative_control(const fs::path& dir) {
  const auto report = dir / "negative.json";
  const int code = shell("verify --scenario \"" + scenario_path("negative_control") + "\" --points 5 --out \"" +
                             report.string() + "\"",
                         dir / "neg.out", dir / "neg.err");
  std::size_t torsion_fail = 0, other_fail = 0;
  const auto j = nlohmann::json::parse(slurp(report), nullptr, false);
  if (!j.is_discarded())
    for (const auto& c : j["checks"])
      if (!c["pass"].get<bool>()) (c["check"] == "strong_torsion" ? torsion_fail : other_fail)++;
  return {code == 1 && torsion_fail > 0,
          "exit " + std::to_string(code) + ", strong_torsion failures " + std::to_string(torsion_fail) +
              ", other failures " + std::to_string(other_fail)};
}

}  // namespace

int main() {
  const auto dir = fs::temp_directory_path() / "tidal_acceptance";
  fs::create_directories(dir);

  SuiteConfig cfg;
  cfg.points = 50;
  cfg.seed = 0;
  cfg.alphas = kAcceptanceAlphas;
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = run_suite(default_suite(), cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"structural identities", [&] { return structural(report, seconds); }},
      {"homogeneous Maxwell", [&] { return homogeneous_maxwell(report); }},
      {"inhomogeneous Maxwell", [&] { return inhomogeneous_maxwell(report); }},
      {"trace decomposition", [&] { return trace_decomposition(report); }},
      {"Einstein trace", einstein_trace},
      {"alpha = 0 reduction", alpha_zero_reduction},
      {"dynamics oracles", dynamics_oracles},
      {"classical vs tidal deviation", classical_equivalence},
      {"determinism and exit codes", [&] { return determinism(dir); }},
      {"negative control", [&] { return negative_control(dir); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%-4s %2zu %-30s %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(dir);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
