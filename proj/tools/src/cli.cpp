#include "tidal_cli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "tidal/io.hpp"
#include "tidal/scenario.hpp"
#include "tidal/verify.hpp"
#include "tidal_cli/svg.hpp"

namespace tidal::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::vector<std::string> scenarios;
  std::string out;
  std::uint64_t seed = 0;
  std::string format;
  std::string plot;
  std::string plot_axes;
  std::size_t points = 0;
  std::string alpha;
  bool echo_defaults = false;
  std::string x, y;
  unsigned threads = 0;
  std::string form = "tidal";
  std::string frame = "adapted";
  bool negative_control = false;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("tidal", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TIDAL_LOG")) log->set_level(spdlog::level::from_str(env));
  return log;
}

Vec4<> parse_vec4(const std::string& text, const std::string& flag) {
  Vec4<> v{};
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == kDim) throw ValidationError(flag, "expected 4 comma-separated numbers");
    std::size_t used = 0;
    try {
      v[k] = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError(flag, "bad number '" + item + "'");
    ++k;
  }
  if (k != kDim) throw ValidationError(flag, "expected 4 comma-separated numbers");
  return v;
}

double parse_number(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw ValidationError(flag, "bad number '" + s + "'");
  return v;
}

std::vector<Scenario> load_all(const Options& o) {
  std::vector<Scenario> out;
  for (const auto& path : o.scenarios) out.push_back(load_scenario(path));
  return out;
}

const Scenario& single(const std::vector<Scenario>& list, const char* command) {
  if (list.size() != 1)
    throw ValidationError("--scenario", std::string(command) + " takes exactly one scenario");
  return list.front();
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ValidationError("--out", "cannot write '" + o.out + "'");
  f << text;
}

void write_plot(const std::string& path, const std::vector<Series>& series, const PlotLabels& labels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("--plot", "cannot write '" + path + "'");
  f << svg_plot(series, labels);
}

std::string table_json(const CsvTable& t, const Truncation& tr) {
  ordered_json j;
  j["columns"] = t.header;
  j["rows"] = t.rows;
  j["truncation"] = {{"truncated", tr.truncated}, {"reason", tr.reason}, {"t", tr.t}};
  return j.dump(2) + "\n";
}

std::string render_table(const CsvTable& t, const Truncation& tr, const std::string& format) {
  return format == "json" ? table_json(t, tr) : to_csv(t);
}

// ---------------------------------------------------------------------------

int cmd_list(const Options& o, std::ostream& out) {
  if (o.format == "json") {
    ordered_json j;
    for (const auto& [key, cat] : {std::pair{"metrics", metric_catalog()}, std::pair{"potentials", potential_catalog()}}) {
      ordered_json a = ordered_json::array();
      for (const auto& e : cat) a.push_back({{"name", e.name}, {"params", e.param_keys}, {"description", e.description}});
      j[key] = a;
    }
    emit(j.dump(2) + "\n", o, out);
    return kOk;
  }
  std::ostringstream os;
  auto section = [&os](const char* title, const std::vector<CatalogEntry>& cat) {
    os << title << ":\n";
    for (const auto& e : cat) {
      std::string keys;
      for (const auto& k : e.param_keys) keys += (keys.empty() ? "" : ", ") + k;
      os << "  " << std::left << std::setw(20) << e.name << " (" << keys << ")  " << e.description << '\n';
    }
  };
  section("metrics", metric_catalog());
  section("potentials", potential_catalog());
  emit(os.str(), o, out);
  return kOk;
}

int cmd_compute(const Options& o, std::ostream& out) {
  const auto list = load_all(o);
  const Scenario& sc = single(list, "compute");
  const Vec4<> x = o.x.empty() ? sc.x0 : parse_vec4(o.x, "--x");
  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  if (auto why = g.chart_violation(x)) throw ChartError("--x: " + *why);
  if (auto why = A.chart_violation(x)) throw ChartError("--x: " + *why);
  Vec4<> y = o.y.empty() ? sc.y0 : parse_vec4(o.y, "--y");
  if (sc.normalize) y = normalize_velocity(g.evaluate(x).g, y, *sc.normalize);
  const auto alphas = o.alpha.empty() ? std::vector<double>{sc.alpha} : parse_alpha_list(o.alpha);
  std::vector<std::string> packets;
  for (double a : alphas) packets.push_back(packet_to_json(compute_packet(g, A, sc.connection_params(a), x, y)));
  if (packets.size() == 1) {
    emit(packets.front(), o, out);
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& p : packets) arr.push_back(ordered_json::parse(p));
    emit(arr.dump(2) + "\n", o, out);
  }
  return kOk;
}

std::pair<int, int> plot_axes(const Options& o) {
  if (o.plot_axes.empty()) return {1, 2};
  const auto pos = o.plot_axes.find(',');
  if (pos == std::string::npos) throw ValidationError("--plot-axes", "expected two indices like 1,2");
  const int a = static_cast<int>(parse_number(o.plot_axes.substr(0, pos), "--plot-axes"));
  const int b = static_cast<int>(parse_number(o.plot_axes.substr(pos + 1), "--plot-axes"));
  if (a < 0 || a >= kDim || b < 0 || b >= kDim) throw ValidationError("--plot-axes", "indices must be in 0..3");
  return {a, b};
}

int finish_truncated(const Truncation& tr, spdlog::logger& log) {
  if (!tr.truncated) return kOk;
  log.error("integration truncated at t={}: {}", format_double(tr.t), tr.reason);
  return kTruncated;
}

int cmd_simulate(const Options& o, std::ostream& out, spdlog::logger& log) {
  const auto list = load_all(o);
  const Scenario& sc = single(list, "simulate");
  validate(sc.integrator);
  const auto traj = integrate_worldline(sc.metric_field(), sc.potential_field(), sc.connection_params(), sc.x0,
                                        sc.initial_velocity(), sc.integrator);
  log.info("{}: {} steps, max norm drift {}", sc.id, traj.steps, format_double(traj.max_norm_drift));
  emit(render_table(trajectory_table(traj), traj.truncation, o.format), o, out);
  if (!o.plot.empty()) {
    Series s{sc.id, {}, {}};
    const bool spherical = sc.metric_field().chart() == Chart::Spherical && o.plot_axes.empty();
    const auto [a, b] = plot_axes(o);
    for (const auto& smp : traj.samples) {
      if (spherical) {
        const double r = smp.x[1], th = smp.x[2], ph = smp.x[3];
        s.x.push_back(r * std::sin(th) * std::cos(ph));
        s.y.push_back(r * std::sin(th) * std::sin(ph));
      } else {
        s.x.push_back(smp.x[a]);
        s.y.push_back(smp.x[b]);
      }
    }
    const std::string xa = spherical ? "r sin θ cos φ" : "x" + std::to_string(a);
    const std::string ya = spherical ? "r sin θ sin φ" : "x" + std::to_string(b);
    write_plot(o.plot, {s}, {"worldline " + sc.id, xa, ya});
  }
  return finish_truncated(traj.truncation, log);
}

int cmd_deviate(const Options& o, std::ostream& out, spdlog::logger& log) {
  const auto list = load_all(o);
  const Scenario& sc = single(list, "deviate");
  if (!sc.deviation) throw ValidationError("deviation", "the deviate command needs a deviation block");
  validate(sc.integrator);
  RateFrame frame;
  if (o.frame == "adapted")
    frame = RateFrame::Adapted;
  else if (o.frame == "levi-civita")
    frame = RateFrame::LeviCivita;
  else
    throw ValidationError("--frame", "expected adapted or levi-civita");
  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  const auto params = sc.connection_params();
  const auto y0 = sc.initial_velocity();
  const auto& d = *sc.deviation;
  DeviationTrajectory traj;
  if (o.form == "tidal")
    traj = integrate_deviation_tidal(g, A, params, sc.x0, y0, d.w0, d.v0, sc.integrator);
  else if (o.form == "classical")
    traj = integrate_deviation_classical(g, A, params, sc.x0, y0, d.w0, d.v0, sc.integrator);
  else if (o.form == "oracle")
    traj = two_worldline_oracle(g, A, params, sc.x0, y0, d.w0, d.v0, d.epsilon, sc.integrator);
  else
    throw ValidationError("--form", "expected tidal, classical or oracle");
  if (traj.frame != frame) traj = convert_deviation_frame(traj, g, A, params, frame);
  log.info("{}: {} deviation, {} steps", sc.id, o.form, traj.steps);
  emit(render_table(deviation_table(traj), traj.truncation, o.format), o, out);
  if (!o.plot.empty()) {
    Series s{sc.id, {}, {}};
    for (const auto& smp : traj.samples) {
      double n2 = 0.0;
      for (double c : smp.w) n2 += c * c;
      s.x.push_back(smp.t);
      s.y.push_back(std::sqrt(n2));
    }
    write_plot(o.plot, {s}, {"deviation " + sc.id + " (" + o.form + ")", "t", "|w|"});
  }
  return finish_truncated(traj.truncation, log);
}

int cmd_verify(const Options& o, std::ostream& out, spdlog::logger& log) {
  auto list = load_all(o);
  SuiteConfig cfg;
  cfg.points = o.points;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  if (!o.alpha.empty())
    cfg.alphas = parse_alpha_list(o.alpha);
  else if (list.empty())
    cfg.alphas = kAcceptanceAlphas;
  if (list.empty()) list = default_suite();
  if (o.negative_control) list.push_back(negative_control());
  for (const auto& sc : list) log.info("scenario {}", sc.id);

  const auto report = run_suite(list, cfg);
  const std::string path = o.out.empty() ? "tidal_report.json" : o.out;
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("--out", "cannot write '" + path + "'");
    f << report_to_json(report);
  }

  out << std::left << std::setw(28) << "check" << std::right << std::setw(8) << "pass" << std::setw(8) << "fail"
      << "  max_rel" << '\n';
  for (const auto& [id, s] : report.per_check)
    out << std::left << std::setw(28) << id << std::right << std::setw(8) << s.pass << std::setw(8) << s.fail
        << "  " << format_double(s.max_rel_residual) << (s.fail ? "  FAIL" : "") << '\n';
  out << "total: " << report.pass << " pass, " << report.fail << " fail, max_rel_residual "
      << format_double(report.max_rel_residual) << '\n'
      << "report: " << path << '\n';

  if (!o.plot.empty()) {
    Series s{"log10 max relative residual", {}, {}};
    double k = 0.0;
    for (const auto& [id, c] : report.per_check) {
      s.x.push_back(k++);
      s.y.push_back(std::log10(std::max(c.max_rel_residual, 1e-17)));
    }
    write_plot(o.plot, {s}, {"verification residuals", "check index (alphabetical)", "log10 residual"});
  }
  return report.all_pass() ? kOk : kVerifyFailed;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto list = load_all(o);
  const Scenario& sc = single(list, "sweep");
  const auto alphas = o.alpha.empty() ? kAcceptanceAlphas : parse_alpha_list(o.alpha);
  if (alphas.empty()) throw ValidationError("--alpha", "empty α set");
  const std::size_t points = o.points;
  const auto samples = sample_phase_points(sc, points, o.seed);

  static const std::vector<std::string> kResidualColumns{
      "homogeneity_ladder", "spray_coherence",       "strong_torsion",       "dl_identity",
      "tidal_reconstruction", "homogeneous_maxwell", "maxwell_cyclic",       "trace_decomposition",
      "inhomogeneous_maxwell", "inhomogeneous_maxwell_alt"};
  CsvTable t;
  t.header = {"point", "alpha"};
  for (const char* p : {"x", "y"})
    for (int i = 0; i < kDim; ++i) t.header.push_back(p + std::to_string(i));
  for (const char* c : {"E_trace", "e_trace", "b_quadratic", "rho_c"}) t.header.emplace_back(c);
  for (const auto& c : kResidualColumns) t.header.push_back("rel_" + c);
  t.header.emplace_back("max_rel_residual");
  t.header.emplace_back("all_pass");

  std::vector<Series> series;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Series s{"point " + std::to_string(k), {}, {}};
    for (double a : alphas) {
      const auto ctx = make_context(sc, samples[k].x, samples[k].y, a, k);
      const auto td = trace_decomposition(ctx.sample, ctx.p, ctx.params);
      const auto checks = run_checks(ctx);
      std::vector<double> row{static_cast<double>(k), a};
      row.insert(row.end(), ctx.p.x.begin(), ctx.p.x.end());
      row.insert(row.end(), ctx.p.y.begin(), ctx.p.y.end());
      row.insert(row.end(), {td.lhs, td.e_trace, td.b_quadratic, densities(ctx).rho_c});
      double worst = 0.0;
      bool pass = true;
      for (const auto& id : kResidualColumns) {
        double v = std::nan("");
        for (const auto& c : checks)
          if (c.check == id) v = c.rel_residual;
        row.push_back(v);
      }
      for (const auto& c : checks) {
        worst = std::max(worst, c.rel_residual);
        pass = pass && c.pass;
      }
      row.push_back(worst);
      row.push_back(pass ? 1.0 : 0.0);
      t.rows.push_back(std::move(row));
      s.x.push_back(a);
      s.y.push_back(td.lhs);
    }
    if (series.size() < 6) series.push_back(std::move(s));
  }
  if (o.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json r;
      for (std::size_t c = 0; c < t.header.size(); ++c) r[t.header[c]] = row[c];
      arr.push_back(std::move(r));
    }
    emit(arr.dump(2) + "\n", o, out);
  } else {
    emit(to_csv(t), o, out);
  }
  if (!o.plot.empty()) write_plot(o.plot, series, {"tidal trace vs α: " + sc.id, "α", "E^i_i"});
  return kOk;
}

}  // namespace

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ValidationError("--alpha", "range form is start:stop:count");
    const double a = parse_number(parts[0], "--alpha"), b = parse_number(parts[1], "--alpha");
    const double n = parse_number(parts[2], "--alpha");
    if (n < 1 || n != std::floor(n)) throw ValidationError("--alpha", "count must be a positive integer");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, "--alpha"));
  if (out.empty()) throw ValidationError("--alpha", "empty α list");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  CLI::App app{"Tidal tensors of charged-particle sprays: compute, integrate and verify.", "tidal"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);
  Options o;

  auto scenario_opt = [&o](CLI::App* sub, bool repeatable) {
    sub->add_option("--scenario", o.scenarios, repeatable ? "Scenario JSON file (repeatable)" : "Scenario JSON file")
        ->check(CLI::ExistingFile);
    sub->add_flag("--echo-defaults", o.echo_defaults, "Print the scenario with every default filled in and exit");
  };
  auto out_opt = [&o](CLI::App* sub) { sub->add_option("--out", o.out, "Output file (default: stdout)"); };
  auto format_opt = [&o](CLI::App* sub, const std::string& dflt) {
    o.format = dflt;
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* list = app.add_subcommand("list", "Enumerate the metric and potential catalogs");
  out_opt(list);
  list->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* compute = app.add_subcommand("compute", "Connection, curvature and tidal tensors at one phase point (JSON)");
  scenario_opt(compute, false);
  out_opt(compute);
  compute->add_option("--x", o.x, "Base point override, four comma-separated numbers");
  compute->add_option("--y", o.y, "Fiber vector override, four comma-separated numbers");
  compute->add_option("--alpha", o.alpha, "α value(s): list a,b,c or range start:stop:count");
  compute->add_option("--format", o.format, "Output format (json only)")->check(CLI::IsMember({"json"}));

  auto* simulate = app.add_subcommand("simulate", "Integrate the scenario's worldline");
  scenario_opt(simulate, false);
  out_opt(simulate);
  simulate->add_option("--plot", o.plot, "Write an SVG plot of a coordinate pair");
  simulate->add_option("--plot-axes", o.plot_axes, "Coordinate indices for the plot, e.g. 1,2");

  auto* deviate = app.add_subcommand("deviate", "Integrate the scenario's deviation field");
  scenario_opt(deviate, false);
  out_opt(deviate);
  deviate->add_option("--plot", o.plot, "Write an SVG plot of |w|(t)");
  deviate->add_option("--form", o.form, "tidal, classical or oracle")
      ->check(CLI::IsMember({"tidal", "classical", "oracle"}));
  deviate->add_option("--frame", o.frame, "Rate channel of the output: adapted or levi-civita")
      ->check(CLI::IsMember({"adapted", "levi-civita"}));

  auto* verify = app.add_subcommand("verify", "Cross-check every identity at random phase points");
  scenario_opt(verify, true);
  verify->add_option("--out", o.out, "Report path (default: tidal_report.json)");
  verify->add_option("--seed", o.seed, "Sampler seed");
  verify->add_option("--points", o.points, "Phase points per scenario");
  verify->add_option("--alpha", o.alpha, "α values: list a,b,c or range start:stop:count");
  verify->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  verify->add_option("--plot", o.plot, "Write an SVG plot of the per-check residuals");
  verify->add_flag("--negative-control", o.negative_control, "Add the non-spray connection fixture");

  auto* sweep = app.add_subcommand("sweep", "Tidal traces and residuals across α");
  scenario_opt(sweep, false);
  out_opt(sweep);
  sweep->add_option("--seed", o.seed, "Sampler seed");
  sweep->add_option("--points", o.points, "Phase points");
  sweep->add_option("--alpha", o.alpha, "α values: list a,b,c or range start:stop:count");
  sweep->add_option("--plot", o.plot, "Write an SVG plot of E^i_i against α");

  for (auto* sub : {simulate, deviate, sweep}) format_opt(sub, "csv");
  o.format.clear();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (o.format.empty()) o.format = list->parsed() ? "text" : compute->parsed() ? "json" : "csv";
  if (verify->parsed() && verify->count("--points") == 0) o.points = 50;
  if (sweep->parsed() && sweep->count("--points") == 0) o.points = 10;

  try {
    if (o.echo_defaults) {
      auto scenarios = load_all(o);
      if (scenarios.empty()) scenarios.push_back(default_suite().front());
      for (const auto& sc : scenarios) out << scenario_to_json(sc) << '\n';
      return kOk;
    }
    if (list->parsed()) return cmd_list(o, out);
    if (compute->parsed()) return cmd_compute(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out, *log);
    if (deviate->parsed()) return cmd_deviate(o, out, *log);
    if (verify->parsed()) return cmd_verify(o, out, *log);
    if (sweep->parsed()) return cmd_sweep(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace tidal::cli
