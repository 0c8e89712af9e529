#include "tidal/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace tidal {

using nlohmann::json;

namespace {

Chart chart_of(const std::string& metric_name) {
  return metric_name == "minkowski" ? Chart::Cartesian : Chart::Spherical;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ValidationError(path, what); }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

Vec4<> vec4(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) fail(path, "expected an array of 4 numbers");
  Vec4<> v;
  for (int i = 0; i < kDim; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

FieldRef field_ref(const json& j, const std::string& path) {
  only_keys(j, path, {"name", "params"});
  if (!j.contains("name") || !j["name"].is_string()) fail(path + ".name", "expected a string");
  FieldRef r{j["name"].get<std::string>(), {}};
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) fail(path + ".params", "expected an object");
    for (const auto& [key, value] : p.items()) {
      const std::string kp = path + ".params." + key;
      if (key == "axis" && value.is_string()) {
        const auto s = value.get<std::string>();
        if (s == "x") r.params[key] = 1.0;
        else if (s == "y") r.params[key] = 2.0;
        else if (s == "z") r.params[key] = 3.0;
        else fail(kp, "axis must be x, y, z or 1..3");
      } else if (value.is_boolean()) {
        r.params[key] = value.get<bool>() ? 1.0 : 0.0;
      } else {
        r.params[key] = number(value, kp);
      }
    }
  }
  return r;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

IntegratorConfig integrator(const json& j, const std::string& path) {
  only_keys(j, path, {"method", "step", "abs_tol", "rel_tol", "max_steps", "t_start", "t_end", "samples"});
  IntegratorConfig c;
  if (j.contains("method")) {
    const auto& m = j["method"];
    if (!m.is_string()) fail(path + ".method", "expected \"rk45\" or \"rk4\"");
    const auto s = m.get<std::string>();
    if (s == "rk45") c.method = Method::RK45;
    else if (s == "rk4") c.method = Method::RK4;
    else fail(path + ".method", "expected \"rk45\" or \"rk4\"");
  }
  if (j.contains("step")) c.step = number(j["step"], path + ".step");
  if (j.contains("abs_tol")) c.abs_tol = number(j["abs_tol"], path + ".abs_tol");
  if (j.contains("rel_tol")) c.rel_tol = number(j["rel_tol"], path + ".rel_tol");
  if (j.contains("max_steps")) c.max_steps = count(j["max_steps"], path + ".max_steps");
  if (j.contains("t_start")) c.t_start = number(j["t_start"], path + ".t_start");
  if (j.contains("t_end")) c.t_end = number(j["t_end"], path + ".t_end");
  if (j.contains("samples")) c.samples = count(j["samples"], path + ".samples");
  validate(c);
  return c;
}

json params_json(const Params& p) {
  json out = json::object();
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

json vec_json(const Vec4<>& v) { return json::array({v[0], v[1], v[2], v[3]}); }

}  // namespace

MetricField Scenario::metric_field() const { return builtin_metric(metric.name, metric.params); }

PotentialField Scenario::potential_field() const {
  return builtin_potential(potential.name, potential.params, chart_of(metric.name));
}

Vec4<> Scenario::initial_velocity() const {
  const auto g = metric_field().evaluate(x0).g;
  if (normalize) return normalize_velocity(g, y0, *normalize);
  norm_and_sign(g, y0);
  return y0;
}

SamplingBox default_sampling(const FieldRef& metric) {
  SamplingBox b;
  if (chart_of(metric.name) == Chart::Cartesian) {
    b.lower = {0.0, 1.0, 1.0, 1.0};
    b.upper = {1.0, 5.0, 5.0, 5.0};
  } else {
    const auto it = metric.params.find("M");
    const double M = it == metric.params.end() ? 1.0 : it->second;
    b.lower = {0.0, 4.0 * M, 0.5, 0.0};
    b.upper = {10.0, 50.0 * M, std::numbers::pi - 0.5, 2.0 * std::numbers::pi};
  }
  return b;
}

Scenario parse_scenario(const std::string& json_text, const std::string& default_id) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("", std::string("JSON parse error: ") + e.what());
  }
  only_keys(j, "", {"id", "metric", "potential", "alpha", "initial", "deviation", "integrator", "sampling",
                    "connection_offset"});
  Scenario s;
  s.id = default_id;
  if (j.contains("id")) {
    if (!j["id"].is_string() || j["id"].get<std::string>().empty()) fail("id", "expected a non-empty string");
    s.id = j["id"].get<std::string>();
  }
  if (!j.contains("metric")) fail("metric", "required");
  s.metric = field_ref(j["metric"], "metric");
  if (j.contains("potential")) s.potential = field_ref(j["potential"], "potential");
  if (j.contains("alpha")) s.alpha = number(j["alpha"], "alpha");
  if (j.contains("connection_offset")) s.connection_offset = number(j["connection_offset"], "connection_offset");

  MetricField metric = [&] {
    try {
      return s.metric_field();
    } catch (const CatalogError& e) {
      fail("metric", e.what());
    }
  }();
  try {
    s.potential_field();
  } catch (const CatalogError& e) {
    fail("potential", e.what());
  }

  if (j.contains("initial")) {
    const auto& in = j["initial"];
    only_keys(in, "initial", {"x0", "y0", "normalize"});
    if (in.contains("x0")) s.x0 = vec4(in["x0"], "initial.x0");
    if (in.contains("y0")) s.y0 = vec4(in["y0"], "initial.y0");
    if (in.contains("normalize")) {
      const auto& n = in["normalize"];
      if (n.is_string() && n.get<std::string>() == "none") {
        s.normalize.reset();
      } else if (n.is_number() && (n.get<double>() == 1.0 || n.get<double>() == -1.0)) {
        s.normalize = static_cast<int>(n.get<double>());
      } else {
        fail("initial.normalize", "expected -1, 1 or \"none\"");
      }
    }
  }
  if (auto why = metric.chart_violation(s.x0)) fail("initial.x0", "outside the chart: " + *why);
  if (auto why = s.potential_field().chart_violation(s.x0)) fail("initial.x0", "outside the chart: " + *why);
  try {
    s.initial_velocity();
  } catch (const NullFiberError& e) {
    throw NullFiberError(std::string("initial.y0: ") + e.what() +
                         "; choose a non-null y0 (timelike for particles) and optionally set initial.normalize");
  }

  if (j.contains("deviation")) {
    const auto& d = j["deviation"];
    only_keys(d, "deviation", {"w0", "v0", "epsilon"});
    DeviationSpec dev;
    if (!d.contains("w0")) fail("deviation.w0", "required");
    dev.w0 = vec4(d["w0"], "deviation.w0");
    if (d.contains("v0")) dev.v0 = vec4(d["v0"], "deviation.v0");
    if (d.contains("epsilon")) {
      dev.epsilon = number(d["epsilon"], "deviation.epsilon");
      if (!(dev.epsilon > 0.0)) fail("deviation.epsilon", "must be positive");
    }
    s.deviation = dev;
  }
  if (j.contains("integrator")) s.integrator = integrator(j["integrator"], "integrator");

  s.sampling = default_sampling(s.metric);
  if (j.contains("sampling")) {
    const auto& b = j["sampling"];
    only_keys(b, "sampling", {"lower", "upper", "q_min", "q_max"});
    if (b.contains("lower")) s.sampling.lower = vec4(b["lower"], "sampling.lower");
    if (b.contains("upper")) s.sampling.upper = vec4(b["upper"], "sampling.upper");
    if (b.contains("q_min")) s.sampling.q_min = number(b["q_min"], "sampling.q_min");
    if (b.contains("q_max")) s.sampling.q_max = number(b["q_max"], "sampling.q_max");
  }
  for (int i = 0; i < kDim; ++i)
    if (!(s.sampling.lower[i] <= s.sampling.upper[i]))
      fail("sampling.upper[" + std::to_string(i) + "]", "must not be below sampling.lower");
  if (!(s.sampling.q_min < s.sampling.q_max) || s.sampling.q_max >= 0.0)
    fail("sampling.q_max", "need q_min < q_max < 0 (timelike fibers)");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), std::filesystem::path(path).stem().string());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["id"] = s.id;
  j["metric"] = {{"name", s.metric.name}, {"params", params_json(s.metric.params)}};
  j["potential"] = {{"name", s.potential.name}, {"params", params_json(s.potential.params)}};
  j["alpha"] = s.alpha;
  j["initial"] = {{"x0", vec_json(s.x0)}, {"y0", vec_json(s.y0)}};
  if (s.normalize)
    j["initial"]["normalize"] = *s.normalize;
  else
    j["initial"]["normalize"] = "none";
  if (s.deviation)
    j["deviation"] = {{"w0", vec_json(s.deviation->w0)},
                      {"v0", vec_json(s.deviation->v0)},
                      {"epsilon", s.deviation->epsilon}};
  const auto& c = s.integrator;
  j["integrator"] = {{"method", to_string(c.method)}, {"step", c.step},        {"abs_tol", c.abs_tol},
                     {"rel_tol", c.rel_tol},          {"max_steps", c.max_steps}, {"t_start", c.t_start},
                     {"t_end", c.t_end},              {"samples", c.samples}};
  j["sampling"] = {{"lower", vec_json(s.sampling.lower)},
                   {"upper", vec_json(s.sampling.upper)},
                   {"q_min", s.sampling.q_min},
                   {"q_max", s.sampling.q_max}};
  j["connection_offset"] = s.connection_offset;
  return j.dump(2);
}

std::vector<Scenario> default_suite() {
  const double half_pi = 0.5 * std::numbers::pi;
  auto make = [](std::string id, FieldRef metric, FieldRef potential, Vec4<> x0) {
    Scenario s;
    s.id = std::move(id);
    s.metric = std::move(metric);
    s.potential = std::move(potential);
    s.x0 = x0;
    s.y0 = {1.0, 0.0, 0.0, 0.0};
    s.normalize = -1;
    s.sampling = default_sampling(s.metric);
    return s;
  };
  return {
      make("schwarzschild_vacuum", {"schwarzschild", {{"M", 1.0}}}, {"zero", {}}, {0.0, 10.0, half_pi, 0.0}),
      make("rn_coulomb", {"reissner_nordstrom", {{"M", 1.0}, {"Q", 0.5}}}, {"coulomb", {{"Q", 0.5}}},
           {0.0, 10.0, half_pi, 0.0}),
      make("flat_uniform_b", {"minkowski", {}}, {"uniform_b", {{"B", 0.7}, {"axis", 3.0}}}, {0.0, 1.0, 1.0, 1.0}),
      make("flat_coulomb", {"minkowski", {}}, {"coulomb", {{"Q", 1.0}}}, {0.0, 3.0, 1.0, 1.0}),
  };
}

Scenario negative_control() {
  Scenario s = default_suite().front();
  s.id = "negative_control_offset";
  s.connection_offset = 1e-3;
  return s;
}

}  // namespace tidal
