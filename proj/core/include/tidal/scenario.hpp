#pragma once

// Scenario files: which fields, which α, where to start, how to integrate and
// where to sample. JSON, validated strictly; see schemas/scenario.schema.json.

#include <optional>
#include <string>
#include <vector>

#include "tidal/connection.hpp"
#include "tidal/dynamics.hpp"
#include "tidal/fields.hpp"

namespace tidal {

struct FieldRef {
  std::string name;
  Params params;
};

struct DeviationSpec {
  Vec4<> w0{};
  Vec4<> v0{};  // adapted rate δw/dt at t_start
  double epsilon = 1e-5;  // two-worldline oracle spacing
};

struct SamplingBox {
  Vec4<> lower{};
  Vec4<> upper{};
  double q_min = -4.0;  // accepted range of g_ij y^i y^j
  double q_max = -0.25;
};

struct Scenario {
  std::string id;
  FieldRef metric;
  FieldRef potential{"zero", {}};
  double alpha = 0.0;
  Vec4<> x0{};
  Vec4<> y0{1.0, 0.0, 0.0, 0.0};
  std::optional<int> normalize;  // ±1, or none
  std::optional<DeviationSpec> deviation;
  IntegratorConfig integrator{};
  SamplingBox sampling{};
  double connection_offset = 0.0;

  MetricField metric_field() const;
  PotentialField potential_field() const;
  ConnectionParams connection_params() const { return {alpha, connection_offset}; }
  ConnectionParams connection_params(double a) const { return {a, connection_offset}; }
  /// y0 after optional normalization.
  Vec4<> initial_velocity() const;
};

/// Parse and validate. Throws ValidationError (with the JSON path), CatalogError,
/// ChartError or NullFiberError.
Scenario parse_scenario(const std::string& json_text, const std::string& default_id = "scenario");
Scenario load_scenario(const std::string& path);

/// Full scenario with every default filled in.
std::string scenario_to_json(const Scenario& s);

/// Default sampling box for a metric: a slab of the exterior for spherical charts,
/// a box away from the origin for Cartesian ones.
SamplingBox default_sampling(const FieldRef& metric);

/// The four catalog scenarios of the default verification suite.
std::vector<Scenario> default_suite();
/// Schwarzschild with a constant offset added to N: not a spray connection.
Scenario negative_control();

}  // namespace tidal
