#include <gtest/gtest.h>

#include <filesystem>

#include "tidal/errors.hpp"
#include "tidal/scenario.hpp"

using namespace tidal;

namespace {

std::string error_field(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Scenario, MinimalFlatScenarioGetsDefaults) {
  const auto s = parse_scenario(R"({"metric": {"name": "minkowski"}})", "minimal");
  EXPECT_EQ(s.id, "minimal");
  EXPECT_EQ(s.potential.name, "zero");
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_EQ(s.y0, (Vec4<>{1, 0, 0, 0}));
  EXPECT_FALSE(s.normalize.has_value());
  EXPECT_FALSE(s.deviation.has_value());
  EXPECT_EQ(s.integrator.method, Method::RK45);
  EXPECT_EQ(s.integrator.abs_tol, 1e-10);
  EXPECT_EQ(s.integrator.rel_tol, 1e-10);
  EXPECT_EQ(s.integrator.max_steps, 1'000'000u);
  EXPECT_EQ(s.sampling.q_min, -4.0);
  EXPECT_EQ(s.sampling.q_max, -0.25);
}

TEST(Scenario, ErrorsNameTheField) {
  EXPECT_EQ(error_field(R"({"metric": {"name": "kerr"}})"), "metric");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "potential": {"name": "dipole"}})"), "potential");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "colour": 1})"), "colour");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "initial": {"x0": [0, 1, 2]}})"), "initial.x0");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "initial": {"y0": [1, 0, "a", 0]}})"), "initial.y0[2]");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "integrator": {"method": "euler"}})"),
            "integrator.method");
  EXPECT_EQ(error_field(R"({"metric": {"name": "minkowski"}, "integrator": {"samples": 1}})"),
            "integrator.samples");
  EXPECT_EQ(error_field(R"({"metric": {"name": "schwarzschild", "params": {"M": 1}},
                            "initial": {"x0": [0, 1.5, 1, 0]}})"),
            "initial.x0");
  EXPECT_EQ(error_field(R"({"alpha": 1})"), "metric");
  EXPECT_EQ(error_field("{not json"), "");
}

TEST(Scenario, NullFiberCarriesRemediationHint) {
  try {
    parse_scenario(R"({"metric": {"name": "minkowski"}, "initial": {"y0": [1, 1, 0, 0]}})");
    FAIL() << "expected NullFiberError";
  } catch (const NullFiberError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("initial.y0"), std::string::npos);
    EXPECT_NE(what.find("normalize"), std::string::npos);
  }
}

TEST(Scenario, NormalizeAndAxisNames) {
  const auto s = parse_scenario(R"({"metric": {"name": "minkowski"},
      "potential": {"name": "uniform_b", "params": {"B": 0.7, "axis": "z"}},
      "initial": {"y0": [2, 0, 0, 0], "normalize": -1}})");
  EXPECT_EQ(s.potential.params.at("axis"), 3.0);
  EXPECT_EQ(s.initial_velocity(), (Vec4<>{1, 0, 0, 0}));
}

TEST(Scenario, EchoRoundTrips) {
  for (const auto& s : default_suite()) {
    const auto text = scenario_to_json(s);
    EXPECT_EQ(scenario_to_json(parse_scenario(text)), text) << s.id;
  }
  const auto nc = negative_control();
  EXPECT_NE(nc.connection_offset, 0.0);
  EXPECT_EQ(scenario_to_json(parse_scenario(scenario_to_json(nc))), scenario_to_json(nc));
}

TEST(Scenario, ShippedFilesLoad) {
  const std::filesystem::path dir = TIDAL_SCENARIO_DIR;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 10u);
  EXPECT_THROW(load_scenario((dir / "missing.json").string()), ValidationError);
}

TEST(Scenario, DefaultSuiteIsTheFourCatalogPairs) {
  const auto suite = default_suite();
  ASSERT_EQ(suite.size(), 4u);
  EXPECT_EQ(suite[0].id, "schwarzschild_vacuum");
  EXPECT_EQ(suite[1].id, "rn_coulomb");
  EXPECT_EQ(suite[2].id, "flat_uniform_b");
  EXPECT_EQ(suite[3].id, "flat_coulomb");
  EXPECT_TRUE(solves_einstein(suite[0].metric_field(), suite[0].potential_field()));
  EXPECT_TRUE(solves_einstein(suite[1].metric_field(), suite[1].potential_field()));
  EXPECT_FALSE(solves_einstein(suite[3].metric_field(), suite[3].potential_field()));
}
