#include <gtest/gtest.h>

#include <algorithm>
#include <json.hpp>
#include <set>

#include "tidal/scenario.hpp"
#include "tidal/verify.hpp"

using namespace tidal;

TEST(MakeCheck, ResidualPolicy) {
  auto c = make_check("x", {1.0, 2.0}, {1.0, 2.0 + 1e-12}, 1e-9);
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.mode, ResidualMode::Relative);
  EXPECT_NEAR(c.rel_residual, 1e-12 / 2.0, 1e-16);  // 2 + 1e-12 is not exact

  c = make_check("x", {1.0}, {1.0 + 1e-6}, 1e-9);
  EXPECT_FALSE(c.pass);

  // both sides tiny: absolute comparison against the floor
  c = make_check("x", {1e-16}, {-1e-16}, 1e-9);
  EXPECT_EQ(c.mode, ResidualMode::Absolute);
  EXPECT_TRUE(c.pass);
  c = make_check("x", {0.0}, {5e-15}, 1e-9);
  EXPECT_EQ(c.mode, ResidualMode::Absolute);
  EXPECT_TRUE(c.pass);

  // a term scale keeps cancellation noise relative
  c = make_check("x", {1e-13}, {-1e-13}, 1e-9, 1.0);
  EXPECT_EQ(c.mode, ResidualMode::Relative);
  EXPECT_TRUE(c.pass);
  c = make_check("x", {1e-13}, {-1e-13}, 1e-9);
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.tolerance, 1e-9);
  EXPECT_EQ(c.check, "x");
}

TEST(Densities, VacuumChartsCarryNoCharge) {
  for (const auto& sc : default_suite()) {
    for (const auto& p : sample_phase_points(sc, 5, 3)) {
      const auto ctx = make_context(sc, p.x, p.y, 1.0);
      const auto d = densities(ctx);
      EXPECT_LT(std::abs(d.rho_c), 1e-12) << sc.id;
      EXPECT_EQ(d.rho_m, 0.0);
    }
  }
}

TEST(Sampler, RespectsBoxAndFiberRange) {
  for (const auto& sc : default_suite()) {
    const auto pts = sample_phase_points(sc, 40, 7);
    ASSERT_EQ(pts.size(), 40u);
    const auto g = sc.metric_field();
    for (const auto& p : pts) {
      for (int i = 0; i < kDim; ++i) {
        EXPECT_GE(p.x[i], sc.sampling.lower[i]);
        EXPECT_LE(p.x[i], sc.sampling.upper[i]);
      }
      const double q = quadratic(g.evaluate(p.x).g, p.y, p.y);
      EXPECT_GE(q, sc.sampling.q_min);
      EXPECT_LE(q, sc.sampling.q_max);
    }
    const auto again = sample_phase_points(sc, 40, 7);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      EXPECT_EQ(pts[k].x, again[k].x);
      EXPECT_EQ(pts[k].y, again[k].y);
    }
    EXPECT_NE(sample_phase_points(sc, 1, 8)[0].x, pts[0].x);
  }
}

TEST(RunChecks, EveryIdentityPassesAtSamplePoints) {
  std::set<std::string> ids;
  for (const auto& sc : default_suite()) {
    for (double alpha : {-1.0, 0.0, 0.5, 1.0, 3.0}) {
      for (const auto& p : sample_phase_points(sc, 3, 11)) {
        for (const auto& c : run_checks(make_context(sc, p.x, p.y, alpha))) {
          EXPECT_TRUE(c.pass) << sc.id << " α=" << alpha << " " << c.check << " rel=" << c.rel_residual;
          ids.insert(c.check);
        }
      }
    }
  }
  for (const char* id : {"homogeneity_ladder", "spray_coherence", "strong_torsion", "dl_identity", "ricci_hessian",
                         "tidal_reconstruction", "longitudinal_tidal", "tilde_trace", "homogeneous_maxwell",
                         "maxwell_cyclic", "inhomogeneous_maxwell", "inhomogeneous_maxwell_alt",
                         "maxwell_variants_agree", "trace_decomposition", "einstein_trace", "einstein_tidal",
                         "alpha0_reduction"})
    EXPECT_TRUE(ids.count(id)) << id;
}

TEST(RunChecks, EinsteinChecksOnlyWhereTheFieldEquationsHold) {
  const auto suite = default_suite();
  const auto p = sample_phase_points(suite[2], 1, 1)[0];
  for (const auto& c : check_einstein_trace(make_context(suite[2], p.x, p.y, 1.0))) ADD_FAILURE() << c.check;
  const auto q = sample_phase_points(suite[1], 1, 1)[0];
  EXPECT_EQ(check_einstein_trace(make_context(suite[1], q.x, q.y, 1.0)).size(), 2u);
  EXPECT_EQ(check_einstein_trace(make_context(suite[1], q.x, q.y, 0.0)).size(), 1u);
}

TEST(RunChecks, NegativeControlFailsStrongTorsion) {
  const auto nc = negative_control();
  for (const auto& p : sample_phase_points(nc, 5, 2)) {
    bool torsion_seen = false;
    for (const auto& c : check_structural(make_context(nc, p.x, p.y, 1.0)))
      if (c.check == "strong_torsion") {
        torsion_seen = true;
        EXPECT_FALSE(c.pass);
      }
    EXPECT_TRUE(torsion_seen);
  }
}

TEST(RunSuite, DeterministicAndOrdered) {
  SuiteConfig cfg;
  cfg.points = 4;
  cfg.seed = 42;
  cfg.alphas = {0.0, 1.0};
  cfg.threads = 3;
  const auto a = run_suite(default_suite(), cfg);
  cfg.threads = 1;
  const auto b = run_suite(default_suite(), cfg);
  EXPECT_TRUE(a.all_pass());
  EXPECT_EQ(report_to_json(a), report_to_json(b));
  EXPECT_EQ(a.pass + a.fail, a.checks.size());
  // sorted by (scenario order, point, check id)
  const auto suite = default_suite();
  auto rank = [&](const std::string& id) {
    return std::find_if(suite.begin(), suite.end(), [&](const Scenario& s) { return s.id == id; }) - suite.begin();
  };
  for (std::size_t k = 1; k < a.checks.size(); ++k) {
    const auto& p = a.checks[k - 1];
    const auto& q = a.checks[k];
    const auto key_p = std::make_tuple(rank(p.scenario), p.point, p.check);
    const auto key_q = std::make_tuple(rank(q.scenario), q.point, q.check);
    EXPECT_LE(key_p, key_q);
  }
  const auto j = nlohmann::json::parse(report_to_json(a));
  EXPECT_EQ(j["version"], library_version());
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["summary"]["pass"], a.pass);
  EXPECT_EQ(j["summary"]["fail"], 0);
  EXPECT_EQ(j["checks"].size(), a.checks.size());
}

TEST(RunSuite, SeedChangesResidualsNotVerdicts) {
  SuiteConfig cfg;
  cfg.points = 3;
  cfg.alphas = {1.0};
  cfg.seed = 1;
  const auto a = run_suite(default_suite(), cfg);
  cfg.seed = 2;
  const auto b = run_suite(default_suite(), cfg);
  EXPECT_TRUE(a.all_pass());
  EXPECT_TRUE(b.all_pass());
  EXPECT_EQ(a.checks.size(), b.checks.size());
  EXPECT_NE(report_to_json(a), report_to_json(b));
}

TEST(RunSuite, EmptyInputsGiveEmptyReports) {
  SuiteConfig cfg;
  const auto none = run_suite({}, cfg);
  EXPECT_TRUE(none.checks.empty());
  EXPECT_TRUE(none.all_pass());
  cfg.points = 0;
  const auto zero = run_suite(default_suite(), cfg);
  EXPECT_TRUE(zero.checks.empty());
  EXPECT_TRUE(zero.all_pass());
  EXPECT_EQ(zero.scenarios.size(), 4u);
  EXPECT_NO_THROW(nlohmann::json::parse(report_to_json(zero)));
}

TEST(RunSuite, NegativeControlReportFails) {
  SuiteConfig cfg;
  cfg.points = 2;
  const auto r = run_suite({negative_control()}, cfg);
  EXPECT_FALSE(r.all_pass());
  EXPECT_GT(r.per_check.at("strong_torsion").fail, 0u);
}
