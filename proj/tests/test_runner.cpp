#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qdd/presets.hpp"
#include "qdd/runner.hpp"

using namespace qdd;

TEST_CASE("least-squares line fit", "[runner]") {
  const LineFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  REQUIRE(f.slope == Catch::Approx(2.0));
  REQUIRE(f.intercept == Catch::Approx(1.0));
  // Degenerate inputs return a zero fit.
  REQUIRE(fit_line({1.0}, {2.0}).slope == 0.0);
  REQUIRE(fit_line({1.0, 1.0}, {0.0, 5.0}).slope == 0.0);
}

TEST_CASE("hand workspace mirrors the two fingers", "[runner]") {
  FingerGeometry geom;
  HandConfig hand;
  const auto clouds = hand_workspace(geom, hand, 10);
  REQUIRE(clouds[0].size() == 100);
  REQUIRE(clouds[1].size() == 100);
  for (size_t i = 0; i < clouds[0].size(); ++i) {
    // Mirror symmetry about the palm mid-plane x = 0.
    REQUIRE(clouds[0][i].x == Catch::Approx(-clouds[1][i].x).margin(1e-15));
    REQUIRE(clouds[0][i].y == Catch::Approx(clouds[1][i].y).margin(1e-15));
  }
}

TEST_CASE("motor bench slope recovers kt", "[runner]") {
  const ScenarioConfig c = presets::get("motor_torque_linearity");
  const BenchResult b = run_motor_bench(c);
  REQUIRE(b.rows.size() == 10);
  REQUIRE(b.slope_Nm_A ==
          Catch::Approx(b.kt_Nm_A).epsilon(0.005));
  // Setpoints span the requested range.
  REQUIRE(b.rows.front().setpoint_Nm == Catch::Approx(0.03));
  REQUIRE(b.rows.back().setpoint_Nm == Catch::Approx(0.3));
}

TEST_CASE("tracking verdict uses the post-transient error", "[runner]") {
  ScenarioConfig c;
  c.success.kind = "tracking";
  c.success.params = {{"max_error_m", 0.01}};
  RunResult r;
  SimWorld w;
  std::map<std::string, double> summary;
  summary["max_error_post_transient_m_f0"] = 0.005;
  summary["max_error_post_transient_m_f1"] = 0.002;
  REQUIRE(evaluate_success(c, r, w, summary).pass);
  summary["max_error_post_transient_m_f1"] = 0.02;
  const Verdict v = evaluate_success(c, r, w, summary);
  REQUIRE_FALSE(v.pass);
  REQUIRE(v.reason.find("finger 1") != std::string::npos);
}

TEST_CASE("press verdict regresses force on displacement", "[runner]") {
  ScenarioConfig c;
  c.duration = 2.0;
  c.success.kind = "press_slope";
  c.success.params = {{"k_N_m", 100.0}, {"min_force_N", 3.0},
                      {"axis", 1.0}, {"disp_min_m", 0.002},
                      {"disp_max_m", 0.04}};
  // Synthetic quasi-static ramp: displacement grows, force = 100 * d.
  RunResult r;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.02 * i;
    const double d = 0.0004 * i;  // up to 4 cm
    ControllerRow cr{};
    cr.t = t;
    cr.y = 0.06 - d;
    cr.yd = 0.06;
    r.controller[0].push_back(cr);
    r.controller[1].push_back(cr);
    ContactRow ct{};
    ct.t = t;
    ct.tip_normal[0] = 100.0 * d;
    r.contact.push_back(ct);
  }
  SimWorld w;
  std::map<std::string, double> summary;
  REQUIRE(evaluate_success(c, r, w, summary).pass);
  REQUIRE(summary.at("press_slope_N_m") == Catch::Approx(100.0));
  // A mis-scaled force trace fails the slope gate.
  for (ContactRow& ct : r.contact) ct.tip_normal[0] *= 1.2;
  summary.clear();
  REQUIRE_FALSE(evaluate_success(c, r, w, summary).pass);
}

TEST_CASE("unknown success kinds are rejected", "[runner]") {
  ScenarioConfig c;
  c.success.kind = "levitate";
  RunResult r;
  SimWorld w;
  std::map<std::string, double> summary;
  const Verdict v = evaluate_success(c, r, w, summary);
  REQUIRE_FALSE(v.pass);
  REQUIRE(v.reason.find("levitate") != std::string::npos);
}

TEST_CASE("quasi-static press force matches the rendered stiffness",
          "[runner][stiffness]") {
  // Fingertip pressed into a fixed slab and held: the steady contact force
  // must equal K * (x_d - x) within 2%.
  const ScenarioConfig c =
      load_config(oracles::source_dir() + "/tests/data/golden_press.json");
  SimWorld w = build_world(c);
  const RunResult r = run(w, c.duration);
  const ControllerRow& last = r.controller[0].back();
  const double commanded = 100.0 * (last.yd - last.y);
  const double measured = r.contact.back().tip_normal[0];
  REQUIRE(measured > 1.0);  // firmly loaded
  REQUIRE(measured == Catch::Approx(commanded).epsilon(0.02));
}

TEST_CASE("press trace matches the golden CSV bit-exactly",
          "[runner][golden]") {
  const std::string dir = oracles::source_dir() + "/tests/data";
  const ScenarioConfig c = load_config(dir + "/golden_press.json");
  SimWorld w = build_world(c);
  const RunResult r = run(w, c.duration);
  const auto tmp = std::filesystem::temp_directory_path() /
                   "qdd_golden_controller_0.csv";
  write_controller_csv(tmp.string(), r.controller[0]);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string fresh = slurp(tmp.string());
  const std::string golden = slurp(dir + "/golden_press_controller_0.csv");
  REQUIRE(fresh.size() == golden.size());
  REQUIRE(fresh == golden);
}
