#include <catch_amalgamated.hpp>

#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "qdd/presets.hpp"
#include "qdd/run.hpp"
#include "qdd/scenario.hpp"

using namespace qdd;

namespace {

// Serialize every recorded table into one flat byte vector for bit-exact
// comparison between reruns.
std::vector<unsigned char> trace_bytes(const RunResult& r) {
  std::vector<unsigned char> out;
  auto add = [&out](double v) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &v, sizeof(double));
    out.insert(out.end(), b, b + sizeof(double));
  };
  for (const auto& table : r.controller) {
    for (const ControllerRow& row : table) {
      for (double v : {row.t, row.x, row.y, row.xd, row.yd, row.theta1,
                       row.theta2, row.tau1, row.tau2,
                       double(row.override_active)}) {
        add(v);
      }
    }
  }
  for (const auto& table : r.motor) {
    for (const MotorRow& row : table) {
      for (double v : {row.t, row.theta, row.omega, row.iq, row.id, row.uq,
                       row.ud, row.tau}) {
        add(v);
      }
    }
  }
  for (const ContactRow& row : r.contact) {
    for (double v : {row.t, row.tip_normal[0], row.tip_normal[1],
                     row.palm_normal, double(row.n_contacts), row.fcmd_x[0],
                     row.fcmd_y[0], row.fcmd_x[1], row.fcmd_y[1]}) {
      add(v);
    }
  }
  for (const ObjectRow& row : r.object) {
    for (double v : {row.t, row.x, row.y, row.ori, row.vx, row.vy,
                     row.omega}) {
      add(v);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("hand frame mirrors finger 1", "[world]") {
  HandConfig hand;
  REQUIRE(hand.mount(0).x == -0.04);
  REQUIRE(hand.mount(1).x == 0.04);
  const Vec2 v{0.01, 0.02};
  REQUIRE(hand.to_hand(0, v).x == 0.01);
  REQUIRE(hand.to_hand(1, v).x == -0.01);
  REQUIRE(hand.to_hand(1, v).y == 0.02);
}

TEST_CASE("reruns are bit-identical", "[world][determinism]") {
  ScenarioConfig c = presets::get("grasp_hold");
  c.duration = 0.6;
  auto run_once = [&]() {
    SimWorld w = build_world(c);
    return trace_bytes(run(w, c.duration));
  };
  const auto a = run_once();
  const auto b = run_once();
  REQUIRE(a.size() == b.size());
  REQUIRE(std::memcmp(a.data(), b.data(), a.size()) == 0);
}

TEST_CASE("halving the inner step barely moves the trajectory",
          "[world][convergence]") {
  // Smooth contact-free motion: the fingertip position at the end of a short
  // circle-tracking run must converge as dt -> 0.
  ScenarioConfig c = presets::get("circle_2cm");
  c.duration = 1.0;
  auto tip_at_end = [&](double dt, int ratio) {
    ScenarioConfig cc = c;
    cc.inner_dt = dt;
    cc.outer_ratio = ratio;  // keep the outer rate fixed at 2 kHz
    SimWorld w = build_world(cc);
    run(w, cc.duration);
    return w.fingertip_world(0);
  };
  const Vec2 coarse = tip_at_end(1e-4, 5);
  const Vec2 fine = tip_at_end(5e-5, 10);
  REQUIRE((coarse - fine).norm() < 1e-5);
}

TEST_CASE("contact forces obey the Coulomb bound during a grasp",
          "[world][contact]") {
  ScenarioConfig c = presets::get("grasp_hold");
  SimWorld w = build_world(c);
  const int steps = static_cast<int>(1.5 / c.inner_dt);
  int loaded_samples = 0;
  for (int i = 0; i < steps; ++i) {
    w.step();
    for (const ResolvedContact& rc : w.resolved_contacts()) {
      const double fn = dot(rc.force, rc.point.normal);
      const double ft = dot(rc.force, rc.point.normal.perp());
      REQUIRE(fn >= 0.0);
      REQUIRE(std::abs(ft) <= rc.point.mu * fn + 1e-9);
      if (fn > 1e-6) ++loaded_samples;
    }
  }
  REQUIRE(loaded_samples > 1000);  // the grasp actually made contact
}

TEST_CASE("motor torque commands hold between outer ticks", "[world]") {
  ScenarioConfig c = presets::get("circle_2cm");
  SimWorld w = build_world(c);
  int changes_inside_hold = 0;
  Vec2 held = w.fingers[0].desired_motor_torque;
  for (int i = 0; i < 500; ++i) {
    w.step();
    const Vec2 now = w.fingers[0].desired_motor_torque;
    const bool outer_boundary = (i % w.schedule.ratio) == 0;
    if (!outer_boundary && (now.x != held.x || now.y != held.y)) {
      ++changes_inside_hold;
    }
    held = now;
  }
  REQUIRE(changes_inside_hold == 0);
}

TEST_CASE("world detects tip and palm contacts with the object", "[world]") {
  ScenarioConfig c = presets::get("grasp_hold");
  SimWorld w = build_world(c);
  // Drop the object straight onto the palm: palm contact must be tagged
  // finger -1, link 0.
  w.object->position = {0.0, 0.003};
  w.detect_contacts();
  bool palm = false;
  for (const ContactPoint& cp : w.contacts()) {
    if (cp.finger < 0 && cp.link == 0) palm = true;
  }
  REQUIRE(palm);
  // Put it at a fingertip: tip contact tagged link 3 with that finger.
  w.object->position = w.fingertip_world(0) + Vec2{0.005, 0.0};
  w.detect_contacts();
  bool tip = false;
  for (const ContactPoint& cp : w.contacts()) {
    if (cp.finger == 0 && cp.link == 3) tip = true;
  }
  REQUIRE(tip);
}

TEST_CASE("environment segments collide with the object", "[world]") {
  ScenarioConfig c = presets::get("snatch_ball");
  SimWorld w = build_world(c);
  // The preset ball starts exactly tangent to the table segment; press it
  // in slightly so the overlap is unambiguous.
  w.object->position.y += 1e-4;
  w.detect_contacts();
  bool env_contact = false;
  for (const ContactPoint& cp : w.contacts()) {
    if (cp.finger < 0 && cp.link == -1) env_contact = true;
  }
  REQUIRE(env_contact);
}

TEST_CASE("wrench pulses act only inside their window", "[world]") {
  ScenarioConfig c;
  c.duration = 0.2;
  c.object.present = true;
  c.object.shape = "disk";
  c.object.radius = 0.01;
  c.object.mass = 0.1;
  c.object.position = {0.0, 0.2};  // far from the hand: no contacts
  c.controller.use_trajectory = false;
  c.controller.events = {presets::event_at(0.0, {0.0, 0.0}, {0.1, 0.1})};
  c.pulses = {{0.05, 0.05, 0.1, 0.0, 0.0}};
  SimWorld w = build_world(c);
  while (w.time < 0.04) w.step();
  REQUIRE(w.object->velocity.x == 0.0);
  while (w.time < 0.15) w.step();
  // Impulse = 0.1 N * 0.05 s over 0.1 kg -> 0.05 m/s.
  REQUIRE(w.object->velocity.x == Catch::Approx(0.05).margin(1e-6));
}

TEST_CASE("run records at the outer rate and computes summaries", "[run]") {
  ScenarioConfig c = presets::get("circle_2cm");
  c.duration = 0.5;
  SimWorld w = build_world(c);
  const RunResult r = run(w, c.duration, 0.1);
  // 0.5 s at 2 kHz outer rate -> 1000 samples plus the initial one.
  REQUIRE(r.controller[0].size() == 1001);
  REQUIRE(r.motor[0].size() == 1001);
  REQUIRE(r.contact.size() == 1001);
  REQUIRE(r.summary.count("rms_error_m_f0") == 1);
  REQUIRE(r.summary.count("max_error_post_transient_m_f1") == 1);
  REQUIRE(r.summary.at("max_error_m_f0") >=
          r.summary.at("max_error_post_transient_m_f0"));
  REQUIRE_THROWS(run(w, 0.0));
}
