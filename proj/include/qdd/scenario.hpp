#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdd/run.hpp"
#include "qdd/world.hpp"

namespace qdd {

using nlohmann::json;

namespace cfg {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) {
    throw std::runtime_error("config: " + where + " must be an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw std::runtime_error("config: unknown key '" + it.key() + "' in " +
                               where);
    }
  }
}

inline Vec2 vec2_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw std::runtime_error("config: " + where + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }

}  // namespace cfg

// --- Declarative config -------------------------------------------------------

struct PlantConfig {
  FingerGeometry geometry;
  TransmissionParams transmission;
  double m1 = 0.03, m2 = 0.02;
  double joint_damping = 1e-4;
  double limit_stiffness = 50.0;
  MotorParams motor;
  int encoder_cpr = 16384;
  double i_max = 15.0;
  HandConfig hand;
  PenaltyParams penalty;
  double mu = 0.5;
  Vec2 gravity;
  Vec2 theta0{0.55, 1.63};
};

struct EventConfig {
  std::string trigger = "time";  // time | y_displacement | palm_contact | object_contact
  double at_s = 0.0;
  double threshold_m = 0.01;
  Vec2 k{100.0, 100.0};
  Vec2 b{2.0, 2.0};
  Vec2 desired{0.0, 0.06};
  double force_cap = 0.0;
  bool while_palm_contact = false;
};

struct ControllerConfig {
  ImpedanceSpace space = ImpedanceSpace::Cartesian;
  bool use_trajectory = true;
  bool override_enabled = true;
  double override_threshold = 0.05;
  double override_tau = 0.1;
  double velocity_cutoff_hz = 100.0;
  std::vector<EventConfig> events;  // empty -> single event from defaults
};

struct ObjectConfig {
  bool present = false;
  std::string shape = "disk";  // disk | polygon
  double radius = 0.02;
  std::vector<Vec2> vertices;
  double mass = 0.1;
  double inertia = 2e-5;
  Vec2 position;
  double orientation = 0.0;
  bool kinematic = false;
};

struct SegmentConfig {
  Vec2 a, b;
  double radius = 0.002;
};

struct PulseConfig {
  double start = 0.0, duration = 0.0;
  double fx = 0.0, fy = 0.0, tz = 0.0;
};

struct SuccessSpec {
  std::string kind = "none";
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string mode = "sim";  // sim | motor_bench
  double duration = 1.0;
  uint64_t seed = 0;
  double inner_dt = 1e-4;
  int outer_ratio = 5;
  double transient = 0.0;
  PlantConfig plant;
  ControllerConfig controller;
  TrajectorySpec trajectory;
  bool has_trajectory1 = false;
  TrajectorySpec trajectory1;  // optional per-finger override for finger 1
  ObjectConfig object;
  BaseMotionSpec base_motion;
  std::vector<PulseConfig> pulses;
  std::vector<SegmentConfig> environment;
  SuccessSpec success;
  std::string out_dir = "out";
};

// --- JSON serialization --------------------------------------------------------

namespace cfg {

inline json trajectory_to_json(const TrajectorySpec& t) {
  json j;
  switch (t.kind) {
    case TrajectoryKind::Hold: j["kind"] = "hold"; break;
    case TrajectoryKind::Circle: j["kind"] = "circle"; break;
    case TrajectoryKind::Rectangle: j["kind"] = "rectangle"; break;
    case TrajectoryKind::PiecewiseLinear: j["kind"] = "piecewise"; break;
  }
  j["hold"] = to_json(t.hold_position);
  j["center"] = to_json(t.center);
  j["radius_m"] = t.radius;
  j["rate_rad_s"] = t.angular_rate;
  j["width_m"] = t.width;
  j["height_m"] = t.height;
  j["speed_m_s"] = t.speed;
  json wps = json::array();
  for (const Waypoint& w : t.waypoints) {
    wps.push_back(json::array({w.time, w.position.x, w.position.y}));
  }
  j["waypoints"] = wps;
  return j;
}

inline TrajectorySpec trajectory_from_json(const json& j,
                                           const std::string& where) {
  check_keys(j, {"kind", "hold", "center", "radius_m", "rate_rad_s",
                 "width_m", "height_m", "speed_m_s", "waypoints"}, where);
  TrajectorySpec t;
  const std::string kind = j.value("kind", "hold");
  if (kind == "hold") t.kind = TrajectoryKind::Hold;
  else if (kind == "circle") t.kind = TrajectoryKind::Circle;
  else if (kind == "rectangle") t.kind = TrajectoryKind::Rectangle;
  else if (kind == "piecewise") t.kind = TrajectoryKind::PiecewiseLinear;
  else throw std::runtime_error("config: bad trajectory kind '" + kind + "'");
  if (j.contains("hold")) t.hold_position = vec2_of(j["hold"], where + ".hold");
  if (j.contains("center")) t.center = vec2_of(j["center"], where + ".center");
  t.radius = j.value("radius_m", t.radius);
  t.angular_rate = j.value("rate_rad_s", t.angular_rate);
  t.width = j.value("width_m", t.width);
  t.height = j.value("height_m", t.height);
  t.speed = j.value("speed_m_s", t.speed);
  if (j.contains("waypoints")) {
    for (const json& w : j["waypoints"]) {
      if (!w.is_array() || w.size() != 3) {
        throw std::runtime_error("config: waypoint must be [t, x, y] in " +
                                 where);
      }
      t.waypoints.push_back(
          {w[0].get<double>(), {w[1].get<double>(), w[2].get<double>()}});
    }
  }
  return t;
}

}  // namespace cfg

inline json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["mode"] = c.mode;
  j["duration_s"] = c.duration;
  j["seed"] = c.seed;
  j["inner_dt_s"] = c.inner_dt;
  j["outer_ratio"] = c.outer_ratio;
  j["transient_s"] = c.transient;
  j["out_dir"] = c.out_dir;

  json p;
  p["l1_m"] = c.plant.geometry.l1;
  p["l2_m"] = c.plant.geometry.l2;
  p["theta1_limits"] = json::array({c.plant.geometry.theta1_limits.lo,
                                    c.plant.geometry.theta1_limits.hi});
  p["theta2_limits"] = json::array({c.plant.geometry.theta2_limits.lo,
                                    c.plant.geometry.theta2_limits.hi});
  p["n1"] = c.plant.transmission.n1;
  p["n2"] = c.plant.transmission.n2;
  p["torque_map"] =
      c.plant.transmission.torque_map_mode == TorqueMapMode::Nominal
          ? "nominal" : "energy";
  p["m1_kg"] = c.plant.m1;
  p["m2_kg"] = c.plant.m2;
  p["joint_damping_Nms"] = c.plant.joint_damping;
  p["limit_stiffness_Nm_rad"] = c.plant.limit_stiffness;
  p["kt_Nm_A"] = c.plant.motor.kt;
  p["bus_voltage_V"] = c.plant.motor.bus_voltage;
  p["pole_pairs"] = c.plant.motor.pole_pairs;
  p["resistance_ohm"] = c.plant.motor.resistance;
  p["inductance_H"] = c.plant.motor.inductance;
  p["cogging_amplitude_Nm"] = c.plant.motor.cogging_amplitude;
  p["cogging_harmonic"] = c.plant.motor.cogging_harmonic;
  p["ripple_voltage_V"] = c.plant.motor.ripple_voltage;
  p["ripple_hz"] = c.plant.motor.ripple_hz;
  p["encoder_cpr"] = c.plant.encoder_cpr;
  p["i_max_A"] = c.plant.i_max;
  p["palm_separation_m"] = c.plant.hand.palm_separation;
  p["tip_radius_m"] = c.plant.hand.tip_radius;
  p["link_radius_m"] = c.plant.hand.link_radius;
  p["palm_radius_m"] = c.plant.hand.palm_radius;
  p["kn_N_m"] = c.plant.penalty.kn;
  p["dn_Ns_m"] = c.plant.penalty.dn;
  p["k_visc_Ns_m"] = c.plant.penalty.k_visc;
  p["mu"] = c.plant.mu;
  p["gravity_m_s2"] = cfg::to_json(c.plant.gravity);
  p["theta0_rad"] = cfg::to_json(c.plant.theta0);
  j["plant"] = p;

  json ctl;
  ctl["space"] =
      c.controller.space == ImpedanceSpace::Cartesian ? "cartesian" : "joint";
  ctl["use_trajectory"] = c.controller.use_trajectory;
  ctl["override_enabled"] = c.controller.override_enabled;
  ctl["override_threshold_rad"] = c.controller.override_threshold;
  ctl["override_tau_Nm"] = c.controller.override_tau;
  ctl["velocity_cutoff_hz"] = c.controller.velocity_cutoff_hz;
  json evs = json::array();
  for (const EventConfig& e : c.controller.events) {
    json ej;
    ej["trigger"] = e.trigger;
    ej["at_s"] = e.at_s;
    ej["threshold_m"] = e.threshold_m;
    ej["k"] = cfg::to_json(e.k);
    ej["b"] = cfg::to_json(e.b);
    ej["desired"] = cfg::to_json(e.desired);
    ej["force_cap_N"] = e.force_cap;
    ej["while_palm_contact"] = e.while_palm_contact;
    evs.push_back(ej);
  }
  ctl["events"] = evs;
  j["controller"] = ctl;

  j["trajectory"] = cfg::trajectory_to_json(c.trajectory);
  if (c.has_trajectory1) {
    j["trajectory_finger1"] = cfg::trajectory_to_json(c.trajectory1);
  }

  if (c.object.present) {
    json o;
    o["shape"] = c.object.shape;
    o["radius_m"] = c.object.radius;
    json vs = json::array();
    for (Vec2 v : c.object.vertices) vs.push_back(cfg::to_json(v));
    o["vertices"] = vs;
    o["mass_kg"] = c.object.mass;
    o["inertia_kgm2"] = c.object.inertia;
    o["position"] = cfg::to_json(c.object.position);
    o["orientation_rad"] = c.object.orientation;
    o["kinematic"] = c.object.kinematic;
    j["object"] = o;
  }

  json bm;
  bm["kind"] = c.base_motion.kind == BaseMotionKind::Fixed ? "fixed" : "down_up";
  bm["home"] = cfg::to_json(c.base_motion.home);
  bm["depth_m"] = c.base_motion.depth;
  bm["speed_m_s"] = c.base_motion.speed;
  bm["start_s"] = c.base_motion.start_time;
  j["base_motion"] = bm;

  json pulses = json::array();
  for (const PulseConfig& p2 : c.pulses) {
    pulses.push_back({{"start_s", p2.start}, {"duration_s", p2.duration},
                      {"fx_N", p2.fx}, {"fy_N", p2.fy}, {"tz_Nm", p2.tz}});
  }
  j["pulses"] = pulses;

  json env = json::array();
  for (const SegmentConfig& s : c.environment) {
    env.push_back({{"a", cfg::to_json(s.a)}, {"b", cfg::to_json(s.b)},
                   {"radius_m", s.radius}});
  }
  j["environment"] = env;

  json su;
  su["kind"] = c.success.kind;
  su["params"] = c.success.params;
  j["success"] = su;
  return j;
}

ScenarioConfig scenario_from_json(const json& j);  // defined below

inline ScenarioConfig scenario_from_json(const json& j) {
  cfg::check_keys(j, {"name", "mode", "duration_s", "seed", "inner_dt_s",
                      "outer_ratio", "transient_s", "out_dir", "plant",
                      "controller", "trajectory", "trajectory_finger1",
                      "object", "base_motion", "pulses", "environment",
                      "success"},
                  "top level");
  ScenarioConfig c;
  c.name = j.value("name", c.name);
  c.mode = j.value("mode", c.mode);
  if (c.mode != "sim" && c.mode != "motor_bench") {
    throw std::runtime_error("config: bad mode '" + c.mode + "'");
  }
  c.duration = j.value("duration_s", c.duration);
  if (c.duration <= 0.0) throw std::runtime_error("config: duration_s <= 0");
  c.seed = j.value("seed", c.seed);
  c.inner_dt = j.value("inner_dt_s", c.inner_dt);
  if (c.inner_dt <= 0.0) throw std::runtime_error("config: inner_dt_s <= 0");
  c.outer_ratio = j.value("outer_ratio", c.outer_ratio);
  if (c.outer_ratio < 1) throw std::runtime_error("config: outer_ratio < 1");
  c.transient = j.value("transient_s", c.transient);
  c.out_dir = j.value("out_dir", c.out_dir);

  if (j.contains("plant")) {
    const json& p = j["plant"];
    cfg::check_keys(p, {"l1_m", "l2_m", "theta1_limits", "theta2_limits",
                        "n1", "n2", "torque_map", "m1_kg", "m2_kg",
                        "joint_damping_Nms", "limit_stiffness_Nm_rad",
                        "kt_Nm_A", "bus_voltage_V", "pole_pairs",
                        "resistance_ohm", "inductance_H",
                        "cogging_amplitude_Nm", "cogging_harmonic",
                        "ripple_voltage_V", "ripple_hz", "encoder_cpr", "i_max_A", "palm_separation_m",
                        "tip_radius_m", "link_radius_m", "palm_radius_m",
                        "kn_N_m", "dn_Ns_m", "k_visc_Ns_m", "mu",
                        "gravity_m_s2", "theta0_rad"},
                    "plant");
    PlantConfig& pc = c.plant;
    pc.geometry.l1 = p.value("l1_m", pc.geometry.l1);
    pc.geometry.l2 = p.value("l2_m", pc.geometry.l2);
    if (p.contains("theta1_limits")) {
      pc.geometry.theta1_limits = {p["theta1_limits"][0].get<double>(),
                                   p["theta1_limits"][1].get<double>()};
    }
    if (p.contains("theta2_limits")) {
      pc.geometry.theta2_limits = {p["theta2_limits"][0].get<double>(),
                                   p["theta2_limits"][1].get<double>()};
    }
    if (!pc.geometry.valid()) throw std::runtime_error("config: bad geometry");
    pc.transmission.n1 = p.value("n1", pc.transmission.n1);
    pc.transmission.n2 = p.value("n2", pc.transmission.n2);
    if (!pc.transmission.valid()) {
      throw std::runtime_error("config: n1, n2 must be > 0");
    }
    const std::string tm = p.value("torque_map", "nominal");
    if (tm == "nominal") pc.transmission.torque_map_mode = TorqueMapMode::Nominal;
    else if (tm == "energy") pc.transmission.torque_map_mode = TorqueMapMode::EnergyConsistent;
    else throw std::runtime_error("config: bad torque_map '" + tm + "'");
    pc.m1 = p.value("m1_kg", pc.m1);
    pc.m2 = p.value("m2_kg", pc.m2);
    pc.joint_damping = p.value("joint_damping_Nms", pc.joint_damping);
    pc.limit_stiffness = p.value("limit_stiffness_Nm_rad", pc.limit_stiffness);
    pc.motor.kt = p.value("kt_Nm_A", pc.motor.kt);
    pc.motor.bus_voltage = p.value("bus_voltage_V", pc.motor.bus_voltage);
    pc.motor.pole_pairs = p.value("pole_pairs", pc.motor.pole_pairs);
    pc.motor.resistance = p.value("resistance_ohm", pc.motor.resistance);
    pc.motor.inductance = p.value("inductance_H", pc.motor.inductance);
    pc.motor.cogging_amplitude =
        p.value("cogging_amplitude_Nm", pc.motor.cogging_amplitude);
    pc.motor.cogging_harmonic =
        p.value("cogging_harmonic", pc.motor.cogging_harmonic);
    pc.motor.ripple_voltage =
        p.value("ripple_voltage_V", pc.motor.ripple_voltage);
    pc.motor.ripple_hz = p.value("ripple_hz", pc.motor.ripple_hz);
    if (pc.motor.ripple_voltage < 0.0 || pc.motor.ripple_hz <= 0.0) {
      throw std::runtime_error("config: ripple_voltage_V must be >= 0 and "
                               "ripple_hz > 0");
    }
    pc.encoder_cpr = p.value("encoder_cpr", pc.encoder_cpr);
    pc.i_max = p.value("i_max_A", pc.i_max);
    pc.hand.palm_separation = p.value("palm_separation_m",
                                      pc.hand.palm_separation);
    pc.hand.tip_radius = p.value("tip_radius_m", pc.hand.tip_radius);
    pc.hand.link_radius = p.value("link_radius_m", pc.hand.link_radius);
    pc.hand.palm_radius = p.value("palm_radius_m", pc.hand.palm_radius);
    pc.penalty.kn = p.value("kn_N_m", pc.penalty.kn);
    pc.penalty.dn = p.value("dn_Ns_m", pc.penalty.dn);
    pc.penalty.k_visc = p.value("k_visc_Ns_m", pc.penalty.k_visc);
    pc.mu = p.value("mu", pc.mu);
    if (pc.mu < 0.0) throw std::runtime_error("config: mu < 0");
    if (p.contains("gravity_m_s2")) {
      pc.gravity = cfg::vec2_of(p["gravity_m_s2"], "plant.gravity_m_s2");
    }
    if (p.contains("theta0_rad")) {
      pc.theta0 = cfg::vec2_of(p["theta0_rad"], "plant.theta0_rad");
    }
  }

  if (j.contains("controller")) {
    const json& ctl = j["controller"];
    cfg::check_keys(ctl, {"space", "use_trajectory", "override_enabled",
                          "override_threshold_rad", "override_tau_Nm",
                          "velocity_cutoff_hz", "events"},
                    "controller");
    const std::string sp = ctl.value("space", "cartesian");
    if (sp == "cartesian") c.controller.space = ImpedanceSpace::Cartesian;
    else if (sp == "joint") c.controller.space = ImpedanceSpace::Joint;
    else throw std::runtime_error("config: bad controller space '" + sp + "'");
    c.controller.use_trajectory =
        ctl.value("use_trajectory", c.controller.use_trajectory);
    c.controller.override_enabled =
        ctl.value("override_enabled", c.controller.override_enabled);
    c.controller.override_threshold =
        ctl.value("override_threshold_rad", c.controller.override_threshold);
    c.controller.override_tau =
        ctl.value("override_tau_Nm", c.controller.override_tau);
    c.controller.velocity_cutoff_hz =
        ctl.value("velocity_cutoff_hz", c.controller.velocity_cutoff_hz);
    if (ctl.contains("events")) {
      for (const json& ej : ctl["events"]) {
        cfg::check_keys(ej, {"trigger", "at_s", "threshold_m", "k", "b",
                             "desired", "force_cap_N", "while_palm_contact"},
                        "controller.events[]");
        EventConfig e;
        e.trigger = ej.value("trigger", e.trigger);
        if (e.trigger != "time" && e.trigger != "y_displacement" &&
            e.trigger != "palm_contact" && e.trigger != "object_contact") {
          throw std::runtime_error("config: bad event trigger '" + e.trigger +
                                   "'");
        }
        e.at_s = ej.value("at_s", e.at_s);
        e.threshold_m = ej.value("threshold_m", e.threshold_m);
        if (ej.contains("k")) e.k = cfg::vec2_of(ej["k"], "event.k");
        if (ej.contains("b")) e.b = cfg::vec2_of(ej["b"], "event.b");
        if (e.k.x < 0.0 || e.k.y < 0.0 || e.b.x < 0.0 || e.b.y < 0.0) {
          throw std::runtime_error("config: K and B must be non-negative");
        }
        if (ej.contains("desired")) {
          e.desired = cfg::vec2_of(ej["desired"], "event.desired");
        }
        e.force_cap = ej.value("force_cap_N", e.force_cap);
        e.while_palm_contact =
            ej.value("while_palm_contact", e.while_palm_contact);
        c.controller.events.push_back(e);
      }
    }
  }
  if (c.controller.events.empty()) {
    c.controller.events.push_back(EventConfig{});
  }

  if (j.contains("trajectory")) {
    c.trajectory = cfg::trajectory_from_json(j["trajectory"], "trajectory");
  }
  if (j.contains("trajectory_finger1")) {
    c.has_trajectory1 = true;
    c.trajectory1 =
        cfg::trajectory_from_json(j["trajectory_finger1"], "trajectory_finger1");
  }

  if (j.contains("object")) {
    const json& o = j["object"];
    cfg::check_keys(o, {"shape", "radius_m", "vertices", "mass_kg",
                        "inertia_kgm2", "position", "orientation_rad",
                        "kinematic"},
                    "object");
    c.object.present = true;
    c.object.shape = o.value("shape", c.object.shape);
    if (c.object.shape != "disk" && c.object.shape != "polygon") {
      throw std::runtime_error("config: bad object shape");
    }
    c.object.radius = o.value("radius_m", c.object.radius);
    if (o.contains("vertices")) {
      for (const json& v : o["vertices"]) {
        c.object.vertices.push_back(cfg::vec2_of(v, "object.vertices[]"));
      }
    }
    if (c.object.shape == "polygon" && c.object.vertices.size() < 3) {
      throw std::runtime_error("config: polygon needs >= 3 vertices");
    }
    c.object.mass = o.value("mass_kg", c.object.mass);
    if (c.object.mass <= 0.0) throw std::runtime_error("config: mass <= 0");
    c.object.inertia = o.value("inertia_kgm2", c.object.inertia);
    if (o.contains("position")) {
      c.object.position = cfg::vec2_of(o["position"], "object.position");
    }
    c.object.orientation = o.value("orientation_rad", c.object.orientation);
    c.object.kinematic = o.value("kinematic", c.object.kinematic);
  }

  if (j.contains("base_motion")) {
    const json& bm = j["base_motion"];
    cfg::check_keys(bm, {"kind", "home", "depth_m", "speed_m_s", "start_s"},
                    "base_motion");
    const std::string kind = bm.value("kind", "fixed");
    if (kind == "fixed") c.base_motion.kind = BaseMotionKind::Fixed;
    else if (kind == "down_up") c.base_motion.kind = BaseMotionKind::DownUp;
    else throw std::runtime_error("config: bad base_motion kind");
    if (bm.contains("home")) {
      c.base_motion.home = cfg::vec2_of(bm["home"], "base_motion.home");
    }
    c.base_motion.depth = bm.value("depth_m", c.base_motion.depth);
    c.base_motion.speed = bm.value("speed_m_s", c.base_motion.speed);
    if (c.base_motion.speed <= 0.0 &&
        c.base_motion.kind == BaseMotionKind::DownUp) {
      throw std::runtime_error("config: base_motion speed must be > 0");
    }
    c.base_motion.start_time = bm.value("start_s", c.base_motion.start_time);
  }

  if (j.contains("pulses")) {
    for (const json& pj : j["pulses"]) {
      cfg::check_keys(pj, {"start_s", "duration_s", "fx_N", "fy_N", "tz_Nm"},
                      "pulses[]");
      PulseConfig p;
      p.start = pj.value("start_s", 0.0);
      p.duration = pj.value("duration_s", 0.0);
      p.fx = pj.value("fx_N", 0.0);
      p.fy = pj.value("fy_N", 0.0);
      p.tz = pj.value("tz_Nm", 0.0);
      c.pulses.push_back(p);
    }
  }

  if (j.contains("environment")) {
    for (const json& sj : j["environment"]) {
      cfg::check_keys(sj, {"a", "b", "radius_m"}, "environment[]");
      SegmentConfig s;
      s.a = cfg::vec2_of(sj.at("a"), "environment[].a");
      s.b = cfg::vec2_of(sj.at("b"), "environment[].b");
      s.radius = sj.value("radius_m", s.radius);
      c.environment.push_back(s);
    }
  }

  if (j.contains("success")) {
    const json& su = j["success"];
    cfg::check_keys(su, {"kind", "params"}, "success");
    c.success.kind = su.value("kind", c.success.kind);
    if (su.contains("params")) {
      for (auto it = su["params"].begin(); it != su["params"].end(); ++it) {
        c.success.params[it.key()] = it.value().get<double>();
      }
    }
  }
  return c;
}

// --- Workspace validation ------------------------------------------------------

// Desired Cartesian waypoints must lie inside the sampled reachable set.
inline void validate_trajectory_reachable(const ScenarioConfig& c) {
  if (c.mode != "sim" || c.controller.space != ImpedanceSpace::Cartesian) {
    return;
  }
  const std::vector<Vec2> cloud = sample_workspace(c.plant.geometry, 120);
  auto reachable = [&](Vec2 p) {
    const double tol = 3e-3;
    for (Vec2 q : cloud) {
      if ((p - q).squared_norm() <= tol * tol) return true;
    }
    return false;
  };
  auto check = [&](const TrajectorySpec& t, const std::string& label) {
    const int n = 100;
    for (int i = 0; i <= n; ++i) {
      const double time = c.duration * i / n;
      const Vec2 p = t.sample(time);
      if (!reachable(p)) {
        throw std::runtime_error(
            "config: trajectory '" + label + "' leaves the reachable " +
            "workspace at t=" + std::to_string(time) + " (point " +
            std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
      }
    }
  };
  if (c.controller.use_trajectory) {
    check(c.trajectory, "trajectory");
    if (c.has_trajectory1) check(c.trajectory1, "trajectory_finger1");
  }
}

inline ScenarioConfig load_config_json(const json& j) {
  ScenarioConfig c = scenario_from_json(j);
  validate_trajectory_reachable(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " +
                             e.what());
  }
  return load_config_json(j);
}

// --- World construction ---------------------------------------------------------

inline SimWorld build_world(const ScenarioConfig& c) {
  SimWorld w;
  w.schedule.inner_dt = c.inner_dt;
  w.schedule.ratio = c.outer_ratio;
  w.hand = c.plant.hand;
  w.penalty = c.plant.penalty;
  w.friction_mu = c.plant.mu;
  w.object_gravity = c.plant.gravity;
  w.base_motion = c.base_motion;
  w.rng_seed = c.seed;
  w.tau_motor_max = c.plant.motor.kt * c.plant.i_max;

  for (const PulseConfig& p : c.pulses) {
    w.pulses.push_back({p.start, p.duration, {p.fx, p.fy, p.tz}});
  }
  for (const SegmentConfig& s : c.environment) {
    w.environment.push_back({s.a, s.b, s.radius, {}});
  }

  if (c.object.present) {
    RigidObject obj;
    if (c.object.shape == "disk") {
      obj.shape = Disk{c.object.radius};
    } else {
      obj.shape = ConvexPolygon{c.object.vertices};
    }
    obj.mass = c.object.mass;
    obj.inertia = c.object.inertia;
    obj.position = c.object.position;
    obj.orientation = c.object.orientation;
    obj.kinematic = c.object.kinematic;
    w.object = obj;
  }

  for (int f = 0; f < 2; ++f) {
    FingerUnit& u = w.fingers[f];
    u.plant.geometry = c.plant.geometry;
    u.plant.transmission = c.plant.transmission;
    u.plant.m1 = c.plant.m1;
    u.plant.m2 = c.plant.m2;
    u.plant.joint_damping = c.plant.joint_damping;
    u.plant.limit_stiffness = c.plant.limit_stiffness;
    u.plant.state.theta = c.plant.theta0;

    const EncoderModel enc{c.plant.encoder_cpr, 0.0};
    u.motors[0] = FocMotor(c.plant.motor, enc);
    u.motors[1] = FocMotor(c.plant.motor, enc);

    u.vel_estimator = VelocityEstimator(c.controller.velocity_cutoff_hz);
    u.override_policy.enabled = c.controller.override_enabled;
    u.override_policy.theta2_threshold = c.controller.override_threshold;
    u.override_policy.tau_star = c.controller.override_tau;
    u.use_trajectory = c.controller.use_trajectory;
    u.trajectory = (f == 1 && c.has_trajectory1) ? c.trajectory1 : c.trajectory;

    // Gain schedule from declarative events. `while_palm_contact` events
    // fall back to the previous event's params when the palm is clear.
    std::vector<GainSchedule::Event> events;
    ImpedanceParams previous;
    for (size_t i = 0; i < c.controller.events.size(); ++i) {
      const EventConfig& ec = c.controller.events[i];
      GainSchedule::Event ev;
      ImpedanceParams params;
      params.space = c.controller.space;
      params.K = Mat2::diag(ec.k.x, ec.k.y);
      params.B = Mat2::diag(ec.b.x, ec.b.y);
      params.desired = ec.desired;
      params.force_cap = ec.force_cap;
      ev.params = params;
      if (ec.trigger == "time") {
        const double at = ec.at_s;
        ev.trigger = [at](const ScheduleContext& s) { return s.time >= at; };
      } else if (ec.trigger == "y_displacement") {
        const double th = ec.threshold_m;
        ev.trigger = [th](const ScheduleContext& s) {
          return std::abs(s.fingertip.y - s.fingertip_rest.y) >= th;
        };
      } else if (ec.trigger == "palm_contact") {
        ev.trigger = [](const ScheduleContext& s) { return s.palm_contact; };
      } else {  // object_contact
        ev.trigger = [](const ScheduleContext& s) { return s.object_contact; };
      }
      if (ec.while_palm_contact) {
        ev.hold_condition =
            [](const ScheduleContext& s) { return s.palm_contact; };
        ev.hold_fallback = previous;
      }
      previous = params;
      events.push_back(std::move(ev));
    }
    u.gains.emplace(GainSchedule(std::move(events)));
  }
  w.initialize();
  return w;
}

}  // namespace qdd
