#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdd/scenario.hpp"

namespace qdd {

// Built-in scenario presets, one per hand experiment. Each returns a fully
// specified config that load_config_json would accept unchanged.
namespace presets {

inline EventConfig event_at(double t, Vec2 k, Vec2 b, Vec2 desired = {0.0, 0.06},
                            double force_cap = 0.0) {
  EventConfig e;
  e.trigger = "time";
  e.at_s = t;
  e.k = k;
  e.b = b;
  e.desired = desired;
  e.force_cap = force_cap;
  return e;
}

inline ScenarioConfig motor_torque_linearity() {
  ScenarioConfig c;
  c.name = "motor_torque_linearity";
  c.mode = "motor_bench";
  c.duration = 0.05;  // settle time per setpoint
  c.success.kind = "torque_linearity";
  c.success.params = {{"slope_tol_frac", 0.005}, {"n_setpoints", 10},
                      {"tau_min_Nm", 0.03}, {"tau_max_Nm", 0.3}};
  return c;
}

inline ScenarioConfig press() {
  ScenarioConfig c;
  c.name = "press";
  c.duration = 10.0;
  c.transient = 1.0;
  c.plant.theta0 = {0.73, 2.04};  // tips at local (0, 0.048)
  // Rigid scale: a fixed ceiling slab above both fingertips; each tip
  // presses straight up (local +y) with a single contact.
  c.object.present = true;
  c.object.shape = "polygon";
  c.object.vertices = {{-0.12, -0.021}, {0.12, -0.021},
                       {0.12, 0.021}, {-0.12, 0.021}};
  c.object.position = {0.0, 0.079};  // bottom surface at y = 0.058
  c.object.mass = 1.0;
  c.object.inertia = 1.0;
  c.object.kinematic = true;
  c.trajectory.kind = TrajectoryKind::PiecewiseLinear;
  c.trajectory.waypoints = {{0.0, {0.0, 0.048}},
                            {1.0, {0.0, 0.048}},
                            {8.0, {0.0, 0.09}},
                            {10.0, {0.0, 0.09}}};
  c.controller.events = {event_at(0.0, {100.0, 100.0}, {2.0, 2.0}),
                         event_at(8.2, {400.0, 400.0}, {4.0, 4.0})};
  c.success.kind = "press_slope";
  c.success.params = {{"k_N_m", 100.0}, {"slope_lo_frac", 0.95},
                      {"slope_hi_frac", 1.05}, {"min_force_N", 8.2},
                      {"disp_min_m", 0.002}, {"disp_max_m", 0.04},
                      {"t_min_s", 1.5}, {"t_max_s", 7.9}, {"axis", 1.0}};
  return c;
}

inline ScenarioConfig circle_2cm(double k = 100.0) {
  ScenarioConfig c;
  c.name = "circle_2cm";
  c.duration = 13.0;
  c.transient = 2.0 * M_PI;  // one trajectory period
  c.plant.theta0 = {0.55, 1.63};
  c.trajectory.kind = TrajectoryKind::Circle;
  c.trajectory.center = {0.0, 0.06};
  c.trajectory.radius = 0.02;
  c.trajectory.angular_rate = 1.0;
  c.controller.events = {event_at(0.0, {k, k}, {2.0, 2.0})};
  c.success.kind = "tracking";
  c.success.params = {{"max_error_m", 0.01}};
  return c;
}

inline ScenarioConfig rectangle() {
  ScenarioConfig c;
  c.name = "rectangle";
  c.duration = 10.0;
  c.transient = 5.0;  // one perimeter period
  c.plant.theta0 = {1.05, 1.92};
  c.trajectory.kind = TrajectoryKind::Rectangle;
  c.trajectory.center = {0.0, 0.06};
  c.trajectory.width = 0.03;
  c.trajectory.height = 0.02;
  c.trajectory.speed = 0.02;
  c.controller.events = {event_at(0.0, {100.0, 100.0}, {2.0, 2.0})};
  c.success.kind = "tracking";
  c.success.params = {{"max_error_m", 0.01}};
  return c;
}

// Two-fingertip squeeze of a disk held high between the tips, where the
// elbows stay clear of the object. Shared by the grasp-family presets.
inline ScenarioConfig grasp_base(const std::string& name, double obj_radius,
                                 double obj_mass, Vec2 close_to,
                                 double force_cap = 0.0) {
  ScenarioConfig c;
  c.name = name;
  c.duration = 3.0;
  c.plant.theta0 = {1.09, 0.95};  // tips at local (0.005, 0.080)
  c.object.present = true;
  c.object.shape = "disk";
  c.object.radius = obj_radius;
  c.object.mass = obj_mass;
  c.object.inertia = 0.5 * obj_mass * obj_radius * obj_radius;
  c.object.position = {0.0, 0.07};
  c.trajectory.kind = TrajectoryKind::PiecewiseLinear;
  c.trajectory.waypoints = {{0.0, {0.005, 0.08}},
                            {1.0, close_to},
                            {c.duration, close_to}};
  EventConfig e = event_at(0.0, {100.0, 100.0}, {2.0, 2.0});
  e.force_cap = force_cap;
  c.controller.events = {e};
  return c;
}

inline ScenarioConfig grasp_hold() {
  ScenarioConfig c = grasp_base("grasp_hold", 0.012, 0.05, {0.03, 0.07});
  c.success.kind = "force_closure";
  c.success.params = {{"min_normal_N", 0.2}};
  return c;
}

inline ScenarioConfig fragile(const std::string& name, double radius,
                              double mass, Vec2 close_to, double f_max) {
  // Commanded-force cap sits under the rated limit, and the approach is slow,
  // so transient contact damping cannot push the peak normal force past it.
  ScenarioConfig c = grasp_base(name, radius, mass, close_to, 0.85 * f_max);
  c.duration = 4.0;
  c.trajectory.waypoints = {{0.0, {0.005, 0.08}},
                            {2.0, close_to},
                            {4.0, close_to}};
  c.success.kind = "fragile";
  c.success.params = {{"f_max_N", f_max}, {"min_normal_N", 0.1}};
  return c;
}

inline ScenarioConfig card() {
  return fragile("card", 0.004, 0.004, {0.04, 0.07}, 0.3);
}
inline ScenarioConfig chip() {
  return fragile("chip", 0.012, 0.01, {0.03, 0.07}, 0.5);
}
inline ScenarioConfig egg() {
  return fragile("egg", 0.02, 0.05, {0.03, 0.07}, 2.0);
}

inline ScenarioConfig disturbance() {
  ScenarioConfig c = grasp_base("disturbance", 0.012, 0.05, {0.03, 0.07});
  c.duration = 4.0;
  c.trajectory.waypoints.back().time = c.duration;
  c.pulses = {{2.0, 0.2, 0.5, 0.0, 0.003}};
  c.success.kind = "disturbance";
  c.success.params = {{"min_normal_N", 0.2}, {"max_disp_m", 0.02}};
  return c;
}

inline ScenarioConfig form_closure_grasp() {
  ScenarioConfig c;
  c.name = "form_closure_grasp";
  c.duration = 3.0;
  c.plant.theta0 = {1.3, 0.6};
  c.controller.space = ImpedanceSpace::Joint;
  c.controller.use_trajectory = false;
  c.object.present = true;
  c.object.shape = "polygon";
  // Square, side 30 mm, balanced on one vertex between the fingers.  The
  // diamond pose spreads the contact normals around the object (palm under
  // the bottom vertex, finger links and tips on the slanted faces), which a
  // flat face-on-palm rest cannot do.
  c.object.vertices = {{0.021, 0.0}, {0.0, 0.021}, {-0.021, 0.0},
                       {0.0, -0.021}};
  c.object.position = {0.0, 0.0255};
  c.object.mass = 0.08;
  c.object.inertia = 0.08 * (0.03 * 0.03) / 6.0;
  EventConfig wrap;
  wrap.trigger = "time";
  wrap.at_s = 0.0;
  wrap.k = {1.0, 0.8};       // N*m/rad (joint space)
  wrap.b = {0.05, 0.03};
  wrap.desired = {0.35, 2.1};  // curl both joints around the square
  c.controller.events = {wrap};
  c.success.kind = "form_closure";
  c.success.params = {{"min_normal_N", 0.05}};
  return c;
}

inline ScenarioConfig snatch_ball() {
  ScenarioConfig c;
  c.name = "snatch_ball";
  c.duration = 1.5;
  c.plant.theta0 = {1.1, 0.3};  // tips high and nearly closed
  c.controller.use_trajectory = false;
  c.object.present = true;
  c.object.shape = "disk";
  c.object.radius = 0.01;
  c.object.mass = 0.02;
  c.object.inertia = 0.5 * 0.02 * 0.01 * 0.01;
  c.object.position = {0.0, 0.105};
  // Table the ball rests against; the sweep snatches it off this surface.
  c.environment = {{{-0.06, 0.1155}, {0.06, 0.1155}, 0.0005}};
  c.base_motion.kind = BaseMotionKind::DownUp;
  c.base_motion.home = {0.0, 0.0};
  c.base_motion.depth = -0.05;  // sweep toward the object, no pause
  c.base_motion.speed = 0.5;
  c.base_motion.start_time = 0.1;
  EventConfig limp;
  limp.trigger = "time";
  limp.at_s = 0.0;
  limp.k = {0.0, 0.0};     // zero stiffness until contact is sensed
  limp.b = {0.3, 0.3};
  limp.desired = {0.0295, 0.084};
  EventConfig close;
  close.trigger = "y_displacement";
  close.threshold_m = 0.01;
  close.k = {100.0, 100.0};
  close.b = {2.0, 2.0};
  close.desired = {0.033, 0.078};
  c.controller.events = {limp, close};
  c.success.kind = "snatch";
  c.success.params = {{"min_normal_N", 0.2}};
  return c;
}

inline ScenarioConfig inhand_translate() {
  ScenarioConfig c = grasp_base("inhand_translate", 0.012, 0.05, {0.03, 0.07});
  c.duration = 5.0;
  c.trajectory.waypoints = {{0.0, {0.005, 0.08}},
                            {1.0, {0.03, 0.07}},
                            {1.5, {0.03, 0.07}},
                            {3.0, {0.03, 0.082}},
                            {4.5, {0.03, 0.07}},
                            {5.0, {0.03, 0.07}}};
  c.success.kind = "object_translated";
  c.success.params = {{"min_dy_m", 0.005}, {"min_normal_N", 0.2}};
  return c;
}

inline ScenarioConfig inhand_rotate() {
  ScenarioConfig c = inhand_translate();
  c.name = "inhand_rotate";
  // Finger 1 moves in antiphase: opposite world-frame tangential motion
  // rolls the disk between the tips.
  c.has_trajectory1 = true;
  c.trajectory1 = c.trajectory;
  c.trajectory1.waypoints = {{0.0, {0.005, 0.08}},
                             {1.0, {0.03, 0.07}},
                             {1.5, {0.03, 0.07}},
                             {3.0, {0.03, 0.058}},
                             {4.5, {0.03, 0.07}},
                             {5.0, {0.03, 0.07}}};
  c.success.kind = "object_rotated";
  c.success.params = {{"min_rot_rad", 0.1}, {"min_normal_N", 0.2}};
  return c;
}

inline ScenarioConfig palm_push() {
  ScenarioConfig c;
  c.name = "palm_push";
  c.duration = 4.5;
  c.plant.theta0 = {1.3, 0.6};
  c.plant.gravity = {0.0, -9.81};
  c.object.present = true;
  c.object.shape = "disk";
  c.object.radius = 0.015;
  c.object.mass = 0.05;
  c.object.inertia = 0.5 * 0.05 * 0.015 * 0.015;
  c.object.position = {0.0, 0.0192};  // resting on the palm
  c.trajectory.kind = TrajectoryKind::PiecewiseLinear;
  c.trajectory.waypoints = {{0.0, {0.0005, 0.086}},
                            {1.5, {0.02, 0.055}},
                            {3.5, {0.028, 0.035}},
                            {4.5, {0.028, 0.035}}};
  EventConfig grip = event_at(0.0, {100.0, 100.0}, {2.0, 2.0});
  EventConfig softened;
  softened.trigger = "palm_contact";
  softened.while_palm_contact = true;
  softened.k = {50.0, 100.0};  // stiffness halved normal to the object
  softened.b = {2.0, 2.0};
  c.controller.events = {grip, softened};
  c.success.kind = "palm_push";
  c.success.params = {{"min_palm_N", 0.05}, {"min_normal_N", 0.1}};
  return c;
}

inline ScenarioConfig coin_slide() {
  // Side view of a coin lying on a slightly tilted table: the +x axis points
  // into the table surface, so gravity is mostly +x with a small component
  // along the surface toward the edge.  The fingertip rides just below the
  // coin and lowers it along the surface until it rests against the rounded
  // table edge, where it stays pinned between edge, surface, and tip.
  ScenarioConfig c;
  c.name = "coin_slide";
  c.duration = 9.0;
  c.plant.gravity = {9.796, -0.513};  // 3 deg tilt toward the edge
  c.plant.theta0 = {0.668, 1.72};     // tip touching the coin from below
  c.object.present = true;
  c.object.shape = "disk";
  c.object.radius = 0.009;
  c.object.mass = 0.005;
  c.object.inertia = 0.5 * 0.005 * 0.009 * 0.009;
  c.object.position = {-0.0145, 0.06};
  // Table surface, ending at the edge cap at (-0.005, 0.045).
  c.environment = {{{-0.005, 0.09}, {-0.005, 0.045}, 0.0005}};
  c.trajectory.kind = TrajectoryKind::PiecewiseLinear;
  c.trajectory.waypoints = {{0.0, {0.0093, 0.0585}},
                            {1.0, {0.012, 0.056}},
                            {6.5, {0.013, 0.034}},
                            {9.0, {0.013, 0.034}}};
  c.has_trajectory1 = true;
  c.trajectory1.kind = TrajectoryKind::PiecewiseLinear;
  c.trajectory1.waypoints = {{0.0, {0.036, 0.038}}, {9.0, {0.036, 0.038}}};
  c.controller.events = {event_at(0.0, {100.0, 100.0}, {2.0, 2.0})};
  c.success.kind = "slide_to_edge";
  c.success.params = {{"min_slide_m", 0.012}, {"edge_x_m", -0.005},
                      {"edge_y_m", 0.045},    {"edge_tol_m", 0.0105},
                      {"max_end_speed_m_s", 0.001},
                      {"min_tip_normal_N", 0.003}};
  return c;
}

inline const std::map<std::string, std::function<ScenarioConfig()>>&
registry() {
  static const std::map<std::string, std::function<ScenarioConfig()>> r = {
      {"motor_torque_linearity", motor_torque_linearity},
      {"press", press},
      {"circle_2cm", [] { return circle_2cm(); }},
      {"rectangle", rectangle},
      {"grasp_hold", grasp_hold},
      {"card", card},
      {"chip", chip},
      {"egg", egg},
      {"disturbance", disturbance},
      {"form_closure_grasp", form_closure_grasp},
      {"snatch_ball", snatch_ball},
      {"inhand_translate", inhand_translate},
      {"inhand_rotate", inhand_rotate},
      {"palm_push", palm_push},
      {"coin_slide", coin_slide},
  };
  return r;
}

inline std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

inline ScenarioConfig get(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    throw std::runtime_error("unknown preset: " + name);
  }
  return it->second();
}

}  // namespace presets
}  // namespace qdd
