#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qdd/transmission.hpp"
#include "qdd/vec2.hpp"

namespace qdd {

enum class ImpedanceSpace { Cartesian, Joint };

// Virtual spring-damper rendered at the fingertip (Cartesian) or at the
// joints. K and B are diagonal.
struct ImpedanceParams {
  ImpedanceSpace space = ImpedanceSpace::Cartesian;
  Vec2 desired;          // x_d (m) or theta_d (rad)
  Mat2 K = Mat2::diag(100.0, 100.0);
  Mat2 B = Mat2::diag(1.0, 1.0);
  // Per-axis cap on the spring force K(x_d - x); <= 0 disables the cap.
  // Used by the fragile-object presets to limit closing force.
  double force_cap = 0.0;
};

// Keeps joint 2 out of the inverted configuration: while theta2 is below
// the threshold, tau_2 is replaced by the constant tau_star.
struct OverridePolicy {
  double theta2_threshold = 0.05;  // rad
  double tau_star = 0.1;           // N*m
  bool enabled = true;

  bool active(double theta2) const {
    return enabled && theta2 < theta2_threshold;
  }
};

struct ControlSchedule {
  double inner_dt = 1e-4;  // s
  int ratio = 5;           // outer_dt = ratio * inner_dt
  double outer_dt() const { return inner_dt * ratio; }
};

inline Vec2 spring_force(const ImpedanceParams& params, Vec2 error) {
  Vec2 f = params.K * error;
  if (params.force_cap > 0.0) {
    const double cap = params.force_cap;
    if (f.x > cap) f.x = cap;
    if (f.x < -cap) f.x = -cap;
    if (f.y > cap) f.y = cap;
    if (f.y < -cap) f.y = -cap;
  }
  return f;
}

// tau = J^T (K (x_d - x) - B xdot), with the joint-2 override applied.
inline Vec2 cartesian_impedance_torque(const JointState& js,
                                       const ImpedanceParams& params,
                                       const FingerGeometry& geom,
                                       const OverridePolicy& policy) {
  const Vec2 x = forward_kinematics(js.theta, geom);
  const Mat2 J = jacobian(js.theta, geom);
  const Vec2 xdot = J * js.theta_dot;
  const Vec2 f = spring_force(params, params.desired - x) - params.B * xdot;
  Vec2 tau = J.transpose() * f;
  if (policy.active(js.theta.y)) tau.y = policy.tau_star;
  return tau;
}

// tau = K (theta_d - theta) - B thetadot.
inline Vec2 joint_impedance_torque(const JointState& js,
                                   const ImpedanceParams& params) {
  return params.K * (params.desired - js.theta) - params.B * js.theta_dot;
}

inline Vec2 impedance_torque(const JointState& js,
                             const ImpedanceParams& params,
                             const FingerGeometry& geom,
                             const OverridePolicy& policy) {
  return params.space == ImpedanceSpace::Cartesian
             ? cartesian_impedance_torque(js, params, geom, policy)
             : joint_impedance_torque(js, params);
}

struct OuterLoopResult {
  Vec2 tau_theta;      // commanded joint torques
  Vec2 tau_motor;      // after transmission map and saturation
  bool saturated = false;
  bool override_active = false;
};

// One outer-loop cycle: impedance law -> transmission torque map -> per-motor
// saturation at kt * i_max. The result is held for `ratio` inner steps.
inline OuterLoopResult outer_loop_step(const JointState& js,
                                       const ImpedanceParams& params,
                                       const FingerGeometry& geom,
                                       const OverridePolicy& policy,
                                       const TransmissionParams& trans,
                                       double tau_motor_max) {
  OuterLoopResult r;
  r.tau_theta = impedance_torque(js, params, geom, policy);
  r.override_active =
      params.space == ImpedanceSpace::Cartesian && policy.active(js.theta.y);
  r.tau_motor = joint_torque_to_motor_torque(r.tau_theta, trans);
  auto clamp = [&](double& v) {
    if (v > tau_motor_max) { v = tau_motor_max; r.saturated = true; }
    if (v < -tau_motor_max) { v = -tau_motor_max; r.saturated = true; }
  };
  clamp(r.tau_motor.x);
  clamp(r.tau_motor.y);
  return r;
}

// First-order low-pass velocity estimate from sampled (quantized) angles.
class VelocityEstimator {
 public:
  explicit VelocityEstimator(double cutoff_hz = 100.0)
      : cutoff_hz_(cutoff_hz) {}

  Vec2 update(Vec2 angle, double dt) {
    if (!primed_) {
      prev_ = angle;
      primed_ = true;
      return filtered_;
    }
    const Vec2 raw = (angle - prev_) / dt;
    prev_ = angle;
    const double alpha = 1.0 - std::exp(-2.0 * M_PI * cutoff_hz_ * dt);
    filtered_ += alpha * (raw - filtered_);
    return filtered_;
  }

  Vec2 value() const { return filtered_; }
  void reset() { primed_ = false; filtered_ = {}; }

 private:
  double cutoff_hz_;
  Vec2 prev_;
  Vec2 filtered_;
  bool primed_ = false;
};

// State visible to gain-schedule predicates.
struct ScheduleContext {
  double time = 0.0;
  Vec2 fingertip;        // hand-frame fingertip position
  Vec2 fingertip_rest;   // fingertip position at schedule start
  Vec2 theta;
  bool object_contact = false;
  bool palm_contact = false;
};

// Event-driven gain schedule. Events fire monotonically (never un-fire);
// the active parameters are those of the last fired event.
class GainSchedule {
 public:
  struct Event {
    std::function<bool(const ScheduleContext&)> trigger;
    ImpedanceParams params;
    // While `condition` (if set) is false after firing, `fallback` applies.
    // Used for schedules that modify gains only while a predicate holds.
    std::function<bool(const ScheduleContext&)> hold_condition;
    ImpedanceParams hold_fallback;
  };

  explicit GainSchedule(std::vector<Event> events)
      : events_(std::move(events)) {
    if (events_.empty()) {
      throw std::invalid_argument("gain schedule must have >= 1 event");
    }
    fired_.assign(events_.size(), false);
    fire_time_.assign(events_.size(),
                      std::numeric_limits<double>::quiet_NaN());
  }

  static GainSchedule constant(const ImpedanceParams& params) {
    Event e;
    e.trigger = [](const ScheduleContext&) { return true; };
    e.params = params;
    return GainSchedule({std::move(e)});
  }

  static Event at_time(double t, const ImpedanceParams& params) {
    Event e;
    e.trigger = [t](const ScheduleContext& c) { return c.time >= t; };
    e.params = params;
    return e;
  }

  ImpedanceParams active(const ScheduleContext& ctx) {
    for (size_t i = 0; i < events_.size(); ++i) {
      if (!fired_[i] && events_[i].trigger(ctx)) {
        fired_[i] = true;
        fire_time_[i] = ctx.time;
      }
    }
    ImpedanceParams current = events_.front().params;
    bool any = false;
    for (size_t i = 0; i < events_.size(); ++i) {
      if (!fired_[i]) continue;
      any = true;
      const Event& e = events_[i];
      if (e.hold_condition && !e.hold_condition(ctx)) {
        current = e.hold_fallback;
      } else {
        current = e.params;
      }
    }
    if (!any) {
      // Nothing fired yet: hold the first event's params as the baseline.
      current = events_.front().params;
    }
    return current;
  }

  bool fired(size_t i) const { return fired_.at(i); }
  // Time the event fired; NaN while unfired.
  double fire_time(size_t i) const { return fire_time_.at(i); }
  size_t size() const { return events_.size(); }
  void reset() {
    fired_.assign(events_.size(), false);
    fire_time_.assign(events_.size(),
                      std::numeric_limits<double>::quiet_NaN());
  }

 private:
  std::vector<Event> events_;
  std::vector<bool> fired_;
  std::vector<double> fire_time_;
};

}  // namespace qdd
