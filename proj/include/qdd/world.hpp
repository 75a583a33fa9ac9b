#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdd/contact.hpp"
#include "qdd/dynamics.hpp"
#include "qdd/impedance.hpp"
#include "qdd/motor.hpp"
#include "qdd/trajectory.hpp"
#include "qdd/transmission.hpp"
#include "qdd/vec2.hpp"

namespace qdd {

// Hand-frame layout: two mirrored fingers on a palm. Finger 0 sits at
// x = -separation/2 with local +x pointing toward the palm center; finger 1
// is its mirror image (local coordinates x-negated into the hand frame).
struct HandConfig {
  double palm_separation = 0.08;  // m between finger bases
  double tip_radius = 0.008;      // m, fingertip collision disk
  double link_radius = 0.006;     // m, link capsule radius
  double palm_radius = 0.004;     // m, palm segment thickness

  Vec2 mount(int finger) const {
    const double x = palm_separation / 2.0;
    return {finger == 0 ? -x : x, 0.0};
  }
  // Local-frame vector -> hand-frame vector.
  Vec2 to_hand(int finger, Vec2 v) const {
    return finger == 0 ? v : Vec2{-v.x, v.y};
  }
};

// One finger with its two motors, controller state, and command hold.
struct FingerUnit {
  FingerPlant plant;
  std::array<FocMotor, 2> motors;
  VelocityEstimator vel_estimator{100.0};
  std::optional<GainSchedule> gains;
  TrajectorySpec trajectory;
  bool use_trajectory = true;  // sample trajectory for the desired pose
  OverridePolicy override_policy;

  // Zero-order hold between outer ticks.
  Vec2 desired_motor_torque;
  OuterLoopResult last_outer;
  Vec2 desired_pos;
  Vec2 fingertip_rest;
  Vec2 commanded_force;  // K(x_d - x) after the force cap, Cartesian only
};

struct WrenchPulse {
  double start = 0.0;
  double duration = 0.0;
  PlanarWrench wrench;
};

// Contact enriched with the finger-side attachment used for force feedback.
struct ResolvedContact {
  ContactPoint point;
  Vec2 force;              // on the object, world frame
  Vec2 finger_point;       // world-frame material point on the finger/palm
  double link_fraction = 0.0;
};

class SimWorld {
 public:
  ControlSchedule schedule;
  HandConfig hand;
  std::array<FingerUnit, 2> fingers;
  std::optional<RigidObject> object;
  BaseMotionSpec base_motion;
  PenaltyParams penalty;
  // Static fixtures (walls, table edges) that collide with the object only.
  std::vector<CollisionSegment> environment;
  double friction_mu = 0.5;
  Vec2 object_gravity;  // m/s^2, applied to the object only
  std::vector<WrenchPulse> pulses;
  double tau_motor_max = 0.0265 * 15.0;  // kt * i_max
  uint64_t rng_seed = 0;

  double time = 0.0;
  int64_t step_count = 0;

  const ContactSet& contacts() const { return contacts_; }
  const std::vector<ResolvedContact>& resolved_contacts() const {
    return resolved_;
  }
  Vec2 base_position() const { return base_motion.position(time); }

  // World-frame fingertip position of a finger.
  Vec2 fingertip_world(int f) const {
    const FingerUnit& u = fingers[f];
    const Vec2 local = forward_kinematics(u.plant.state.theta, u.plant.geometry);
    return base_position() + hand.mount(f) + hand.to_hand(f, local);
  }

  void initialize() {
    for (int f = 0; f < 2; ++f) {
      FingerUnit& u = fingers[f];
      u.plant.state = JointState::from_joint(u.plant.state.theta,
                                             u.plant.state.theta_dot,
                                             u.plant.transmission);
      for (int m = 0; m < 2; ++m) {
        const double q = m == 0 ? u.plant.state.q.x : u.plant.state.q.y;
        const double qd = m == 0 ? u.plant.state.q_dot.x : u.plant.state.q_dot.y;
        u.motors[m].set_mechanical(q, qd);
      }
      u.fingertip_rest =
          forward_kinematics(u.plant.state.theta, u.plant.geometry);
      u.desired_pos = u.fingertip_rest;
      u.vel_estimator.reset();
    }
    detect_contacts();
  }

  // Advance by one inner_dt. Every `ratio`-th call also runs the outer loop.
  void step() {
    if (step_count % schedule.ratio == 0) outer_loop();

    const double dt = schedule.inner_dt;

    // Inner loop: one FOC cycle per motor, shaft torque through the
    // transmission.
    std::array<Vec2, 2> tau_joint;
    for (int f = 0; f < 2; ++f) {
      FingerUnit& u = fingers[f];
      const Vec2 tau_shaft{
          u.motors[0].foc_step(u.desired_motor_torque.x, dt),
          u.motors[1].foc_step(u.desired_motor_torque.y, dt)};
      tau_joint[f] = motor_torque_to_joint_torque(tau_shaft,
                                                  u.plant.transmission);
    }

    detect_contacts();

    // Contact forces: accumulate on the object and reflect to the fingers.
    Vec2 obj_force;
    double obj_torque = 0.0;
    std::array<Vec2, 2> tau_ext{};
    const Vec2 base_vel = base_motion.velocity(time);
    for (ResolvedContact& rc : resolved_) {
      const ContactPoint& c = rc.point;
      Vec2 finger_vel = base_vel;
      Mat2 Jp = Mat2::identity();
      int f = c.finger;
      if (f >= 0) {
        const FingerUnit& u = fingers[f];
        Jp = c.link == 3 ? jacobian(u.plant.state.theta, u.plant.geometry)
                         : point_jacobian(u.plant.state.theta,
                                          u.plant.geometry, c.link,
                                          rc.link_fraction);
        finger_vel += hand.to_hand(f, Jp * u.plant.state.theta_dot);
      }
      Vec2 obj_point_vel{0.0, 0.0};
      if (object) {
        const Vec2 r = c.position - object->position;
        obj_point_vel = object->velocity +
                        object->angular_velocity * r.perp();
      }
      const Vec2 rel_vel = obj_point_vel - finger_vel;
      const Vec2 f_obj = contact_force(c, rel_vel, penalty);
      rc.force = f_obj;
      if (object) {
        obj_force += f_obj;
        obj_torque += cross(c.position - object->position, f_obj);
      }
      if (f >= 0) {
        // Reaction on the finger, expressed in its local frame.
        const Vec2 f_local = hand.to_hand(f, -f_obj);
        tau_ext[f] += Jp.transpose() * f_local;
      }
    }

    // Finger integration (semi-implicit Euler).
    for (int f = 0; f < 2; ++f) {
      FingerUnit& u = fingers[f];
      const Vec2 acc = finger_dynamics(u.plant, tau_joint[f], tau_ext[f]);
      integrate_finger(u.plant, acc, dt);
      u.motors[0].set_mechanical(u.plant.state.q.x, u.plant.state.q_dot.x);
      u.motors[1].set_mechanical(u.plant.state.q.y, u.plant.state.q_dot.y);
      if (!all_finite(u.plant.state.theta) ||
          !all_finite(u.plant.state.theta_dot)) {
        throw std::runtime_error("non-finite finger state at step " +
                                 std::to_string(step_count));
      }
    }

    // Object integration.
    if (object && !object->kinematic) {
      Vec2 F = obj_force + object_gravity * object->mass;
      double T = obj_torque;
      for (const WrenchPulse& p : pulses) {
        if (time >= p.start && time < p.start + p.duration) {
          F += Vec2{p.wrench.fx, p.wrench.fy};
          T += p.wrench.tz;
        }
      }
      object->velocity += F * (dt / object->mass);
      object->angular_velocity += T * (dt / object->inertia);
      object->position += object->velocity * dt;
      object->orientation += object->angular_velocity * dt;
      if (!all_finite(object->position) || !all_finite(object->velocity)) {
        throw std::runtime_error("non-finite object state at step " +
                                 std::to_string(step_count));
      }
    }

    ++step_count;
    time = step_count * dt;
  }

  // Rebuild the contact set between the hand's collision primitives and the
  // object. Normals point into the object.
  void detect_contacts() {
    contacts_.clear();
    resolved_.clear();
    if (!object) return;
    const Vec2 base = base_position();
    for (int f = 0; f < 2; ++f) {
      const FingerUnit& u = fingers[f];
      const Vec2 theta = u.plant.state.theta;
      const FingerGeometry& g = u.plant.geometry;
      const Vec2 origin = base + hand.mount(f);
      const Vec2 joint2 = origin + hand.to_hand(f, link_point(theta, g, 1, 1.0));
      const Vec2 tip = origin + hand.to_hand(f, forward_kinematics(theta, g));

      add_circle_contact({tip, hand.tip_radius, {}}, f, 3, 0.0);
      add_segment_contact(origin, joint2, hand.link_radius, f, 1);
      add_segment_contact(joint2, tip, hand.link_radius, f, 2);
    }
    // Palm segment between the finger bases.
    add_segment_contact(base + hand.mount(0), base + hand.mount(1),
                        hand.palm_radius, -1, 0);
    // Static fixtures.
    for (const CollisionSegment& seg : environment) {
      add_segment_contact(seg.a, seg.b, seg.radius, -1, -1);
    }
  }

  // Copy used by the recorder of the last outer-loop sample per finger.
  double last_outer_time = 0.0;

 private:
  void outer_loop() {
    for (int f = 0; f < 2; ++f) {
      FingerUnit& u = fingers[f];
      if (!u.gains) throw std::runtime_error("finger has no gain schedule");

      // Measurement path: quantized encoders -> joint angles -> filtered
      // velocity estimate.
      const Vec2 q_meas{
          encoder_read(u.motors[0].state().rotor_angle, u.motors[0].encoder()),
          encoder_read(u.motors[1].state().rotor_angle, u.motors[1].encoder())};
      const Vec2 theta_meas = motor_to_joint(q_meas, u.plant.transmission);
      const Vec2 theta_dot_est =
          u.vel_estimator.update(theta_meas, schedule.outer_dt());

      ScheduleContext ctx;
      ctx.time = time;
      ctx.theta = theta_meas;
      ctx.fingertip = forward_kinematics(theta_meas, u.plant.geometry);
      ctx.fingertip_rest = u.fingertip_rest;
      for (const ContactPoint& c : contacts_) {
        if (c.finger == f && c.penetration > 0.0) ctx.object_contact = true;
        if (c.finger < 0 && c.link == 0 && c.penetration > 0.0) {
          ctx.palm_contact = true;
        }
      }

      ImpedanceParams params = u.gains->active(ctx);
      if (u.use_trajectory && params.space == ImpedanceSpace::Cartesian) {
        params.desired = u.trajectory.sample(time);
      }
      u.desired_pos = params.desired;

      JointState meas;
      meas.theta = theta_meas;
      meas.theta_dot = theta_dot_est;
      meas.q = q_meas;
      meas.q_dot = joint_to_motor(theta_dot_est, u.plant.transmission);

      u.last_outer = outer_loop_step(meas, params, u.plant.geometry,
                                     u.override_policy, u.plant.transmission,
                                     tau_motor_max);
      u.desired_motor_torque = u.last_outer.tau_motor;
      u.commanded_force =
          params.space == ImpedanceSpace::Cartesian
              ? spring_force(params, params.desired - ctx.fingertip)
              : Vec2{0.0, 0.0};
    }
    last_outer_time = time;
  }

  void add_circle_contact(const CollisionCircle& c, int finger, int link,
                          double s) {
    auto cp = circle_vs_object(c, *object, friction_mu);
    if (!cp) return;
    cp->finger = finger;
    cp->link = link;
    contacts_.push_back(*cp);
    resolved_.push_back({*cp, {}, c.center, s});
  }

  void add_segment_contact(Vec2 a, Vec2 b, double radius, int finger,
                           int link) {
    CollisionSegment seg{a, b, radius, {}};
    Vec2 support;
    auto cp = segment_vs_object_support(seg, *object, friction_mu, support);
    if (!cp) return;
    cp->finger = finger;
    cp->link = link;
    const double len = (b - a).norm();
    const double s = len > 0.0 ? (support - a).norm() / len : 0.0;
    contacts_.push_back(*cp);
    resolved_.push_back({*cp, {}, support, s});
  }

  static std::optional<ContactPoint> segment_vs_object_support(
      const CollisionSegment& seg, const RigidObject& obj, double mu,
      Vec2& support) {
    support = closest_point_on_segment(obj.position, seg.a, seg.b);
    if (!obj.is_disk()) {
      double best_pen = -1e300;
      const int samples = 16;
      for (int i = 0; i <= samples; ++i) {
        const Vec2 p =
            seg.a + (seg.b - seg.a) * (static_cast<double>(i) / samples);
        const SurfaceQuery q = query_surface(obj, p);
        const double pen = seg.radius - q.distance;
        if (pen > best_pen) {
          best_pen = pen;
          support = p;
        }
      }
    }
    return circle_vs_object({support, seg.radius, {}}, obj, mu);
  }

  ContactSet contacts_;
  std::vector<ResolvedContact> resolved_;
};

}  // namespace qdd
