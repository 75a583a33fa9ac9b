#pragma once

#include <stdexcept>
#include <vector>

#include "qdd/vec2.hpp"

namespace qdd {

// Which joint-torque -> motor-torque map the controller uses. The nominal
// firmware map and the virtual-work transpose of the angle map differ by a
// factor of two when n2 = 1; both are kept selectable.
enum class TorqueMapMode { Nominal, EnergyConsistent };

// Differential belt/bevel drive: two motors jointly drive the two finger
// joints. n1 is the belt reduction, n2 the bevel reduction at joint 2.
struct TransmissionParams {
  double n1 = 2.57;
  double n2 = 1.0;
  TorqueMapMode torque_map_mode = TorqueMapMode::Nominal;

  bool valid() const { return n1 > 0.0 && n2 > 0.0; }

  // theta = A * q, and theta_dot = A * q_dot.
  Mat2 angle_map() const {
    return {1.0 / (2.0 * n1), -1.0 / (2.0 * n1),
            1.0 / (2.0 * n1 * n2), 1.0 / (2.0 * n1 * n2)};
  }
  Mat2 angle_map_inverse() const { return angle_map().inverse(); }

  // Commanded joint torque -> motor torque command.
  Mat2 torque_map() const {
    switch (torque_map_mode) {
      case TorqueMapMode::Nominal:
        return {1.0 / n1, 1.0 / n1, -1.0 / n1, 1.0 / n1};
      case TorqueMapMode::EnergyConsistent:
        return angle_map().transpose();
    }
    return Mat2::identity();
  }
  // Motor shaft torque -> effective joint torque (inverse of torque_map, so
  // a command that survives saturation arrives at the joints unchanged).
  Mat2 torque_map_inverse() const { return torque_map().inverse(); }
};

inline Vec2 motor_to_joint(Vec2 q, const TransmissionParams& params) {
  return params.angle_map() * q;
}

inline Vec2 joint_to_motor(Vec2 theta, const TransmissionParams& params) {
  return params.angle_map_inverse() * theta;
}

inline Vec2 joint_torque_to_motor_torque(Vec2 tau_theta,
                                         const TransmissionParams& params) {
  return params.torque_map() * tau_theta;
}

inline Vec2 motor_torque_to_joint_torque(Vec2 tau_q,
                                         const TransmissionParams& params) {
  return params.torque_map_inverse() * tau_q;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

// Planar 2R finger: proximal link l1, distal link l2, joint limits in rad.
struct FingerGeometry {
  double l1 = 0.05;
  double l2 = 0.04;
  Interval theta1_limits{0.0, 3.0};
  Interval theta2_limits{-M_PI / 2.0, 3.0 * M_PI / 4.0};

  bool valid() const {
    return l1 > 0.0 && l2 > 0.0 && theta1_limits.lo < theta1_limits.hi &&
           theta2_limits.lo < theta2_limits.hi;
  }
};

// Joint angles/velocities together with the motor-space image under the
// transmission. Kept in sync by construction.
struct JointState {
  Vec2 theta;
  Vec2 theta_dot;
  Vec2 q;
  Vec2 q_dot;

  static JointState from_joint(Vec2 theta, Vec2 theta_dot,
                               const TransmissionParams& params) {
    JointState s;
    s.theta = theta;
    s.theta_dot = theta_dot;
    s.q = joint_to_motor(theta, params);
    s.q_dot = joint_to_motor(theta_dot, params);
    return s;
  }
};

inline Vec2 forward_kinematics(Vec2 theta, const FingerGeometry& geom) {
  const double t12 = theta.x + theta.y;
  return {geom.l1 * std::cos(theta.x) + geom.l2 * std::cos(t12),
          geom.l1 * std::sin(theta.x) + geom.l2 * std::sin(t12)};
}

// Position of a point along link `link` (1 or 2) at arc fraction s in [0,1].
inline Vec2 link_point(Vec2 theta, const FingerGeometry& geom, int link,
                       double s) {
  if (link == 1) {
    return {s * geom.l1 * std::cos(theta.x), s * geom.l1 * std::sin(theta.x)};
  }
  const double t12 = theta.x + theta.y;
  return {geom.l1 * std::cos(theta.x) + s * geom.l2 * std::cos(t12),
          geom.l1 * std::sin(theta.x) + s * geom.l2 * std::sin(t12)};
}

inline Mat2 jacobian(Vec2 theta, const FingerGeometry& geom) {
  const double t12 = theta.x + theta.y;
  const double s1 = std::sin(theta.x), c1 = std::cos(theta.x);
  const double s12 = std::sin(t12), c12 = std::cos(t12);
  return {-geom.l1 * s1 - geom.l2 * s12, -geom.l2 * s12,
          geom.l1 * c1 + geom.l2 * c12, geom.l2 * c12};
}

// Jacobian of the point link_point(theta, geom, link, s).
inline Mat2 point_jacobian(Vec2 theta, const FingerGeometry& geom, int link,
                           double s) {
  if (link == 1) {
    const double r = s * geom.l1;
    return {-r * std::sin(theta.x), 0.0, r * std::cos(theta.x), 0.0};
  }
  const double t12 = theta.x + theta.y;
  const double r = s * geom.l2;
  const double s1 = std::sin(theta.x), c1 = std::cos(theta.x);
  const double s12 = std::sin(t12), c12 = std::cos(t12);
  return {-geom.l1 * s1 - r * s12, -r * s12, geom.l1 * c1 + r * c12, r * c12};
}

// Fingertip positions over a grid_n x grid_n grid spanning the joint-limit
// box. Every point lies in the annulus |l1-l2| <= r <= l1+l2.
inline std::vector<Vec2> sample_workspace(const FingerGeometry& geom,
                                          int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("sample_workspace: grid_n < 2");
  std::vector<Vec2> points;
  points.reserve(static_cast<size_t>(grid_n) * grid_n);
  const double d1 = (geom.theta1_limits.hi - geom.theta1_limits.lo) / (grid_n - 1);
  const double d2 = (geom.theta2_limits.hi - geom.theta2_limits.lo) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2 theta{geom.theta1_limits.lo + i * d1,
                       geom.theta2_limits.lo + j * d2};
      points.push_back(forward_kinematics(theta, geom));
    }
  }
  return points;
}

}  // namespace qdd
