#pragma once

#include <stdexcept>

#include "qdd/transmission.hpp"
#include "qdd/vec2.hpp"

namespace qdd {

// One planar 2R finger plant: uniform-rod links driven through the
// differential transmission, with one-sided penalty torques at the joint
// limits instead of hard clamps.
struct FingerPlant {
  FingerGeometry geometry;
  TransmissionParams transmission;
  double m1 = 0.03;               // kg
  double m2 = 0.02;               // kg
  double com1 = 0.5;              // COM position as fraction of l1
  double com2 = 0.5;              // fraction of l2
  double joint_damping = 1e-4;    // N*m*s/rad
  double limit_stiffness = 50.0;  // N*m/rad beyond a limit
  JointState state;

  double lc1() const { return com1 * geometry.l1; }
  double lc2() const { return com2 * geometry.l2; }
  double link_inertia1() const { return m1 * geometry.l1 * geometry.l1 / 12.0; }
  double link_inertia2() const { return m2 * geometry.l2 * geometry.l2 / 12.0; }

  Mat2 mass_matrix(Vec2 theta) const {
    const double a1 = lc1(), a2 = lc2(), l1 = geometry.l1;
    const double I1 = link_inertia1(), I2 = link_inertia2();
    const double c2 = std::cos(theta.y);
    const double m11 =
        m1 * a1 * a1 + I1 + m2 * (l1 * l1 + a2 * a2 + 2.0 * l1 * a2 * c2) + I2;
    const double m12 = m2 * (a2 * a2 + l1 * a2 * c2) + I2;
    const double m22 = m2 * a2 * a2 + I2;
    return {m11, m12, m12, m22};
  }

  // Coriolis/centrifugal vector C(theta, theta_dot) * theta_dot.
  Vec2 coriolis(Vec2 theta, Vec2 theta_dot) const {
    const double h = m2 * geometry.l1 * lc2() * std::sin(theta.y);
    return {-h * (2.0 * theta_dot.x * theta_dot.y +
                  theta_dot.y * theta_dot.y),
            h * theta_dot.x * theta_dot.x};
  }

  Vec2 limit_torque(Vec2 theta) const {
    auto one_sided = [this](double v, const Interval& lim) {
      if (v < lim.lo) return limit_stiffness * (lim.lo - v);
      if (v > lim.hi) return -limit_stiffness * (v - lim.hi);
      return 0.0;
    };
    return {one_sided(theta.x, geometry.theta1_limits),
            one_sided(theta.y, geometry.theta2_limits)};
  }

  double kinetic_energy(Vec2 theta, Vec2 theta_dot) const {
    const Mat2 M = mass_matrix(theta);
    const Vec2 Mv = M * theta_dot;
    return 0.5 * dot(theta_dot, Mv);
  }
};

// Joint accelerations under applied joint torques and an already-projected
// external joint torque (sum of J_c^T f over contacts).
inline Vec2 finger_dynamics(const FingerPlant& plant, Vec2 tau_joint,
                            Vec2 tau_external) {
  const Mat2 M = plant.mass_matrix(plant.state.theta);
  if (std::abs(M.det()) < 1e-18) {
    throw std::runtime_error("finger_dynamics: singular mass matrix");
  }
  const Vec2 rhs = tau_joint + tau_external -
                   plant.coriolis(plant.state.theta, plant.state.theta_dot) -
                   plant.state.theta_dot * plant.joint_damping +
                   plant.limit_torque(plant.state.theta);
  return M.inverse() * rhs;
}

// Semi-implicit Euler step of the finger state; motor-space angles are
// updated through the transmission to stay consistent.
inline void integrate_finger(FingerPlant& plant, Vec2 theta_ddot, double dt) {
  plant.state.theta_dot += theta_ddot * dt;
  plant.state.theta += plant.state.theta_dot * dt;
  plant.state.q = joint_to_motor(plant.state.theta, plant.transmission);
  plant.state.q_dot = joint_to_motor(plant.state.theta_dot, plant.transmission);
}

}  // namespace qdd
