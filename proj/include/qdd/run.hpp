#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdd/world.hpp"

namespace qdd {

struct ControllerRow {
  double t, x, y, xd, yd, theta1, theta2, tau1, tau2;
  int override_active;
};

struct MotorRow {
  double t, theta, omega, iq, id, uq, ud, tau;
};

struct ContactRow {
  double t;
  std::array<double, 2> tip_normal;   // max fingertip normal force per finger
  double palm_normal;
  int n_contacts;
  std::array<double, 2> fcmd_x, fcmd_y;  // capped spring force per finger
};

struct ObjectRow {
  double t, x, y, ori, vx, vy, omega;
};

struct RunResult {
  std::array<std::vector<ControllerRow>, 2> controller;
  std::array<std::vector<MotorRow>, 4> motor;
  std::vector<ContactRow> contact;
  std::vector<ObjectRow> object;
  std::map<std::string, double> summary;
};

namespace detail {

inline void record(const SimWorld& w, RunResult& out) {
  for (int f = 0; f < 2; ++f) {
    const FingerUnit& u = w.fingers[f];
    const Vec2 tip = forward_kinematics(u.plant.state.theta, u.plant.geometry);
    out.controller[f].push_back({w.time, tip.x, tip.y, u.desired_pos.x,
                                 u.desired_pos.y, u.plant.state.theta.x,
                                 u.plant.state.theta.y, u.last_outer.tau_theta.x,
                                 u.last_outer.tau_theta.y,
                                 u.last_outer.override_active ? 1 : 0});
    for (int m = 0; m < 2; ++m) {
      const MotorState& s = u.motors[m].state();
      out.motor[2 * f + m].push_back({w.time, s.rotor_angle, s.rotor_speed,
                                      s.i_q, s.i_d, s.u_q, s.u_d,
                                      u.motors[m].shaft_torque()});
    }
  }
  ContactRow cr{};
  cr.t = w.time;
  cr.n_contacts = static_cast<int>(w.resolved_contacts().size());
  for (const ResolvedContact& rc : w.resolved_contacts()) {
    const double fn = dot(rc.force, rc.point.normal);
    if (rc.point.finger >= 0 && rc.point.link == 3) {
      auto& slot = cr.tip_normal[rc.point.finger];
      if (fn > slot) slot = fn;
    } else if (rc.point.finger < 0 && rc.point.link == 0 &&
               fn > cr.palm_normal) {
      cr.palm_normal = fn;
    }
  }
  for (int f = 0; f < 2; ++f) {
    cr.fcmd_x[f] = w.fingers[f].commanded_force.x;
    cr.fcmd_y[f] = w.fingers[f].commanded_force.y;
  }
  out.contact.push_back(cr);
  if (w.object) {
    out.object.push_back({w.time, w.object->position.x, w.object->position.y,
                          w.object->orientation, w.object->velocity.x,
                          w.object->velocity.y, w.object->angular_velocity});
  }
}

}  // namespace detail

// Run the world for `duration` seconds, sampling all recorders at the outer
// rate. Summary metrics are recomputable from the returned tables.
inline RunResult run(SimWorld& world, double duration,
                     double transient_time = 0.0) {
  if (duration <= 0.0) throw std::invalid_argument("run: duration <= 0");
  RunResult out;
  world.initialize();
  detail::record(world, out);

  const int64_t steps =
      static_cast<int64_t>(std::ceil(duration / world.schedule.inner_dt));
  for (int64_t i = 0; i < steps; ++i) {
    try {
      world.step();
    } catch (const std::exception& e) {
      throw std::runtime_error("run failed at step " + std::to_string(i) +
                               ": " + e.what());
    }
    if (world.step_count % world.schedule.ratio == 0) {
      detail::record(world, out);
    }
  }

  // Summary metrics.
  double max_iq = 0.0;
  for (const auto& mt : out.motor) {
    for (const MotorRow& r : mt) max_iq = std::max(max_iq, std::abs(r.iq));
  }
  out.summary["max_iq_A"] = max_iq;

  for (int f = 0; f < 2; ++f) {
    double sum2 = 0.0, max_err = 0.0, max_err_post = 0.0;
    for (const ControllerRow& r : out.controller[f]) {
      const double ex = r.x - r.xd, ey = r.y - r.yd;
      const double e = std::hypot(ex, ey);
      sum2 += e * e;
      max_err = std::max(max_err, e);
      if (r.t >= transient_time) max_err_post = std::max(max_err_post, e);
    }
    const std::string k = "_f" + std::to_string(f);
    out.summary["rms_error_m" + k] =
        std::sqrt(sum2 / out.controller[f].size());
    out.summary["max_error_m" + k] = max_err;
    out.summary["max_error_post_transient_m" + k] = max_err_post;

    double max_tip = 0.0, end_tip = 0.0, max_cmd = 0.0;
    for (const ContactRow& r : out.contact) {
      max_tip = std::max(max_tip, r.tip_normal[f]);
      end_tip = r.tip_normal[f];
      max_cmd = std::max({max_cmd, std::abs(r.fcmd_x[f]),
                          std::abs(r.fcmd_y[f])});
    }
    out.summary["max_tip_normal_N" + k] = max_tip;
    out.summary["end_tip_normal_N" + k] = end_tip;
    out.summary["max_commanded_force_N" + k] = max_cmd;
  }
  return out;
}

// --- CSV emission (LF line endings, '.' decimal, ',' separator) -------------

namespace detail {

class CsvFile {
 public:
  explicit CsvFile(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
    if (!f_) throw std::runtime_error("cannot open " + path);
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void header(const std::string& h) { std::fprintf(f_, "%s\n", h.c_str()); }
  void field(double v, bool last = false) {
    std::fprintf(f_, "%.17g%c", v, last ? '\n' : ',');
  }
  void field(int v, bool last = false) {
    std::fprintf(f_, "%d%c", v, last ? '\n' : ',');
  }

 private:
  std::FILE* f_;
};

}  // namespace detail

inline void write_controller_csv(const std::string& path,
                                 const std::vector<ControllerRow>& rows) {
  detail::CsvFile f(path);
  f.header("t_s,x_m,y_m,xd_m,yd_m,theta1_rad,theta2_rad,tau1_Nm,tau2_Nm,"
           "override_active");
  for (const ControllerRow& r : rows) {
    f.field(r.t); f.field(r.x); f.field(r.y); f.field(r.xd); f.field(r.yd);
    f.field(r.theta1); f.field(r.theta2); f.field(r.tau1); f.field(r.tau2);
    f.field(r.override_active, true);
  }
}

inline void write_motor_csv(const std::string& path,
                            const std::vector<MotorRow>& rows) {
  detail::CsvFile f(path);
  f.header("t_s,theta_rad,omega_rad_s,iq_A,id_A,uq_V,ud_V,tau_Nm");
  for (const MotorRow& r : rows) {
    f.field(r.t); f.field(r.theta); f.field(r.omega); f.field(r.iq);
    f.field(r.id); f.field(r.uq); f.field(r.ud); f.field(r.tau, true);
  }
}

inline void write_contact_csv(const std::string& path,
                              const std::vector<ContactRow>& rows) {
  detail::CsvFile f(path);
  f.header("t_s,tip_fn0_N,tip_fn1_N,palm_fn_N,n_contacts,"
           "fcmd_x0_N,fcmd_y0_N,fcmd_x1_N,fcmd_y1_N");
  for (const ContactRow& r : rows) {
    f.field(r.t); f.field(r.tip_normal[0]); f.field(r.tip_normal[1]);
    f.field(r.palm_normal); f.field(r.n_contacts);
    f.field(r.fcmd_x[0]); f.field(r.fcmd_y[0]);
    f.field(r.fcmd_x[1]); f.field(r.fcmd_y[1], true);
  }
}

inline void write_object_csv(const std::string& path,
                             const std::vector<ObjectRow>& rows) {
  detail::CsvFile f(path);
  f.header("t_s,x_m,y_m,ori_rad,vx_m_s,vy_m_s,omega_rad_s");
  for (const ObjectRow& r : rows) {
    f.field(r.t); f.field(r.x); f.field(r.y); f.field(r.ori);
    f.field(r.vx); f.field(r.vy); f.field(r.omega, true);
  }
}

// Both fingers' reachable fingertip sets in the hand frame, tagged by finger.
inline void write_workspace_csv(const std::string& path,
                                const std::array<std::vector<Vec2>, 2>& clouds) {
  detail::CsvFile f(path);
  f.header("finger,x_m,y_m");
  for (int finger = 0; finger < 2; ++finger) {
    for (const Vec2& p : clouds[finger]) {
      f.field(finger);
      f.field(p.x);
      f.field(p.y, true);
    }
  }
}

}  // namespace qdd
