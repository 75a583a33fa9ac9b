#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qdd/presets.hpp"
#include "qdd/run.hpp"
#include "qdd/scenario.hpp"

namespace qdd {

// --- Small numerics -----------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  size_t n = 0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  LineFit f;
  f.n = x.size();
  if (x.size() != y.size() || x.size() < 2) return f;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = static_cast<double>(x.size());
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-30) return f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

// Hand-frame reachable fingertip clouds for both fingers.
inline std::array<std::vector<Vec2>, 2> hand_workspace(
    const FingerGeometry& geom, const HandConfig& hand, int grid_n) {
  const std::vector<Vec2> local = sample_workspace(geom, grid_n);
  std::array<std::vector<Vec2>, 2> out;
  for (int f = 0; f < 2; ++f) {
    out[f].reserve(local.size());
    for (Vec2 p : local) out[f].push_back(hand.mount(f) + hand.to_hand(f, p));
  }
  return out;
}

// --- Motor bench (locked-rotor torque sweep) -----------------------------------

struct BenchRow {
  double setpoint_Nm = 0.0;
  double iq_A = 0.0;
  double tau_Nm = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double slope_Nm_A = 0.0;  // measured torque vs measured iq
  double kt_Nm_A = 0.0;
};

// Sweep torque setpoints on a single motor with the rotor locked; each point
// settles for `settle_s` and averages the last 20% of samples.
inline BenchResult run_motor_bench(const ScenarioConfig& c) {
  BenchResult out;
  out.kt_Nm_A = c.plant.motor.kt;
  const int n = static_cast<int>(c.success.get("n_setpoints", 10));
  const double tau_min = c.success.get("tau_min_Nm", 0.03);
  const double tau_max = c.success.get("tau_max_Nm", 0.3);
  if (n < 2) throw std::runtime_error("motor bench needs >= 2 setpoints");
  const double settle_s = c.duration;
  const int steps = static_cast<int>(std::ceil(settle_s / c.inner_dt));
  const int tail = std::max(1, steps / 5);

  for (int k = 0; k < n; ++k) {
    const double tau_ref = tau_min + (tau_max - tau_min) * k / (n - 1);
    FocMotor motor(c.plant.motor, EncoderModel{c.plant.encoder_cpr, 0.0});
    motor.set_mechanical(0.1, 0.0);  // arbitrary locked angle
    double sum_iq = 0.0, sum_tau = 0.0;
    int counted = 0;
    for (int i = 0; i < steps; ++i) {
      const double tau = motor.foc_step(tau_ref, c.inner_dt);
      if (i >= steps - tail) {
        sum_iq += motor.state().i_q;
        sum_tau += tau;
        ++counted;
      }
    }
    out.rows.push_back({tau_ref, sum_iq / counted, sum_tau / counted});
  }

  std::vector<double> iq, tau;
  for (const BenchRow& r : out.rows) {
    iq.push_back(r.iq_A);
    tau.push_back(r.tau_Nm);
  }
  out.slope_Nm_A = fit_line(iq, tau).slope;
  return out;
}

inline void write_bench_csv(const std::string& path,
                            const std::vector<BenchRow>& rows) {
  detail::CsvFile f(path);
  f.header("setpoint_Nm,iq_A,tau_Nm");
  for (const BenchRow& r : rows) {
    f.field(r.setpoint_Nm);
    f.field(r.iq_A);
    f.field(r.tau_Nm, true);
  }
}

// --- Grasp analysis (shared by the runner and the closure CLI) -----------------

struct GraspAnalysis {
  bool force_closure = false;
  bool form_closure = false;
  std::vector<double> lambda;  // form-closure certificate, if any
  size_t n_contacts = 0;
};

// n == 2: antipodal friction-cone test. n >= 3: positive span of the
// friction-cone edge wrenches (rank 3 plus an interior-point certificate).
inline bool force_closure_any(const ContactSet& contacts) {
  if (contacts.size() < 2) return false;
  if (contacts.size() == 2) {
    return force_closure_2contact(contacts[0], contacts[1]);
  }
  std::vector<std::vector<double>> W(3);
  for (const ContactPoint& c : contacts) {
    const auto [e1, e2] = friction_cone_edges(c);
    for (const Vec2& e : {e1, e2}) {
      W[0].push_back(e.x);
      W[1].push_back(e.y);
      W[2].push_back(cross(c.position, e));
    }
  }
  if (matrix_rank(W) < 3) return false;
  std::vector<double> b(3, 0.0);
  for (size_t i = 0; i < W[0].size(); ++i) {
    b[0] -= W[0][i];
    b[1] -= W[1][i];
    b[2] -= W[2][i];
  }
  return FeasibilityLP::solve(W, b).feasible;
}

inline GraspAnalysis analyze_grasp(const ContactSet& contacts) {
  GraspAnalysis a;
  a.n_contacts = contacts.size();
  a.force_closure = force_closure_any(contacts);
  const FormClosureResult fc = form_closure(contacts);
  a.form_closure = fc.closure;
  a.lambda = fc.lambda;
  return a;
}

inline json grasp_to_json(const ContactSet& contacts) {
  json j;
  json arr = json::array();
  for (const ContactPoint& c : contacts) {
    arr.push_back({{"position", cfg::to_json(c.position)},
                   {"normal", cfg::to_json(c.normal)},
                   {"mu", c.mu}});
  }
  j["contacts"] = arr;
  return j;
}

inline ContactSet grasp_from_json(const json& j) {
  cfg::check_keys(j, {"contacts"}, "grasp file");
  if (!j.contains("contacts") || !j["contacts"].is_array()) {
    throw std::runtime_error("grasp file: missing 'contacts' array");
  }
  ContactSet contacts;
  for (const json& cj : j["contacts"]) {
    cfg::check_keys(cj, {"position", "normal", "mu"}, "grasp contact");
    ContactPoint c;
    c.position = cfg::vec2_of(cj.at("position"), "contact.position");
    c.normal = cfg::vec2_of(cj.at("normal"), "contact.normal");
    const double n = c.normal.norm();
    if (n < 1e-12) throw std::runtime_error("grasp file: zero normal");
    c.normal = c.normal / n;
    c.mu = cj.value("mu", 0.5);
    if (c.mu < 0.0) throw std::runtime_error("grasp file: mu < 0");
    contacts.push_back(c);
  }
  return contacts;
}

// --- Success predicates ---------------------------------------------------------

struct Verdict {
  bool pass = true;
  std::string reason = "ok";
};

namespace detail {

// Contacts carrying force at the end of the run, in world frame.
inline ContactSet final_loaded_contacts(const SimWorld& w, double min_normal) {
  ContactSet out;
  for (const ResolvedContact& rc : w.resolved_contacts()) {
    if (dot(rc.force, rc.point.normal) >= min_normal) {
      out.push_back(rc.point);
    }
  }
  return out;
}

inline ContactSet final_tip_contacts(const SimWorld& w, double min_normal) {
  ContactSet out;
  for (const ContactPoint& c : final_loaded_contacts(w, min_normal)) {
    if (c.finger >= 0 && c.link == 3) out.push_back(c);
  }
  return out;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline Verdict evaluate_success(const ScenarioConfig& c, const RunResult& r,
                                const SimWorld& w,
                                std::map<std::string, double>& summary) {
  const SuccessSpec& s = c.success;
  auto fail = [](const std::string& why) { return Verdict{false, why}; };

  auto end_tip = [&](int f) {
    return r.contact.empty() ? 0.0 : r.contact.back().tip_normal[f];
  };
  auto require_end_grip = [&](double min_normal) -> Verdict {
    for (int f = 0; f < 2; ++f) {
      if (end_tip(f) < min_normal) {
        return fail("finger " + std::to_string(f) + " end normal force " +
                    detail::fmt(end_tip(f)) + " N < " +
                    detail::fmt(min_normal) + " N");
      }
    }
    return {};
  };

  if (s.kind == "none") return {};

  if (s.kind == "press_slope") {
    const double t_min = s.get("t_min_s", 0.0);
    const double t_max = s.get("t_max_s", c.duration);
    const double d_min = s.get("disp_min_m", 0.002);
    const double d_max = s.get("disp_max_m", 0.04);
    const bool press_y = s.get("axis", 0.0) > 0.5;
    std::vector<double> disp, force;
    for (size_t i = 0; i < r.contact.size(); ++i) {
      const ControllerRow& cr = r.controller[0][i];
      if (cr.t < t_min || cr.t > t_max) continue;
      const double d = press_y ? cr.yd - cr.y : cr.xd - cr.x;
      const double f = r.contact[i].tip_normal[0];
      if (d < d_min || d > d_max || f < 0.02) continue;
      disp.push_back(d);
      force.push_back(f);
    }
    if (disp.size() < 10) {
      return fail("press: only " + std::to_string(disp.size()) +
                  " loaded samples in the regression window");
    }
    const LineFit fit = fit_line(disp, force);
    const double k = s.get("k_N_m", 100.0);
    summary["press_slope_N_m"] = fit.slope;
    summary["press_slope_ratio"] = fit.slope / k;
    const double lo = s.get("slope_lo_frac", 0.95) * k;
    const double hi = s.get("slope_hi_frac", 1.05) * k;
    if (fit.slope < lo || fit.slope > hi) {
      return fail("press: slope " + detail::fmt(fit.slope) + " N/m outside [" +
                  detail::fmt(lo) + ", " + detail::fmt(hi) + "]");
    }
    const double min_force = s.get("min_force_N", 8.2);
    double peak = 0.0;
    for (const ContactRow& row : r.contact) {
      peak = std::max({peak, row.tip_normal[0], row.tip_normal[1]});
    }
    summary["press_peak_force_N"] = peak;
    if (peak < min_force) {
      return fail("press: peak force " + detail::fmt(peak) + " N < " +
                  detail::fmt(min_force) + " N");
    }
    return {};
  }

  if (s.kind == "tracking") {
    const double lim = s.get("max_error_m", 0.01);
    for (int f = 0; f < 2; ++f) {
      const double e =
          summary.at("max_error_post_transient_m_f" + std::to_string(f));
      if (e > lim) {
        return fail("tracking: finger " + std::to_string(f) + " error " +
                    detail::fmt(e) + " m > " + detail::fmt(lim) + " m");
      }
    }
    return {};
  }

  if (s.kind == "force_closure") {
    if (Verdict v = require_end_grip(s.get("min_normal_N", 0.2)); !v.pass) {
      return v;
    }
    const ContactSet tips = detail::final_tip_contacts(w, 1e-3);
    if (tips.size() != 2) {
      return fail("force_closure: expected 2 loaded fingertip contacts, got " +
                  std::to_string(tips.size()));
    }
    if (!force_closure_2contact(tips[0], tips[1])) {
      return fail("force_closure: final grasp is not force closed");
    }
    summary["force_closure"] = 1.0;
    return {};
  }

  if (s.kind == "fragile") {
    const double f_max = s.get("f_max_N", 1.0);
    double peak = 0.0;
    for (const ContactRow& row : r.contact) {
      peak = std::max({peak, row.tip_normal[0], row.tip_normal[1]});
    }
    summary["peak_tip_normal_N"] = peak;
    if (peak > f_max) {
      return fail("fragile: peak normal force " + detail::fmt(peak) +
                  " N > limit " + detail::fmt(f_max) + " N");
    }
    return require_end_grip(s.get("min_normal_N", 0.1));
  }

  if (s.kind == "disturbance") {
    if (Verdict v = require_end_grip(s.get("min_normal_N", 0.2)); !v.pass) {
      return v;
    }
    const double lim = s.get("max_disp_m", 0.02);
    double max_disp = 0.0;
    if (!r.object.empty()) {
      const ObjectRow& o0 = r.object.front();
      for (const ObjectRow& o : r.object) {
        max_disp = std::max(max_disp, std::hypot(o.x - o0.x, o.y - o0.y));
      }
    }
    summary["max_object_disp_m"] = max_disp;
    if (max_disp > lim) {
      return fail("disturbance: object moved " + detail::fmt(max_disp) +
                  " m > " + detail::fmt(lim) + " m");
    }
    return {};
  }

  if (s.kind == "form_closure") {
    const ContactSet loaded =
        detail::final_loaded_contacts(w, s.get("min_normal_N", 0.05));
    summary["n_loaded_contacts"] = static_cast<double>(loaded.size());
    const FormClosureResult fc = form_closure(loaded);
    summary["form_closure"] = fc.closure ? 1.0 : 0.0;
    if (!fc.closure) {
      return fail("form_closure: " + std::to_string(loaded.size()) +
                  " loaded contacts do not form-close the object");
    }
    return {};
  }

  if (s.kind == "snatch") {
    for (int f = 0; f < 2; ++f) {
      const auto& gains = w.fingers[f].gains;
      if (!gains || gains->size() < 2 || !gains->fired(1)) {
        return fail("snatch: closing event never triggered on finger " +
                    std::to_string(f));
      }
      summary["trigger_time_s_f" + std::to_string(f)] = gains->fire_time(1);
    }
    return require_end_grip(s.get("min_normal_N", 0.2));
  }

  if (s.kind == "object_translated") {
    if (Verdict v = require_end_grip(s.get("min_normal_N", 0.2)); !v.pass) {
      return v;
    }
    double max_dy = 0.0;
    if (!r.object.empty()) {
      const double y0 = r.object.front().y;
      for (const ObjectRow& o : r.object) {
        max_dy = std::max(max_dy, std::abs(o.y - y0));
      }
    }
    summary["max_object_dy_m"] = max_dy;
    const double lim = s.get("min_dy_m", 0.005);
    if (max_dy < lim) {
      return fail("translate: peak object displacement " +
                  detail::fmt(max_dy) + " m < " + detail::fmt(lim) + " m");
    }
    return {};
  }

  if (s.kind == "object_rotated") {
    if (Verdict v = require_end_grip(s.get("min_normal_N", 0.2)); !v.pass) {
      return v;
    }
    double max_rot = 0.0;
    if (!r.object.empty()) {
      const double o0 = r.object.front().ori;
      for (const ObjectRow& o : r.object) {
        max_rot = std::max(max_rot, std::abs(o.ori - o0));
      }
    }
    summary["max_object_rot_rad"] = max_rot;
    const double lim = s.get("min_rot_rad", 0.1);
    if (max_rot < lim) {
      return fail("rotate: peak object rotation " + detail::fmt(max_rot) +
                  " rad < " + detail::fmt(lim) + " rad");
    }
    return {};
  }

  if (s.kind == "palm_push") {
    double max_palm = 0.0;
    for (const ContactRow& row : r.contact) {
      max_palm = std::max(max_palm, row.palm_normal);
    }
    summary["max_palm_normal_N"] = max_palm;
    const double lim = s.get("min_palm_N", 0.05);
    if (max_palm < lim) {
      return fail("palm_push: peak palm normal force " +
                  detail::fmt(max_palm) + " N < " + detail::fmt(lim) + " N");
    }
    // The press against the palm is made with the inside of the fingers, so
    // accept load on any finger link (not just the fingertip).
    const double min_normal = s.get("min_normal_N", 0.1);
    double end_fn[2] = {0.0, 0.0};
    for (const ResolvedContact& rc : w.resolved_contacts()) {
      if (rc.point.finger < 0) continue;
      end_fn[rc.point.finger] =
          std::max(end_fn[rc.point.finger], dot(rc.force, rc.point.normal));
    }
    for (int f = 0; f < 2; ++f) {
      summary["end_finger_normal_N_f" + std::to_string(f)] = end_fn[f];
      if (end_fn[f] < min_normal) {
        return fail("finger " + std::to_string(f) + " end normal force " +
                    detail::fmt(end_fn[f]) + " N < " +
                    detail::fmt(min_normal) + " N");
      }
    }
    return {};
  }

  if (s.kind == "pinched") {
    return require_end_grip(s.get("min_normal_N", 0.05));
  }

  if (s.kind == "slide_to_edge") {
    // The object must be carried a minimum distance, come to rest near the
    // table edge, and stay pinned there by the leading fingertip.  With a
    // frictionless table only the mN-scale gravity component loads the tip at
    // rest, so the normal-force floor is at coin-weight scale.
    if (r.object.empty()) return fail("slide: no object trace");
    const ObjectRow& o0 = r.object.front();
    const ObjectRow& oe = r.object.back();
    const double slid = std::hypot(oe.x - o0.x, oe.y - o0.y);
    summary["end_slide_m"] = slid;
    const double min_slide = s.get("min_slide_m", 0.01);
    if (slid < min_slide) {
      return fail("slide: object moved " + detail::fmt(slid) + " m < " +
                  detail::fmt(min_slide) + " m");
    }
    const double edge_err = std::hypot(oe.x - s.get("edge_x_m", 0.0),
                                       oe.y - s.get("edge_y_m", 0.0));
    summary["end_edge_err_m"] = edge_err;
    const double edge_tol = s.get("edge_tol_m", 0.003);
    if (edge_err > edge_tol) {
      return fail("slide: object rests " + detail::fmt(edge_err) +
                  " m from the edge (tol " + detail::fmt(edge_tol) + " m)");
    }
    const double end_speed = std::hypot(oe.vx, oe.vy);
    summary["end_object_speed_m_s"] = end_speed;
    const double max_speed = s.get("max_end_speed_m_s", 0.001);
    if (end_speed > max_speed) {
      return fail("slide: object still moving at " + detail::fmt(end_speed) +
                  " m/s");
    }
    const double min_tip = s.get("min_tip_normal_N", 0.003);
    summary["end_tip_normal_N_f0"] = end_tip(0);
    if (end_tip(0) < min_tip) {
      return fail("slide: fingertip 0 end normal force " +
                  detail::fmt(end_tip(0)) + " N < " + detail::fmt(min_tip) +
                  " N");
    }
    return {};
  }

  return fail("unknown success kind '" + s.kind + "'");
}

// --- Scenario runner -------------------------------------------------------------

struct ScenarioOutcome {
  bool ok = false;
  std::string reason;
  std::map<std::string, double> summary;
  std::string out_dir;
};

namespace detail {

inline void write_summary_json(const std::string& path,
                               const ScenarioOutcome& o,
                               const std::string& name) {
  json j;
  j["scenario"] = name;
  j["success"] = o.ok;
  j["reason"] = o.reason;
  json m;
  for (const auto& [k, v] : o.summary) m[k] = v;
  j["metrics"] = m;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace detail

// Runs a scenario and writes all artifacts into its output directory.
// Environment variable QDDSIM_OUT, when set, overrides config/CLI choices
// handled by the caller; here `out_dir_override` wins if non-empty.
inline ScenarioOutcome run_scenario(const ScenarioConfig& config,
                                    const std::string& out_dir_override = "") {
  ScenarioOutcome o;
  o.out_dir = out_dir_override.empty() ? config.out_dir : out_dir_override;
  std::filesystem::create_directories(o.out_dir);
  const auto path = [&](const std::string& f) { return o.out_dir + "/" + f; };

  {
    std::ofstream cfg_out(path("config_resolved.json"), std::ios::binary);
    cfg_out << scenario_to_json(config).dump(2) << "\n";
  }

  if (config.mode == "motor_bench") {
    const BenchResult bench = run_motor_bench(config);
    write_bench_csv(path("bench.csv"), bench.rows);
    o.summary["slope_Nm_A"] = bench.slope_Nm_A;
    o.summary["kt_Nm_A"] = bench.kt_Nm_A;
    o.summary["slope_ratio"] = bench.slope_Nm_A / bench.kt_Nm_A;
    const double tol = config.success.get("slope_tol_frac", 0.005);
    if (std::abs(o.summary["slope_ratio"] - 1.0) <= tol) {
      o.ok = true;
      o.reason = "ok";
    } else {
      o.reason = "torque/current slope " + detail::fmt(bench.slope_Nm_A) +
                 " deviates from kt " + detail::fmt(bench.kt_Nm_A) +
                 " by more than " + detail::fmt(tol * 100.0) + "%";
    }
    detail::write_summary_json(path("summary.json"), o, config.name);
    return o;
  }

  SimWorld world = build_world(config);
  RunResult result;
  try {
    result = run(world, config.duration, config.transient);
  } catch (const std::exception& e) {
    o.reason = std::string("simulation aborted: ") + e.what();
    detail::write_summary_json(path("summary.json"), o, config.name);
    return o;
  }
  o.summary = result.summary;

  const Verdict v = evaluate_success(config, result, world, o.summary);
  o.ok = v.pass;
  o.reason = v.reason;

  for (int f = 0; f < 2; ++f) {
    write_controller_csv(path("controller_" + std::to_string(f) + ".csv"),
                         result.controller[f]);
  }
  for (int m = 0; m < 4; ++m) {
    write_motor_csv(path("motor_" + std::to_string(m) + ".csv"),
                    result.motor[m]);
  }
  write_contact_csv(path("contacts.csv"), result.contact);
  if (!result.object.empty()) {
    write_object_csv(path("object.csv"), result.object);
  }
  if (config.object.present) {
    // Final loaded contacts in a form the closure analyzer accepts.
    const ContactSet final_set = detail::final_loaded_contacts(world, 1e-3);
    std::ofstream g(path("grasp_final.json"), std::ios::binary);
    g << grasp_to_json(final_set).dump(2) << "\n";
  }
  detail::write_summary_json(path("summary.json"), o, config.name);
  return o;
}

}  // namespace qdd
