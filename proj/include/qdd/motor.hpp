#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace qdd {

// --- Reference-frame transforms -------------------------------------------
//
// Unscaled Clarke pair: clarke(inverse_clarke(ab)) = 1.5*ab, so the plant
// synthesizes phase currents with a 2/3 factor (see dq_to_phase_currents)
// and the sense path recovers the dq currents exactly.

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

struct DQ {
  double d = 0.0;
  double q = 0.0;
};

struct PhaseTriple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline AlphaBeta clarke(const PhaseTriple& i) {
  return {i.a - 0.5 * i.b - 0.5 * i.c,
          (std::sqrt(3.0) / 2.0) * (i.b - i.c)};
}

inline DQ park(AlphaBeta v, double theta_e) {
  const double c = std::cos(theta_e), s = std::sin(theta_e);
  return {v.alpha * c + v.beta * s, v.beta * c - v.alpha * s};
}

inline AlphaBeta inverse_park(DQ v, double theta_e) {
  const double c = std::cos(theta_e), s = std::sin(theta_e);
  return {v.d * c - v.q * s, v.q * c + v.d * s};
}

inline PhaseTriple inverse_clarke(AlphaBeta v) {
  return {v.alpha,
          0.5 * (-v.alpha + std::sqrt(3.0) * v.beta),
          0.5 * (-v.alpha - std::sqrt(3.0) * v.beta)};
}

// Balanced phase currents whose Clarke+Park image equals the given dq pair.
inline PhaseTriple dq_to_phase_currents(DQ i_dq, double theta_e) {
  const PhaseTriple raw = inverse_clarke(inverse_park(i_dq, theta_e));
  return {raw.a * (2.0 / 3.0), raw.b * (2.0 / 3.0), raw.c * (2.0 / 3.0)};
}

// --- Encoder ----------------------------------------------------------------

struct EncoderModel {
  int cpr = 16384;
  double offset = 0.0;
};

inline double encoder_read(double true_angle, const EncoderModel& enc) {
  const double step = 2.0 * M_PI / enc.cpr;
  return std::floor((true_angle - enc.offset) / step) * step + enc.offset;
}

// --- PI current regulator ----------------------------------------------------

struct PIGains {
  double kp = 0.5;           // V/A
  double ki = 300.0;         // V/(A*s)
  double output_limit = 12.0 / std::sqrt(3.0);  // V
  double integrator_state = 0.0;                // V

  double step(double error, double dt) {
    integrator_state += ki * error * dt;
    if (integrator_state > output_limit) integrator_state = output_limit;
    if (integrator_state < -output_limit) integrator_state = -output_limit;
    double out = kp * error + integrator_state;
    if (out > output_limit) out = output_limit;
    if (out < -output_limit) out = -output_limit;
    return out;
  }
};

// --- Motor plant + FOC controller --------------------------------------------

struct MotorParams {
  double kt = 0.0265;             // N*m/A, 60/(2*pi*KV) for KV = 360
  double kv = 360.0;              // RPM/V
  int pole_pairs = 7;
  double resistance = 0.1;        // ohm, per phase
  double inductance = 30e-6;      // H
  double rotor_inertia = 2e-6;    // kg*m^2
  double viscous_friction = 1e-5; // N*m*s/rad
  double bus_voltage = 12.0;      // V
  double cogging_amplitude = 0.0; // N*m
  int cogging_harmonic = 12;
  // Inverter voltage distortion, modeled as a sinusoidal disturbance added
  // to both applied dq voltages. Off by default; the d-axis PI loop exists
  // to reject exactly this kind of disturbance.
  double ripple_voltage = 0.0;    // V, amplitude
  double ripple_hz = 50.0;        // Hz

  static MotorParams from_kv(double kv_rating) {
    MotorParams p;
    p.kv = kv_rating;
    p.kt = 60.0 / (2.0 * M_PI * kv_rating);
    return p;
  }
};

struct MotorState {
  double rotor_angle = 0.0;  // mechanical rad
  double rotor_speed = 0.0;  // mechanical rad/s
  double i_d = 0.0;          // A, true plant current
  double i_q = 0.0;          // A
  double u_d = 0.0;          // V, last applied dq voltages
  double u_q = 0.0;          // V
  PhaseTriple u_abc;         // V
  PhaseTriple i_abc;         // A
};

// One BLDC motor with its FOC torque controller. Stepped at the inner rate;
// the caller owns the mechanical state (the rotor is kinematically coupled
// to the finger through the transmission).
class FocMotor {
 public:
  FocMotor() = default;
  FocMotor(const MotorParams& params, const EncoderModel& enc)
      : params_(params), encoder_(enc) {
    const double vlim = params.bus_voltage / std::sqrt(3.0);
    gain_q_.output_limit = vlim;
    gain_d_.output_limit = vlim;
  }

  const MotorParams& params() const { return params_; }
  const MotorState& state() const { return state_; }
  MotorState& state() { return state_; }
  const EncoderModel& encoder() const { return encoder_; }
  PIGains& gain_q() { return gain_q_; }
  PIGains& gain_d() { return gain_d_; }
  // Forces U_d = 0 instead of running the direct-current loop.
  void ablate_d_loop(bool on) { d_loop_ablated_ = on; }

  void set_mechanical(double angle, double speed) {
    state_.rotor_angle = angle;
    state_.rotor_speed = speed;
  }

  // One inner-loop cycle: sense -> PI -> apply voltages -> integrate the
  // electrical plant. Returns the shaft torque produced over this step.
  double foc_step(double desired_torque, double dt) {
    if (!std::isfinite(desired_torque)) {
      throw std::invalid_argument("foc_step: non-finite desired torque");
    }
    const double theta_e_true = params_.pole_pairs * state_.rotor_angle;
    const double omega_e = params_.pole_pairs * state_.rotor_speed;

    // Phase currents as the current sensors would see them.
    state_.i_abc =
        dq_to_phase_currents({state_.i_d, state_.i_q}, theta_e_true);

    // Measurement path uses the quantized encoder angle.
    const double theta_e_meas =
        params_.pole_pairs * encoder_read(state_.rotor_angle, encoder_);
    const DQ meas = park(clarke(state_.i_abc), theta_e_meas);

    const double iq_ref = desired_torque / params_.kt;
    double uq = gain_q_.step(iq_ref - meas.q, dt);
    double ud = d_loop_ablated_ ? 0.0 : gain_d_.step(0.0 - meas.d, dt);

    // Voltage-vector clamp to the bus limit.
    const double vlim = params_.bus_voltage / std::sqrt(3.0);
    const double vmag = std::hypot(ud, uq);
    if (vmag > vlim) {
      const double scale = vlim / vmag;
      ud *= scale;
      uq *= scale;
    }
    state_.u_d = ud;
    state_.u_q = uq;
    // Commanded voltages are referenced to the measured rotor frame; rotate
    // them into the true frame before they reach the plant, so encoder
    // quantization shows up as a d-axis disturbance.
    const AlphaBeta u_ab = inverse_park({ud, uq}, theta_e_meas);
    state_.u_abc = inverse_clarke(u_ab);
    DQ u_true = park(u_ab, theta_e_true);
    if (params_.ripple_voltage > 0.0) {
      const double dist = params_.ripple_voltage *
                          std::sin(2.0 * M_PI * params_.ripple_hz * time_);
      u_true.d += dist;
      u_true.q += dist;
    }
    time_ += dt;

    // dq electrical plant (back EMF e_q = kt * w_mech, consistent with
    // tau = kt * i_q):
    //   u_d = R i_d + L di_d/dt - w_e L i_q
    //   u_q = R i_q + L di_q/dt + w_e L i_d + kt w_mech
    // Backward-Euler step of the linear current dynamics (stable for any dt).
    const double R = params_.resistance, L = params_.inductance;
    const double a = 1.0 + dt * R / L;
    const double b = dt * omega_e;  // coupling term coefficient
    const double rd = state_.i_d + (dt / L) * u_true.d;
    const double rq =
        state_.i_q + (dt / L) * (u_true.q - params_.kt * state_.rotor_speed);
    const double det = a * a + b * b;
    state_.i_d = (a * rd + b * rq) / det;
    state_.i_q = (a * rq - b * rd) / det;

    return shaft_torque();
  }

  double shaft_torque() const {
    return params_.kt * state_.i_q +
           params_.cogging_amplitude *
               std::sin(params_.cogging_harmonic * state_.rotor_angle);
  }

 private:
  MotorParams params_;
  EncoderModel encoder_;
  MotorState state_;
  PIGains gain_q_;
  PIGains gain_d_;
  double time_ = 0.0;  // s, drives the ripple phase
  bool d_loop_ablated_ = false;
};

}  // namespace qdd
