// Local reactive-power control laws for PV inverters, plus their analytic
// voltage derivatives for the Newton solver.
//
// Every law here is a pure function of node-local measurements in per-unit.
// Four schemes:
//   NoControl  - q_g = 0.
//   SigmoidV   - q_g = G(q_max, v, delta), a smooth droop on local voltage.
//   LocalFlowK - q_g = F(K), built only from local power flows (p_c, q_c,
//                p_g); voltage-independent, hence location-independent duty.
//   HybridKV   - q_g = H(K, v) = F + G evaluated with amplitude q_max - F,
//                so the flow law governs near v = 1 and the voltage droop
//                takes over for large excursions.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feedersim/feeder.hpp"

namespace feedersim {

enum class Scheme { NoControl, SigmoidV, LocalFlowK, HybridKV };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::NoControl: return "no_control";
    case Scheme::SigmoidV: return "sigmoid_v";
    case Scheme::LocalFlowK: return "local_flow";
    case Scheme::HybridKV: return "hybrid";
  }
  return "?";
}

inline bool scheme_uses_k(Scheme s) {
  return s == Scheme::LocalFlowK || s == Scheme::HybridKV;
}

struct ControlConfig {
  Scheme scheme = Scheme::NoControl;
  double k = 1.0;            // loss-reduction vs voltage-regulation trade-off
  double delta = 0.04;       // sigmoid width
  double limit_scale = 1.0;  // scales q_max, e.g. 0.5 halves every limit

  void validate() const {
    if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("ControlConfig: k must lie in [0,1]");
    if (!(delta > 0.0)) throw std::invalid_argument("ControlConfig: delta must be positive");
    if (!(limit_scale > 0.0 && limit_scale <= 1.0))
      throw std::invalid_argument("ControlConfig: limit_scale must lie in (0,1]");
  }
};

// Node-local inputs to a control law, all per-unit. q_max is the effective
// reactive limit after limit_scale has been applied.
struct LocalMeasurements {
  double p_c = 0.0;
  double q_c = 0.0;
  double p_g = 0.0;
  double v = 1.0;
  double q_max = 0.0;
};

// Instantaneous reactive capability of an inverter with apparent rating
// s_inv running at real output p_g, scaled by limit_scale.
inline double q_max(double s_inv, double p_g, double limit_scale) {
  if (p_g < 0.0 || s_inv < 0.0) throw std::invalid_argument("q_max: negative input");
  if (p_g > s_inv) throw std::invalid_argument("q_max: inverter overcommitted (p_g > s_inv)");
  if (s_inv == 0.0) return 0.0;
  return limit_scale * std::sqrt(s_inv * s_inv - p_g * p_g);
}

// Saturate a requested dispatch to the capability band [-q_max, q_max].
inline double constr(double q, double q_max) {
  if (q_max < 0.0) throw std::invalid_argument("constr: q_max must be >= 0");
  if (std::abs(q) <= q_max) return q;
  return std::copysign(q_max, q);
}

namespace detail {

// The droop factor 1 - 2/(1 + exp(-4(v-1)/delta)) equals tanh(-2(v-1)/delta);
// the tanh form stays finite for any v.
inline double sigmoid_drive(double v, double delta) {
  return std::tanh(-2.0 * (v - 1.0) / delta);
}

inline double sigmoid_drive_dv(double v, double delta) {
  const double c = std::cosh(2.0 * (v - 1.0) / delta);
  return -2.0 / (delta * c * c);
}

}  // namespace detail

// Voltage droop G: zero at v = 1, saturating to +q_max (-q_max) for low
// (high) voltage over a width of about delta.
inline double control_g(const LocalMeasurements& m, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("control_g: delta must be positive");
  return m.q_max * detail::sigmoid_drive(m.v, delta);
}

// Final stage of the flow law: blend the loss-reduction and
// voltage-regulation components and saturate.
inline double blend_and_clamp(double k, double f_loss, double f_volt, double q_max) {
  return constr(k * f_loss + (1.0 - k) * f_volt, q_max);
}

// Flow law F(K). K = 1 supplies the local reactive consumption (loss
// reduction); K = 0 cancels the local contribution r*p + x*q to the voltage
// drop (voltage regulation). Independent of m.v.
inline double control_f(const LocalMeasurements& m, double k, double alpha) {
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("control_f: k must lie in [0,1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("control_f: alpha must be positive");
  const double f_loss = constr(m.q_c, m.q_max);
  const double f_volt = constr(m.q_c + (m.p_c - m.p_g) / alpha, m.q_max);
  return blend_and_clamp(k, f_loss, f_volt, m.q_max);
}

// Hybrid law H(K, v) = F + G with the droop amplitude reduced to q_max - F,
// so H == F at v = 1 and H -> +q_max as v falls well below 1. The raw sum
// can reach 2F - q_max for v >> 1, which undershoots -q_max; the outer
// saturation restores the hard capability limit.
inline double control_h(const LocalMeasurements& m, double k, double alpha, double delta) {
  const double f = control_f(m, k, alpha);
  const double amplitude = m.q_max - f;
  const double raw = f + amplitude * detail::sigmoid_drive(m.v, delta);
  return constr(raw, m.q_max);
}

inline double eval_control(const LocalMeasurements& m, const ControlConfig& c, double alpha) {
  switch (c.scheme) {
    case Scheme::NoControl: return 0.0;
    case Scheme::SigmoidV: return control_g(m, c.delta);
    case Scheme::LocalFlowK: return control_f(m, c.k, alpha);
    case Scheme::HybridKV: return control_h(m, c.k, alpha, c.delta);
  }
  return 0.0;
}

// Analytic d(q_g)/dv of the active scheme at m.v. Zero for NoControl and
// LocalFlowK (no voltage dependence) and in saturated regions, where the
// subgradient 0 keeps the Jacobian finite.
inline double control_dq_dv(const LocalMeasurements& m, const ControlConfig& c, double alpha) {
  switch (c.scheme) {
    case Scheme::NoControl:
    case Scheme::LocalFlowK:
      return 0.0;
    case Scheme::SigmoidV:
      return m.q_max * detail::sigmoid_drive_dv(m.v, c.delta);
    case Scheme::HybridKV: {
      const double f = control_f(m, c.k, alpha);
      const double amplitude = m.q_max - f;
      const double raw = f + amplitude * detail::sigmoid_drive(m.v, c.delta);
      if (std::abs(raw) >= m.q_max) return 0.0;
      return amplitude * detail::sigmoid_drive_dv(m.v, c.delta);
    }
  }
  return 0.0;
}

// Per-unit measurement bundle for one load node at voltage v.
inline LocalMeasurements local_measurements(const FeederModel& model, const NodeLoad& load,
                                            double v, double limit_scale) {
  LocalMeasurements m;
  m.p_c = model.watts_to_pu(load.p_c_w);
  m.q_c = model.watts_to_pu(load.q_c_var);
  m.p_g = model.watts_to_pu(load.p_g_w);
  m.v = v;
  m.q_max = q_max(model.watts_to_pu(load.s_inv_va), m.p_g, limit_scale);
  return m;
}

}  // namespace feedersim
