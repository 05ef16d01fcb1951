// Steady-state solvers for the radial feeder.
//
// solve_lindistflow: the linearized branch-flow recursion, exact for the
// linear model with no iteration. solve_ac: full AC power flow by
// Newton-Raphson in polar form; voltage-dependent inverter dispatch enters
// the reactive mismatch directly and its analytic dq/dv augments the
// Jacobian diagonal, so the control law converges inside Newton instead of
// around it.
#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "feedersim/banded.hpp"
#include "feedersim/control.hpp"
#include "feedersim/feeder.hpp"

namespace feedersim {

struct SolverOptions {
  double tolerance = 1e-8;  // max |mismatch| in pu
  int max_iter = 50;
  double damping = 0.5;     // Newton step factor applied after iteration 10
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double last_mismatch, int iterations)
      : std::runtime_error(what), last_mismatch(last_mismatch), iterations(iterations) {}
  double last_mismatch;
  int iterations;
};

// Symmetric tridiagonal bus matrix (radial line): diag per bus, off per
// segment. at(i, k) returns 0 outside the band.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;

  double at(int i, int k) const {
    if (i == k) return diag[i];
    const int lo = std::min(i, k);
    if (std::abs(i - k) == 1) return off[lo];
    return 0.0;
  }
  int size() const { return static_cast<int>(diag.size()); }
};

// Bus admittance matrix Y = G + jB from the series segment impedances; no
// shunt elements, so every row sums to zero.
inline std::pair<Tridiag, Tridiag> build_admittance(const FeederModel& model) {
  const int nb = model.n_buses();
  const double r = model.seg_r_pu();
  const double x = model.seg_x_pu();
  const double mag2 = r * r + x * x;
  if (!(mag2 > 0.0)) throw std::invalid_argument("build_admittance: zero-impedance segment");
  const double g_series = r / mag2;
  const double b_series = -x / mag2;

  Tridiag g, b;
  g.diag.assign(nb, 0.0);
  b.diag.assign(nb, 0.0);
  g.off.assign(nb - 1, -g_series);
  b.off.assign(nb - 1, -b_series);
  for (int j = 0; j + 1 < nb; ++j) {
    g.diag[j] += g_series;
    g.diag[j + 1] += g_series;
    b.diag[j] += b_series;
    b.diag[j + 1] += b_series;
  }
  return {std::move(g), std::move(b)};
}

struct BranchFlowState {
  std::vector<double> p_flow;  // pu, per segment, toward the feeder end
  std::vector<double> q_flow;  // pu, per segment
  std::vector<double> v;       // pu, per bus; v[0] = 1
  double loss_w = 0.0;         // r*(P^2+Q^2) summed over segments
};

// q_g_pu: dispatched reactive generation per load node (index i = bus i+1).
inline BranchFlowState solve_lindistflow(const FeederModel& model, const Scenario& scenario,
                                         std::span<const double> q_g_pu) {
  const int n = model.n_nodes;
  if (static_cast<int>(scenario.loads.size()) != n)
    throw std::invalid_argument("solve_lindistflow: scenario does not match model");
  if (static_cast<int>(q_g_pu.size()) != n)
    throw std::invalid_argument("solve_lindistflow: q_g length mismatch");

  BranchFlowState st;
  st.p_flow.assign(n, 0.0);
  st.q_flow.assign(n, 0.0);
  st.v.assign(n + 1, 1.0);

  // Backward accumulation from the leaf: segment j carries everything
  // extracted at buses j+1..n.
  double p = 0.0, q = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    const NodeLoad& nl = scenario.loads[j];
    p += model.watts_to_pu(nl.p_c_w - nl.p_g_w);
    q += model.watts_to_pu(nl.q_c_var) - q_g_pu[j];
    st.p_flow[j] = p;
    st.q_flow[j] = q;
  }

  const double r = model.seg_r_pu();
  const double x = model.seg_x_pu();
  double loss_pu = 0.0;
  for (int j = 0; j < n; ++j) {
    st.v[j + 1] = st.v[j] - (r * st.p_flow[j] + x * st.q_flow[j]);
    loss_pu += r * (st.p_flow[j] * st.p_flow[j] + st.q_flow[j] * st.q_flow[j]);
  }
  st.loss_w = model.pu_to_watts(loss_pu);
  return st;
}

struct AcState {
  std::vector<double> v_mag;  // pu, per bus; v_mag[0] = 1
  std::vector<double> v_ang;  // rad, per bus; v_ang[0] = 0
  Tridiag g_matrix;
  Tridiag b_matrix;
  std::vector<double> q_g;    // pu, per bus (0 at slack and non-PV buses)
  int iterations = 0;
  double max_mismatch = 0.0;
  double loss_w = 0.0;        // sum of r*|I|^2 over segments
};

namespace detail {

// Net calculated injections at bus i from the current voltage estimate.
inline void calc_injection(const Tridiag& g, const Tridiag& b, const std::vector<double>& v,
                           const std::vector<double>& th, int i, double& p_out, double& q_out) {
  const int nb = static_cast<int>(v.size());
  double p = 0.0, q = 0.0;
  for (int k = std::max(0, i - 1); k <= std::min(nb - 1, i + 1); ++k) {
    const double gij = g.at(i, k);
    const double bij = b.at(i, k);
    const double t = th[i] - th[k];
    const double c = std::cos(t);
    const double s = std::sin(t);
    p += v[k] * (gij * c + bij * s);
    q += v[k] * (gij * s - bij * c);
  }
  p_out = v[i] * p;
  q_out = v[i] * q;
}

inline double branch_loss_pu(const FeederModel& model, const std::vector<double>& v,
                             const std::vector<double>& th) {
  const double r = model.seg_r_pu();
  const double x = model.seg_x_pu();
  const std::complex<double> z(r, x);
  double loss = 0.0;
  for (int j = 0; j + 1 < static_cast<int>(v.size()); ++j) {
    const std::complex<double> va = std::polar(v[j], th[j]);
    const std::complex<double> vb = std::polar(v[j + 1], th[j + 1]);
    const std::complex<double> current = (va - vb) / z;
    loss += r * std::norm(current);
  }
  return loss;
}

// Shared Newton core. QEval/QDeriv give the reactive dispatch of load node i
// (bus i+1) and its d/dv at voltage v; fixed dispatch passes a zero
// derivative and the control schemes pass their analytic one.
template <typename QEval, typename QDeriv>
AcState newton_solve(const FeederModel& model, const Scenario& scenario, QEval q_eval,
                     QDeriv q_deriv, const SolverOptions& options) {
  const int n = model.n_nodes;
  const int nb = n + 1;
  if (static_cast<int>(scenario.loads.size()) != n)
    throw std::invalid_argument("solve_ac: scenario does not match model");

  AcState st;
  auto [g, b] = build_admittance(model);
  st.g_matrix = g;
  st.b_matrix = b;
  st.v_mag.assign(nb, 1.0);
  st.v_ang.assign(nb, 0.0);
  st.q_g.assign(nb, 0.0);

  // Fixed injection targets (pu); the reactive target gains q_g(v) per
  // iteration.
  std::vector<double> p_spec(nb, 0.0), q_load(nb, 0.0);
  for (int i = 0; i < n; ++i) {
    p_spec[i + 1] = model.watts_to_pu(scenario.loads[i].p_g_w - scenario.loads[i].p_c_w);
    q_load[i + 1] = model.watts_to_pu(scenario.loads[i].q_c_var);
  }

  const int m = 2 * n;  // unknowns: (theta_i, v_i) per non-slack bus
  BandedMatrix jac(m, 3, 3);
  std::vector<double> rhs(m, 0.0);

  // Once the tolerance is met, one extra polishing step runs so the
  // remaining residuals are far below it; aggregate identities such as the
  // slack power balance then hold to the same tolerance on long feeders.
  bool polished = false;
  for (int iter = 1;; ++iter) {
    for (int i = 1; i < nb; ++i) st.q_g[i] = q_eval(i - 1, st.v_mag[i]);

    double max_mis = 0.0;
    std::vector<double> p_calc(nb, 0.0), q_calc(nb, 0.0);
    for (int i = 1; i < nb; ++i) {
      calc_injection(g, b, st.v_mag, st.v_ang, i, p_calc[i], q_calc[i]);
      const double mp = p_spec[i] - p_calc[i];
      const double mq = (st.q_g[i] - q_load[i]) - q_calc[i];
      rhs[2 * (i - 1)] = mp;
      rhs[2 * (i - 1) + 1] = mq;
      max_mis = std::max(max_mis, std::max(std::abs(mp), std::abs(mq)));
    }
    st.iterations = iter;
    st.max_mismatch = max_mis;
    const bool converged = max_mis <= options.tolerance;
    if (converged && (polished || max_mis == 0.0)) {
      st.loss_w = model.pu_to_watts(branch_loss_pu(model, st.v_mag, st.v_ang));
      return st;
    }
    if (iter > options.max_iter) {
      if (converged) {
        st.loss_w = model.pu_to_watts(branch_loss_pu(model, st.v_mag, st.v_ang));
        return st;
      }
      break;
    }
    const bool polish_step = converged;
    if (converged) polished = true;

    jac.clear();
    for (int i = 1; i < nb; ++i) {
      const int rp = 2 * (i - 1);
      const int rq = rp + 1;
      const double vi = st.v_mag[i];

      // diagonal block d(P_i, Q_i)/d(theta_i, v_i)
      jac(rp, rp) = -q_calc[i] - b.at(i, i) * vi * vi;
      jac(rp, rq) = p_calc[i] / vi + g.at(i, i) * vi;
      jac(rq, rp) = p_calc[i] - g.at(i, i) * vi * vi;
      jac(rq, rq) = q_calc[i] / vi - b.at(i, i) * vi - q_deriv(i - 1, vi);

      for (int k = std::max(1, i - 1); k <= std::min(nb - 1, i + 1); ++k) {
        if (k == i) continue;
        const int cp = 2 * (k - 1);
        const int cq = cp + 1;
        const double gik = g.at(i, k);
        const double bik = b.at(i, k);
        const double t = st.v_ang[i] - st.v_ang[k];
        const double c = std::cos(t);
        const double s = std::sin(t);
        const double vk = st.v_mag[k];
        jac(rp, cp) = vi * vk * (gik * s - bik * c);
        jac(rp, cq) = vi * (gik * c + bik * s);
        jac(rq, cp) = -vi * vk * (gik * c + bik * s);
        jac(rq, cq) = vi * (gik * s - bik * c);
      }
    }

    if (!jac.factor())
      throw SolveError("solve_ac: singular Jacobian", max_mis, iter);
    jac.solve(rhs);

    const double step = iter > 10 && !polish_step ? options.damping : 1.0;
    for (int i = 1; i < nb; ++i) {
      st.v_ang[i] += step * rhs[2 * (i - 1)];
      st.v_mag[i] += step * rhs[2 * (i - 1) + 1];
    }
  }
  throw SolveError("solve_ac: no convergence after max_iter", st.max_mismatch, st.iterations);
}

}  // namespace detail

// AC power flow with the reactive dispatch q_g frozen per load node.
inline AcState solve_ac_fixed_q(const FeederModel& model, const Scenario& scenario,
                                std::span<const double> q_g_pu,
                                const SolverOptions& options = {}) {
  if (static_cast<int>(q_g_pu.size()) != model.n_nodes)
    throw std::invalid_argument("solve_ac_fixed_q: q_g length mismatch");
  return detail::newton_solve(
      model, scenario, [&](int i, double) { return q_g_pu[i]; },
      [](int, double) { return 0.0; }, options);
}

// AC power flow with q_g supplied by a control scheme evaluated at the local
// voltage. Converged states satisfy both the power-flow equations and the
// control law at the returned voltages.
inline AcState solve_ac(const FeederModel& model, const Scenario& scenario,
                        const ControlConfig& control, const SolverOptions& options = {}) {
  control.validate();
  const int n = model.n_nodes;
  std::vector<LocalMeasurements> ms(n);
  for (int i = 0; i < n; ++i)
    ms[i] = local_measurements(model, scenario.loads[i], 1.0, control.limit_scale);

  auto q_eval = [&](int i, double v) {
    ms[i].v = v;
    return eval_control(ms[i], control, model.alpha);
  };
  auto q_deriv = [&](int i, double v) {
    ms[i].v = v;
    return control_dq_dv(ms[i], control, model.alpha);
  };
  return detail::newton_solve(model, scenario, q_eval, q_deriv, options);
}

}  // namespace feedersim
