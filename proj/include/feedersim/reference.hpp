// Alternative solution paths used to cross-check solve_ac.
//
// fixed_point_reference alternates standard PQ solves with control updates,
// avoiding the augmented Jacobian entirely. gauss_seidel_reference is a
// from-scratch complex sweep with no Jacobian at all. Both converge to the
// same self-consistent operating point as solve_ac wherever they converge.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "feedersim/solver.hpp"

namespace feedersim {

// Outer loop: freeze q_g, solve a standard PQ power flow, re-evaluate the
// control at the new voltages; done when the dispatch is stationary to
// options.tolerance. A relaxation factor is halved whenever the dispatch
// residual fails to shrink, so feeders where the plain substitution would
// oscillate still reach the fixed point; persistent growth is reported.
inline AcState fixed_point_reference(const FeederModel& model, const Scenario& scenario,
                                     const ControlConfig& control,
                                     const SolverOptions& options = {},
                                     int max_outer = 200) {
  control.validate();
  const int n = model.n_nodes;
  std::vector<LocalMeasurements> ms(n);
  for (int i = 0; i < n; ++i)
    ms[i] = local_measurements(model, scenario.loads[i], 1.0, control.limit_scale);

  auto dispatch_at = [&](const std::vector<double>& v_bus) {
    std::vector<double> q(n, 0.0);
    for (int i = 0; i < n; ++i) {
      ms[i].v = v_bus[i + 1];
      q[i] = eval_control(ms[i], control, model.alpha);
    }
    return q;
  };

  std::vector<double> q_g(n, 0.0);
  {
    std::vector<double> flat(n + 1, 1.0);
    q_g = dispatch_at(flat);
  }

  double relax = 1.0;
  double prev_residual = 0.0;
  AcState st;
  for (int outer = 1; outer <= max_outer; ++outer) {
    st = solve_ac_fixed_q(model, scenario, q_g, options);
    const std::vector<double> q_new = dispatch_at(st.v_mag);

    double residual = 0.0;
    for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(q_new[i] - q_g[i]));
    if (residual <= options.tolerance) {
      for (int i = 0; i < n; ++i) st.q_g[i + 1] = q_new[i];
      st.iterations = outer;
      return st;
    }
    if (outer > 1 && residual >= prev_residual) {
      relax *= 0.5;
      if (relax < 1.0 / 1024.0)
        throw SolveError("fixed_point_reference: dispatch oscillates", residual, outer);
    }
    prev_residual = residual;
    for (int i = 0; i < n; ++i) q_g[i] += relax * (q_new[i] - q_g[i]);
  }
  throw SolveError("fixed_point_reference: no convergence", prev_residual, max_outer);
}

struct GaussSeidelOptions {
  double v_tolerance = 1e-12;  // inner sweep: max |delta V|
  int max_sweeps = 500000;
  double q_tolerance = 1e-10;  // outer: max |delta q_g|
  int max_outer = 500;
};

// Complex Gauss-Seidel oracle. Intended for small feeders; convergence per
// sweep degrades with feeder length.
inline AcState gauss_seidel_reference(const FeederModel& model, const Scenario& scenario,
                                      const ControlConfig& control,
                                      const GaussSeidelOptions& gs = {}) {
  control.validate();
  const int n = model.n_nodes;
  const int nb = n + 1;
  auto [g, b] = build_admittance(model);

  std::vector<LocalMeasurements> ms(n);
  for (int i = 0; i < n; ++i)
    ms[i] = local_measurements(model, scenario.loads[i], 1.0, control.limit_scale);

  std::vector<std::complex<double>> y_diag(nb), y_off(nb - 1);
  for (int i = 0; i < nb; ++i) y_diag[i] = {g.diag[i], b.diag[i]};
  for (int j = 0; j + 1 < nb; ++j) y_off[j] = {g.off[j], b.off[j]};

  std::vector<std::complex<double>> v(nb, {1.0, 0.0});
  std::vector<double> p_inj(nb, 0.0), q_load(nb, 0.0), q_g(nb, 0.0);
  for (int i = 0; i < n; ++i) {
    p_inj[i + 1] = model.watts_to_pu(scenario.loads[i].p_g_w - scenario.loads[i].p_c_w);
    q_load[i + 1] = model.watts_to_pu(scenario.loads[i].q_c_var);
  }

  for (int outer = 1; outer <= gs.max_outer; ++outer) {
    for (int i = 0; i < n; ++i) {
      ms[i].v = std::abs(v[i + 1]);
      q_g[i + 1] = eval_control(ms[i], control, model.alpha);
    }

    bool settled = false;
    for (int sweep = 0; sweep < gs.max_sweeps; ++sweep) {
      double max_dv = 0.0;
      for (int i = 1; i < nb; ++i) {
        const std::complex<double> s_inj(p_inj[i], q_g[i] - q_load[i]);
        std::complex<double> sum = 0.0;
        if (i - 1 >= 0) sum += y_off[i - 1] * v[i - 1];
        if (i + 1 < nb) sum += y_off[i] * v[i + 1];
        const std::complex<double> v_new = (std::conj(s_inj / v[i]) - sum) / y_diag[i];
        max_dv = std::max(max_dv, std::abs(v_new - v[i]));
        v[i] = v_new;
      }
      if (max_dv <= gs.v_tolerance) {
        settled = true;
        break;
      }
    }
    if (!settled)
      throw SolveError("gauss_seidel_reference: sweeps exhausted", 0.0, gs.max_sweeps);

    double dq = 0.0;
    for (int i = 0; i < n; ++i) {
      ms[i].v = std::abs(v[i + 1]);
      dq = std::max(dq, std::abs(eval_control(ms[i], control, model.alpha) - q_g[i + 1]));
    }
    if (dq <= gs.q_tolerance) {
      AcState st;
      st.g_matrix = g;
      st.b_matrix = b;
      st.v_mag.resize(nb);
      st.v_ang.resize(nb);
      for (int i = 0; i < nb; ++i) {
        st.v_mag[i] = std::abs(v[i]);
        st.v_ang[i] = std::arg(v[i]);
      }
      st.q_g = q_g;
      st.iterations = outer;
      st.max_mismatch = dq;
      st.loss_w = model.pu_to_watts(detail::branch_loss_pu(model, st.v_mag, st.v_ang));
      return st;
    }
  }
  throw SolveError("gauss_seidel_reference: dispatch did not settle", 0.0, gs.max_outer);
}

}  // namespace feedersim
