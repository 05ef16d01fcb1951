// Solver cross-validation: on small feeders, solve_ac must agree with the
// fixed-point reference and the Gauss-Seidel oracle for every scheme. Used
// by the `validate` CLI subcommand and the acceptance suite.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "feedersim/reference.hpp"
#include "feedersim/solver.hpp"

namespace feedersim {

struct ValidationCheck {
  std::string name;
  double max_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // non-empty if a solve threw
};

namespace detail {

inline double max_vmag_diff(const AcState& a, const AcState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.v_mag.size(); ++i)
    d = std::max(d, std::abs(a.v_mag[i] - b.v_mag[i]));
  return d;
}

// Small feeder with the production per-km constants and stiff loading so the
// controls are genuinely exercised: PV at every other node starting from the
// far end, loads alternating around the case mean.
inline FeederModel small_feeder(int n_load_nodes) {
  FeederConfig fc;
  fc.n_nodes = n_load_nodes;
  fc.segment_length_km = 2.0;  // longer segments: visible voltage excursions
  return build_feeder(fc);
}

inline Scenario small_scenario(const FeederModel& model, CaseKind kind) {
  Scenario s;
  s.case_kind = kind;
  s.seed = 0;
  const int n = model.n_nodes;
  s.pv_mask.assign(n, false);
  s.loads.resize(n);
  const bool over = kind == CaseKind::Overgenerated;
  for (int i = 0; i < n; ++i) {
    const bool pv = ((n - 1 - i) % 2) == 0;
    s.pv_mask[i] = pv;
    NodeLoad& nl = s.loads[i];
    nl.p_c_w = (over ? 500.0 : 1250.0) * (i % 2 == 0 ? 1.6 : 0.4) * 20.0;
    nl.q_c_var = 0.25 * nl.p_c_w;
    if (pv) {
      nl.p_g_w = over ? 2000.0 * 20.0 : 0.0;
      nl.s_inv_va = 2200.0 * 20.0;
    }
  }
  return s;
}

}  // namespace detail

// Cross-checks every scheme (K in k_values for the flow-based ones) on the
// given feeder sizes against both references.
inline std::vector<ValidationCheck> run_solver_validation(
    double tolerance = 1e-6, const std::vector<int>& bus_counts = {2, 3, 10},
    const std::vector<double>& k_values = {0.0, 0.5, 1.0}) {
  std::vector<ValidationCheck> checks;

  std::vector<ControlConfig> controls;
  {
    ControlConfig c;
    c.scheme = Scheme::NoControl;
    controls.push_back(c);
    c.scheme = Scheme::SigmoidV;
    controls.push_back(c);
    for (Scheme s : {Scheme::LocalFlowK, Scheme::HybridKV})
      for (double k : k_values) {
        c.scheme = s;
        c.k = k;
        controls.push_back(c);
      }
  }

  for (int buses : bus_counts) {
    const FeederModel model = detail::small_feeder(buses - 1);
    for (CaseKind kind : {CaseKind::Undergenerated, CaseKind::Overgenerated}) {
      const Scenario scenario = detail::small_scenario(model, kind);
      for (const ControlConfig& control : controls) {
        char label[128];
        std::snprintf(label, sizeof(label), "%d-bus %s %s k=%.1f", buses, case_name(kind),
                      scheme_name(control.scheme), control.k);
        ValidationCheck chk;
        chk.name = label;
        chk.tolerance = tolerance;
        try {
          const AcState newton = solve_ac(model, scenario, control);
          const AcState fixed = fixed_point_reference(model, scenario, control);
          const AcState gs = gauss_seidel_reference(model, scenario, control);
          chk.max_err = std::max(detail::max_vmag_diff(newton, fixed),
                                 detail::max_vmag_diff(newton, gs));
          chk.pass = chk.max_err <= tolerance;
        } catch (const std::exception& e) {
          chk.error = e.what();
          chk.pass = false;
        }
        checks.push_back(chk);
      }
    }
  }
  return checks;
}

}  // namespace feedersim
