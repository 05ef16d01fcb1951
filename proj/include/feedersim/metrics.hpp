// Evaluation quantities: per-case voltage deviations and losses, the
// cross-case voltage swing, and per-cell frontier aggregates.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedersim/solver.hpp"

namespace feedersim {

struct CaseMetrics {
  double max_dev_above = 0.0;  // pu, max over nodes of max(V - 1, 0)
  double max_dev_below = 0.0;  // pu, max over nodes of max(1 - V, 0)
  double loss_w = 0.0;
  double loss_rel = 0.0;       // loss normalized by the same realization's no-control loss
};

// Deviations over all non-slack nodes; loss taken from the solved state.
inline CaseMetrics case_metrics(std::span<const double> v_mag, double loss_w, double base_loss_w) {
  if (!(base_loss_w > 0.0)) throw std::invalid_argument("case_metrics: base_loss must be > 0");
  CaseMetrics cm;
  for (std::size_t i = 1; i < v_mag.size(); ++i) {
    cm.max_dev_above = std::max(cm.max_dev_above, v_mag[i] - 1.0);
    cm.max_dev_below = std::max(cm.max_dev_below, 1.0 - v_mag[i]);
  }
  cm.max_dev_above = std::max(cm.max_dev_above, 0.0);
  cm.max_dev_below = std::max(cm.max_dev_below, 0.0);
  cm.loss_w = loss_w;
  cm.loss_rel = loss_w / base_loss_w;
  return cm;
}

inline CaseMetrics case_metrics(const AcState& st, double base_loss_w) {
  return case_metrics(st.v_mag, st.loss_w, base_loss_w);
}

inline CaseMetrics case_metrics(const BranchFlowState& st, double base_loss_w) {
  return case_metrics(st.v, st.loss_w, base_loss_w);
}

// Worst voltage excursion across the transition between the two cases: the
// overgenerated rise plus the undergenerated drop.
inline double swing(const CaseMetrics& under, const CaseMetrics& over) {
  return over.max_dev_above + under.max_dev_below;
}

// Both cases of one realization, solved with the same scheme and PV mask.
struct RealizationMetrics {
  CaseMetrics under;
  CaseMetrics over;
};

struct FrontierPoint {
  std::string scheme;
  double k = 0.0;
  double limit_scale = 1.0;
  double swing_pu = 0.0;
  double avg_rel_loss = 0.0;
  int n_realizations = 0;
};

inline FrontierPoint frontier_point(const std::string& scheme, double k, double limit_scale,
                                    std::span<const RealizationMetrics> rows) {
  if (rows.empty()) throw std::invalid_argument("frontier_point: no realizations");
  FrontierPoint fp;
  fp.scheme = scheme;
  fp.k = k;
  fp.limit_scale = limit_scale;
  fp.n_realizations = static_cast<int>(rows.size());
  double sw = 0.0, rl = 0.0;
  for (const RealizationMetrics& r : rows) {
    sw += swing(r.under, r.over);
    rl += 0.5 * (r.under.loss_rel + r.over.loss_rel);
  }
  fp.swing_pu = sw / fp.n_realizations;
  fp.avg_rel_loss = rl / fp.n_realizations;
  return fp;
}

}  // namespace feedersim
