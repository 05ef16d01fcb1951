// Experiment orchestration: scheme x K x limit-scale x realization sweep over
// the under/overgenerated case pair, plus the CSV emitters.
//
// Determinism contract: (config, master_seed) fixes every output byte. The
// scenario seed of realization r is master_seed + r; the under/over pair of
// one realization shares its PV placement and the per-case no-control solve
// supplies the loss normalization for every scheme.
#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "feedersim/metrics.hpp"
#include "feedersim/solver.hpp"

namespace feedersim {

struct SweepConfig {
  FeederConfig feeder;
  ScenarioParams scenario;
  SolverOptions solver;
  std::vector<Scheme> schemes = {Scheme::NoControl, Scheme::SigmoidV, Scheme::LocalFlowK,
                                 Scheme::HybridKV};
  std::vector<double> k_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> limit_scales = {1.0, 0.5};
  double penetration = 0.5;
  double delta = 0.04;
  int realizations = 20;
  std::uint64_t master_seed = 1;
  bool mean_load_mode = false;
  std::string out_dir = "out";

  void validate() const {
    if (realizations < 1) throw std::invalid_argument("SweepConfig: realizations must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("SweepConfig: no schemes selected");
    if (k_grid.empty()) throw std::invalid_argument("SweepConfig: empty k grid");
    if (limit_scales.empty()) throw std::invalid_argument("SweepConfig: empty limit_scales");
    for (double k : k_grid)
      if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("SweepConfig: k outside [0,1]");
    for (double s : limit_scales)
      if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("SweepConfig: limit_scale outside (0,1]");
    if (!(penetration >= 0.0 && penetration <= 1.0))
      throw std::invalid_argument("SweepConfig: penetration outside [0,1]");
    if (!(delta > 0.0)) throw std::invalid_argument("SweepConfig: delta must be positive");
  }
};

// One sweep cell: a scheme with its parameters. NoControl ignores k and
// scale; SigmoidV ignores k.
struct SweepCell {
  Scheme scheme;
  double k = 0.0;
  double limit_scale = 1.0;
};

inline std::vector<SweepCell> expand_cells(const SweepConfig& config) {
  std::vector<SweepCell> cells;
  for (Scheme scheme : config.schemes) {
    const std::vector<double> scales =
        scheme == Scheme::NoControl ? std::vector<double>{1.0} : config.limit_scales;
    const std::vector<double> ks =
        scheme_uses_k(scheme) ? config.k_grid : std::vector<double>{0.0};
    for (double scale : scales)
      for (double k : ks) cells.push_back({scheme, k, scale});
  }
  return cells;
}

struct CaseRow {
  std::string scheme;
  double k = 0.0;
  double scale = 1.0;
  std::uint64_t seed = 0;
  CaseKind kind = CaseKind::Undergenerated;
  CaseMetrics metrics;
  int iterations = 0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<CaseRow> rows;
  std::vector<FrontierPoint> frontier;
  int failures = 0;
};

namespace detail {

struct SolvedCase {
  AcState state;
  bool ok = false;
  std::string error;
};

inline SolvedCase try_solve(const FeederModel& model, const Scenario& scenario,
                            const ControlConfig& control, const SolverOptions& options) {
  SolvedCase out;
  try {
    out.state = solve_ac(model, scenario, control, options);
    out.ok = true;
  } catch (const SolveError& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const FeederModel model = build_feeder(config.feeder);
  const std::vector<SweepCell> cells = expand_cells(config);

  struct RealizationData {
    std::uint64_t seed;
    Scenario under, over;
    detail::SolvedCase base_under, base_over;
  };

  std::vector<RealizationData> reals;
  reals.reserve(config.realizations);
  for (int r = 0; r < config.realizations; ++r) {
    RealizationData rd;
    rd.seed = config.master_seed + static_cast<std::uint64_t>(r);
    auto make = [&](CaseKind kind) {
      return config.mean_load_mode
                 ? mean_load_scenario(model, kind, config.penetration, rd.seed, config.scenario)
                 : sample_scenario(model, kind, config.penetration, rd.seed, config.scenario);
    };
    rd.under = make(CaseKind::Undergenerated);
    rd.over = make(CaseKind::Overgenerated);
    ControlConfig none;
    none.scheme = Scheme::NoControl;
    none.delta = config.delta;
    rd.base_under = detail::try_solve(model, rd.under, none, config.solver);
    rd.base_over = detail::try_solve(model, rd.over, none, config.solver);
    reals.push_back(std::move(rd));
  }

  SweepResult result;
  for (const SweepCell& cell : cells) {
    ControlConfig control;
    control.scheme = cell.scheme;
    control.k = cell.k;
    control.delta = config.delta;
    control.limit_scale = cell.limit_scale;

    std::vector<RealizationMetrics> cell_metrics;
    for (const RealizationData& rd : reals) {
      RealizationMetrics rm;
      bool both_ok = true;
      for (CaseKind kind : {CaseKind::Undergenerated, CaseKind::Overgenerated}) {
        const bool under = kind == CaseKind::Undergenerated;
        const Scenario& scenario = under ? rd.under : rd.over;
        const detail::SolvedCase& base = under ? rd.base_under : rd.base_over;

        CaseRow row;
        row.scheme = scheme_name(cell.scheme);
        row.k = cell.k;
        row.scale = cell.limit_scale;
        row.seed = rd.seed;
        row.kind = kind;

        if (!base.ok) {
          row.ok = false;
          row.error = "no-control baseline failed: " + base.error;
        } else if (cell.scheme == Scheme::NoControl) {
          row.metrics = case_metrics(base.state, base.state.loss_w);
          row.iterations = base.state.iterations;
        } else {
          const detail::SolvedCase solved = detail::try_solve(model, scenario, control,
                                                              config.solver);
          if (solved.ok) {
            row.metrics = case_metrics(solved.state, base.state.loss_w);
            row.iterations = solved.state.iterations;
          } else {
            row.ok = false;
            row.error = solved.error;
          }
        }

        if (!row.ok) {
          both_ok = false;
          ++result.failures;
        } else {
          (under ? rm.under : rm.over) = row.metrics;
        }
        result.rows.push_back(std::move(row));
      }
      if (both_ok) cell_metrics.push_back(rm);
    }
    if (!cell_metrics.empty())
      result.frontier.push_back(frontier_point(scheme_name(cell.scheme), cell.k, cell.limit_scale,
                                               cell_metrics));
  }
  return result;
}

namespace detail {

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

inline bool row_before(const CaseRow& a, const CaseRow& b) {
  return std::tie(a.scheme, a.k, a.scale, a.seed) < std::tie(b.scheme, b.k, b.scale, b.seed) ||
         (std::tie(a.scheme, a.k, a.scale, a.seed) == std::tie(b.scheme, b.k, b.scale, b.seed) &&
          std::string(case_name(a.kind)) < case_name(b.kind));
}

}  // namespace detail

// cases.csv: one row per (cell, realization, case). Failed solves carry nan
// metrics; the cause goes to the caller via SweepResult.
inline void emit_cases_csv(const SweepResult& result, const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("emit_cases_csv: empty result");
  std::vector<CaseRow> rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(), detail::row_before);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_cases_csv: cannot open " + path);
  out << "scheme,k,scale,seed,case,max_dev_above_pu,max_dev_below_pu,loss_w,loss_rel,iterations\n";
  const double nan = std::nan("");
  for (const CaseRow& r : rows) {
    const CaseMetrics& m = r.metrics;
    char seed_buf[32];
    std::snprintf(seed_buf, sizeof(seed_buf), "%" PRIu64, r.seed);
    out << r.scheme << ',' << detail::fmt_double(r.k) << ',' << detail::fmt_double(r.scale) << ','
        << seed_buf << ',' << case_name(r.kind) << ','
        << detail::fmt_double(r.ok ? m.max_dev_above : nan) << ','
        << detail::fmt_double(r.ok ? m.max_dev_below : nan) << ','
        << detail::fmt_double(r.ok ? m.loss_w : nan) << ','
        << detail::fmt_double(r.ok ? m.loss_rel : nan) << ',' << r.iterations << '\n';
  }
  if (!out) throw std::runtime_error("emit_cases_csv: write failed: " + path);
}

inline void emit_frontier_csv(const SweepResult& result, const std::string& path) {
  if (result.frontier.empty()) throw std::invalid_argument("emit_frontier_csv: empty frontier");
  std::vector<FrontierPoint> pts = result.frontier;
  std::stable_sort(pts.begin(), pts.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return std::tie(a.scheme, a.k, a.limit_scale) < std::tie(b.scheme, b.k, b.limit_scale);
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_frontier_csv: cannot open " + path);
  out << "scheme,k,scale,swing_pu,avg_rel_loss,n_realizations\n";
  for (const FrontierPoint& p : pts) {
    out << p.scheme << ',' << detail::fmt_double(p.k) << ',' << detail::fmt_double(p.limit_scale)
        << ',' << detail::fmt_double(p.swing_pu) << ',' << detail::fmt_double(p.avg_rel_loss)
        << ',' << p.n_realizations << '\n';
  }
  if (!out) throw std::runtime_error("emit_frontier_csv: write failed: " + path);
}

inline void emit_csv(const SweepResult& result, const std::string& cases_path,
                     const std::string& frontier_path) {
  emit_cases_csv(result, cases_path);
  emit_frontier_csv(result, frontier_path);
}

}  // namespace feedersim
