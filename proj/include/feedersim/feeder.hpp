// Radial feeder data model and randomized load/PV scenario generation.
//
// The circuit is a single line: buses 0..n_nodes, where bus 0 is the
// substation (slack) and segment j connects bus j to bus j+1. Load node i
// (0-based, i = 0..n_nodes-1) sits at bus i+1; the substation carries no
// load and no PV.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace feedersim {

struct FeederConfig {
  int n_nodes = 250;               // load nodes, excluding the substation
  double segment_length_km = 0.2;  // distance between neighboring nodes
  double r_per_km_ohm = 0.33;
  double x_per_km_ohm = 0.38;
  double v0_volts = 7200.0;        // nominal phase-to-neutral voltage
  double s_base_va = 100e3;        // per-unit power base
};

struct FeederModel {
  int n_nodes = 0;
  double segment_length_km = 0.0;
  double r_per_km_ohm = 0.0;
  double x_per_km_ohm = 0.0;
  double v0_volts = 0.0;
  double s_base_va = 0.0;
  double seg_r_ohm = 0.0;  // per-segment series resistance
  double seg_x_ohm = 0.0;  // per-segment series reactance
  double alpha = 0.0;      // r/x, identical for every segment

  int n_buses() const { return n_nodes + 1; }
  int n_segments() const { return n_nodes; }
  double z_base_ohm() const { return v0_volts * v0_volts / s_base_va; }
  double seg_r_pu() const { return seg_r_ohm / z_base_ohm(); }
  double seg_x_pu() const { return seg_x_ohm / z_base_ohm(); }
  double watts_to_pu(double w) const { return w / s_base_va; }
  double pu_to_watts(double pu) const { return pu * s_base_va; }
};

inline FeederModel build_feeder(const FeederConfig& config) {
  if (config.n_nodes < 1) throw std::invalid_argument("build_feeder: n_nodes must be >= 1");
  if (!(config.segment_length_km > 0.0))
    throw std::invalid_argument("build_feeder: segment length must be positive");
  if (!(config.r_per_km_ohm > 0.0) || !(config.x_per_km_ohm > 0.0))
    throw std::invalid_argument("build_feeder: line impedance must be positive");
  if (!(config.v0_volts > 0.0) || !(config.s_base_va > 0.0))
    throw std::invalid_argument("build_feeder: voltage and power base must be positive");

  FeederModel m;
  m.n_nodes = config.n_nodes;
  m.segment_length_km = config.segment_length_km;
  m.r_per_km_ohm = config.r_per_km_ohm;
  m.x_per_km_ohm = config.x_per_km_ohm;
  m.v0_volts = config.v0_volts;
  m.s_base_va = config.s_base_va;
  m.seg_r_ohm = config.r_per_km_ohm * config.segment_length_km;
  m.seg_x_ohm = config.x_per_km_ohm * config.segment_length_km;
  m.alpha = config.r_per_km_ohm / config.x_per_km_ohm;
  return m;
}

enum class CaseKind { Undergenerated, Overgenerated };

inline const char* case_name(CaseKind k) {
  return k == CaseKind::Undergenerated ? "under" : "over";
}

// One load node. All quantities in SI units; conversion to per-unit happens
// at the solver boundary.
struct NodeLoad {
  double p_c_w = 0.0;    // real consumption, >= 0
  double q_c_var = 0.0;  // reactive consumption, >= 0
  double p_g_w = 0.0;    // real PV output, >= 0 (0 at non-PV nodes)
  double s_inv_va = 0.0; // inverter apparent capability (0 at non-PV nodes)
};

struct Scenario {
  CaseKind case_kind = CaseKind::Undergenerated;
  std::vector<NodeLoad> loads;   // one per load node; loads[i] is bus i+1
  std::vector<bool> pv_mask;     // per load node
  std::uint64_t seed = 0;
};

// Distribution parameters for the two load/generation cases. Undergenerated:
// full cloud cover, heavy load; overgenerated: clear sky, light load.
struct ScenarioParams {
  double pv_p_max_w = 2000.0;   // PV output per enabled node, overgenerated case
  double pv_s_inv_va = 2200.0;  // inverter rating per enabled node
  double under_p_max_w = 2500.0;  // p_c ~ U[0, under_p_max_w]
  double over_p_max_w = 1000.0;   // p_c ~ U[0, over_p_max_w]
  double q_frac_min = 0.2;      // q_c ~ U[q_frac_min*p_c, q_frac_max*p_c]
  double q_frac_max = 0.3;
};

namespace detail {

// All draws go through std::mt19937_64 with the explicit [0,1) mapping below.
// The engine's output sequence is fixed by the standard and the mapping is
// fixed here, so scenarios are bit-identical across platforms.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_double(rng);
}

// Load draws are salted per case so that the under/over scenarios of one
// realization share the PV placement (mask stream seeded with the bare seed)
// but sample independent loads.
inline std::uint64_t case_salt(CaseKind kind) {
  return kind == CaseKind::Undergenerated ? 0x756e646572ULL : 0x6f766572ULL;
}

// round(penetration * n), half up
inline int pv_count(double penetration, int n_nodes) {
  return static_cast<int>(std::floor(penetration * n_nodes + 0.5));
}

// Partial Fisher-Yates over node indices; first n_pv entries become the mask.
inline std::vector<bool> draw_pv_mask(int n_nodes, double penetration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n_pv = pv_count(penetration, n_nodes);
  std::vector<int> idx(n_nodes);
  for (int i = 0; i < n_nodes; ++i) idx[i] = i;
  for (int i = 0; i < n_pv; ++i) {
    const std::uint64_t span = static_cast<std::uint64_t>(n_nodes - i);
    const int j = i + static_cast<int>(rng() % span);
    std::swap(idx[i], idx[j]);
  }
  std::vector<bool> mask(n_nodes, false);
  for (int i = 0; i < n_pv; ++i) mask[idx[i]] = true;
  return mask;
}

}  // namespace detail

inline Scenario sample_scenario(const FeederModel& model, CaseKind kind, double penetration,
                                std::uint64_t seed, const ScenarioParams& params = {}) {
  if (!(penetration >= 0.0 && penetration <= 1.0))
    throw std::invalid_argument("sample_scenario: penetration must lie in [0,1]");

  Scenario s;
  s.case_kind = kind;
  s.seed = seed;
  s.pv_mask = detail::draw_pv_mask(model.n_nodes, penetration, seed);
  s.loads.resize(model.n_nodes);

  std::mt19937_64 rng(seed ^ detail::case_salt(kind));
  const bool over = kind == CaseKind::Overgenerated;
  const double p_max = over ? params.over_p_max_w : params.under_p_max_w;
  for (int i = 0; i < model.n_nodes; ++i) {
    NodeLoad& nl = s.loads[i];
    nl.p_c_w = detail::uniform(rng, 0.0, p_max);
    nl.q_c_var = detail::uniform(rng, params.q_frac_min * nl.p_c_w, params.q_frac_max * nl.p_c_w);
    if (s.pv_mask[i]) {
      nl.p_g_w = over ? params.pv_p_max_w : 0.0;
      nl.s_inv_va = params.pv_s_inv_va;
    }
  }
  return s;
}

// Deterministic variant for regression against representative numbers: every
// p_c at the distribution mean, q_c at the midpoint ratio 0.25*p_c. PV
// placement is still drawn from the seed so both cases of a realization pair
// up exactly as in sample_scenario.
inline Scenario mean_load_scenario(const FeederModel& model, CaseKind kind, double penetration,
                                   std::uint64_t seed, const ScenarioParams& params = {}) {
  if (!(penetration >= 0.0 && penetration <= 1.0))
    throw std::invalid_argument("mean_load_scenario: penetration must lie in [0,1]");

  Scenario s;
  s.case_kind = kind;
  s.seed = seed;
  s.pv_mask = detail::draw_pv_mask(model.n_nodes, penetration, seed);
  s.loads.resize(model.n_nodes);

  const bool over = kind == CaseKind::Overgenerated;
  const double p_c = 0.5 * (over ? params.over_p_max_w : params.under_p_max_w);
  const double q_c = 0.5 * (params.q_frac_min + params.q_frac_max) * p_c;
  for (int i = 0; i < model.n_nodes; ++i) {
    NodeLoad& nl = s.loads[i];
    nl.p_c_w = p_c;
    nl.q_c_var = q_c;
    if (s.pv_mask[i]) {
      nl.p_g_w = over ? params.pv_p_max_w : 0.0;
      nl.s_inv_va = params.pv_s_inv_va;
    }
  }
  return s;
}

}  // namespace feedersim
