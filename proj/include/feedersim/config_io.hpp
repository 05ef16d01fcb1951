// JSON config file loading. Every key is optional; absent keys keep the
// built-in defaults, so a config file only has to name what it changes.
// The full schema with defaults is documented in the README and mirrored by
// configs/default.json.
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "feedersim/sweep.hpp"

namespace feedersim {

inline Scheme scheme_from_name(const std::string& name) {
  if (name == "no_control") return Scheme::NoControl;
  if (name == "sigmoid_v") return Scheme::SigmoidV;
  if (name == "local_flow") return Scheme::LocalFlowK;
  if (name == "hybrid") return Scheme::HybridKV;
  throw std::invalid_argument("unknown scheme: " + name +
                              " (expected no_control, sigmoid_v, local_flow or hybrid)");
}

namespace detail {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  if (j.contains("feeder")) {
    const auto& f = j.at("feeder");
    detail::get_if(f, "n_nodes", cfg.feeder.n_nodes);
    detail::get_if(f, "segment_length_km", cfg.feeder.segment_length_km);
    detail::get_if(f, "r_per_km_ohm", cfg.feeder.r_per_km_ohm);
    detail::get_if(f, "x_per_km_ohm", cfg.feeder.x_per_km_ohm);
    detail::get_if(f, "v0_volts", cfg.feeder.v0_volts);
    detail::get_if(f, "s_base_va", cfg.feeder.s_base_va);
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    detail::get_if(s, "pv_p_max_w", cfg.scenario.pv_p_max_w);
    detail::get_if(s, "pv_s_inv_va", cfg.scenario.pv_s_inv_va);
    detail::get_if(s, "under_p_max_w", cfg.scenario.under_p_max_w);
    detail::get_if(s, "over_p_max_w", cfg.scenario.over_p_max_w);
    detail::get_if(s, "q_frac_min", cfg.scenario.q_frac_min);
    detail::get_if(s, "q_frac_max", cfg.scenario.q_frac_max);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::get_if(s, "tolerance", cfg.solver.tolerance);
    detail::get_if(s, "max_iter", cfg.solver.max_iter);
    detail::get_if(s, "damping", cfg.solver.damping);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto& name : s.at("schemes"))
        cfg.schemes.push_back(scheme_from_name(name.get<std::string>()));
    }
    detail::get_if(s, "k_grid", cfg.k_grid);
    detail::get_if(s, "limit_scales", cfg.limit_scales);
    detail::get_if(s, "penetration", cfg.penetration);
    detail::get_if(s, "delta", cfg.delta);
    detail::get_if(s, "realizations", cfg.realizations);
    detail::get_if(s, "master_seed", cfg.master_seed);
    detail::get_if(s, "mean_load_mode", cfg.mean_load_mode);
    detail::get_if(s, "out_dir", cfg.out_dir);
  }
  cfg.validate();
  return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  try {
    return sweep_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config schema error in " + path + ": " + e.what());
  }
}

}  // namespace feedersim
