#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "passlens/metrics.hpp"
#include "passlens/types.hpp"

namespace passlens {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every tunable of the pipeline in one place. Defaults reproduce the
/// reference analysis; a JSON config file and CLI flags can override them,
/// with flags winning.
struct AnalysisConfig {
  Pitch pitch;
  DensityParams density;
  Weights weights;

  // ingest
  int smoothing_window = 7;
  double sync_tolerance_s = 0.5;
  double oob_tolerance_m = 2.0;
  bool include_goal_kicks = false;

  // clustering
  int k = 4;
  std::uint64_t seed = 42;
  int restarts = 1;
  int max_iter = 300;
  double cluster_tol = 1e-6;

  // outcomes + aggregation
  double window_s = 10.0;
  int quantiles = 5;
  int grid_nx = 8;
  int grid_ny = 12;
  std::size_t heatmap_min_count = 10;
  std::size_t min_passes = 30;
  std::size_t min_duo_count = 5;

  int jobs = 1;

  void validate() const {
    if (!pitch.valid()) throw ConfigError("config: invalid pitch dimensions");
    if (!density.valid()) throw ConfigError("config: sigma and rho_floor must be > 0");
    if (!weights.valid()) throw ConfigError("config: weights must be non-negative and sum to 1");
    if (smoothing_window < 1 || smoothing_window % 2 == 0)
      throw ConfigError("config: smoothing_window must be odd and >= 1");
    if (sync_tolerance_s < 0.0) throw ConfigError("config: sync_tolerance_s must be >= 0");
    if (oob_tolerance_m < 0.0) throw ConfigError("config: oob_tolerance_m must be >= 0");
    if (k < 1) throw ConfigError("config: k must be >= 1");
    if (restarts < 1) throw ConfigError("config: restarts must be >= 1");
    if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
    if (cluster_tol <= 0.0) throw ConfigError("config: cluster_tol must be > 0");
    if (window_s < 0.0) throw ConfigError("config: window must be >= 0");
    if (quantiles < 2) throw ConfigError("config: quantiles must be >= 2");
    if (grid_nx < 1 || grid_ny < 1) throw ConfigError("config: grid bins must be >= 1");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"pitch", {{"length", pitch.length}, {"width", pitch.width},
                   {"box_depth", pitch.box_depth}, {"box_width", pitch.box_width}}},
        {"sigma", density.sigma},
        {"rho_floor", density.rho_floor},
        {"weights", {weights.w_lbs, weights.w_sgm, weights.w_sdi}},
        {"smoothing_window", smoothing_window},
        {"sync_tolerance_s", sync_tolerance_s},
        {"oob_tolerance_m", oob_tolerance_m},
        {"include_goal_kicks", include_goal_kicks},
        {"k", k},
        {"seed", seed},
        {"restarts", restarts},
        {"max_iter", max_iter},
        {"cluster_tol", cluster_tol},
        {"window_s", window_s},
        {"quantiles", quantiles},
        {"grid_nx", grid_nx},
        {"grid_ny", grid_ny},
        {"heatmap_min_count", heatmap_min_count},
        {"min_passes", min_passes},
        {"min_duo_count", min_duo_count},
        {"jobs", jobs}};
  }

  static AnalysisConfig from_json(const nlohmann::json& j) {
    AnalysisConfig c;
    try {
      if (j.contains("pitch")) {
        const auto& p = j.at("pitch");
        if (p.contains("length")) c.pitch.length = p.at("length").get<double>();
        if (p.contains("width")) c.pitch.width = p.at("width").get<double>();
        if (p.contains("box_depth")) c.pitch.box_depth = p.at("box_depth").get<double>();
        if (p.contains("box_width")) c.pitch.box_width = p.at("box_width").get<double>();
      }
      if (j.contains("sigma")) c.density.sigma = j.at("sigma").get<double>();
      if (j.contains("rho_floor")) c.density.rho_floor = j.at("rho_floor").get<double>();
      if (j.contains("weights")) {
        const auto& w = j.at("weights");
        if (!w.is_array() || w.size() != 3) throw ConfigError("config: weights must be 3 numbers");
        c.weights = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()};
      }
      if (j.contains("smoothing_window")) c.smoothing_window = j.at("smoothing_window").get<int>();
      if (j.contains("sync_tolerance_s")) c.sync_tolerance_s = j.at("sync_tolerance_s").get<double>();
      if (j.contains("oob_tolerance_m")) c.oob_tolerance_m = j.at("oob_tolerance_m").get<double>();
      if (j.contains("include_goal_kicks")) c.include_goal_kicks = j.at("include_goal_kicks").get<bool>();
      if (j.contains("k")) c.k = j.at("k").get<int>();
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
      if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
      if (j.contains("cluster_tol")) c.cluster_tol = j.at("cluster_tol").get<double>();
      if (j.contains("window_s")) c.window_s = j.at("window_s").get<double>();
      if (j.contains("quantiles")) c.quantiles = j.at("quantiles").get<int>();
      if (j.contains("grid_nx")) c.grid_nx = j.at("grid_nx").get<int>();
      if (j.contains("grid_ny")) c.grid_ny = j.at("grid_ny").get<int>();
      if (j.contains("heatmap_min_count")) c.heatmap_min_count = j.at("heatmap_min_count").get<std::size_t>();
      if (j.contains("min_passes")) c.min_passes = j.at("min_passes").get<std::size_t>();
      if (j.contains("min_duo_count")) c.min_duo_count = j.at("min_duo_count").get<std::size_t>();
      if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
  }

  static AnalysisConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }
};

}  // namespace passlens
