#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "passlens/aggregate.hpp"
#include "passlens/cluster.hpp"
#include "passlens/config.hpp"
#include "passlens/csv.hpp"
#include "passlens/ingest.hpp"
#include "passlens/metrics.hpp"
#include "passlens/normalize.hpp"
#include "passlens/outcomes.hpp"
#include "passlens/store.hpp"

namespace passlens {

/// Deterministic chunked parallel loop; fn(i) must only touch slot i state.
/// The first exception thrown by any chunk is rethrown after all join.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::mutex mu;
  std::exception_ptr first_error;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn, &mu, &first_error] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string fnv1a64_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  }
  char hex[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[h & 0xF];
    h >>= 4;
  }
  hex[16] = '\0';
  return std::string("fnv1a64:") + hex;
}

// ---------------------------------------------------------------------------
// Ingest stage

struct MatchIngestStats {
  std::string match_id;
  std::size_t events = 0;
  std::size_t frames = 0;
  std::size_t candidates = 0;
  std::size_t passes = 0;
  std::map<std::string, std::size_t> drops;
  std::vector<RecordIssue> record_issues;
};

struct IngestReport {
  std::vector<MatchIngestStats> matches;
  std::vector<std::pair<std::string, std::string>> failures;  // directory, error

  std::size_t total_passes() const {
    std::size_t n = 0;
    for (const auto& m : matches) n += m.passes;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& m : matches) {
      nlohmann::json drops = nlohmann::json::object();
      for (const auto& [reason, count] : m.drops) drops[reason] = count;
      nlohmann::json issues = nlohmann::json::array();
      for (const auto& i : m.record_issues) {
        issues.push_back({{"file", i.file}, {"line", i.line}, {"error", i.what}});
      }
      jm.push_back({{"match_id", m.match_id},
                    {"events", m.events},
                    {"frames", m.frames},
                    {"pass_candidates", m.candidates},
                    {"passes_extracted", m.passes},
                    {"drops", std::move(drops)},
                    {"record_issues", std::move(issues)}});
    }
    nlohmann::json jf = nlohmann::json::array();
    for (const auto& [dir, err] : failures) jf.push_back({{"directory", dir}, {"error", err}});
    const double mean = matches.empty()
                            ? 0.0
                            : static_cast<double>(total_passes()) / static_cast<double>(matches.size());
    return nlohmann::json{{"matches", std::move(jm)},
                          {"failures", std::move(jf)},
                          {"total_matches", matches.size()},
                          {"total_passes", total_passes()},
                          {"mean_passes_per_match", mean}};
  }
};

/// A root is either one match directory (has meta.json) or a directory of
/// match directories; returned sorted by name.
inline std::vector<std::filesystem::path> find_match_dirs(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ParseError("not a directory: " + root.string());
  if (fs::exists(root / "meta.json")) return {root};
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw ParseError("no match directories (meta.json) under " + root.string());
  return dirs;
}

/// Parses and extracts every match under `root`. Per-match failures are
/// reported, not fatal; the store contains the matches that survived.
inline PassStore ingest_tree(const std::filesystem::path& root, const AnalysisConfig& cfg,
                             IngestReport& report) {
  const std::vector<std::filesystem::path> dirs = find_match_dirs(root);
  std::vector<std::optional<MatchBundle>> bundles(dirs.size());
  std::vector<std::optional<MatchIngestStats>> stats(dirs.size());
  std::vector<std::optional<std::string>> errors(dirs.size());

  ExtractOptions opt;
  opt.sync_tolerance_s = cfg.sync_tolerance_s;
  opt.oob_tolerance_m = cfg.oob_tolerance_m;
  opt.include_goal_kicks = cfg.include_goal_kicks;

  parallel_for(dirs.size(), cfg.jobs, [&](std::size_t i) {
    try {
      for (const char* name : {"meta.json", "events.jsonl", "tracking.jsonl"}) {
        if (!std::filesystem::exists(dirs[i] / name))
          throw ParseError("missing " + (dirs[i] / name).string());
      }
      MatchFiles mf = load_match_dir(dirs[i]);
      const std::vector<TrackingFrame> smoothed = smooth_tracking(mf.frames, cfg.smoothing_window);
      ExtractResult ex = extract_passes(mf.events, smoothed, mf.meta, opt);

      MatchIngestStats st;
      st.match_id = mf.meta.match_id;
      st.events = mf.events.size();
      st.frames = mf.frames.size();
      st.candidates = ex.candidates;
      st.passes = ex.passes.size();
      st.drops = std::move(ex.drops);
      st.record_issues = std::move(mf.record_issues);
      stats[i] = std::move(st);

      MatchBundle b;
      b.info = mf.meta.info();
      b.passes = std::move(ex.passes);
      b.events = to_outcome_events(mf.events);
      bundles[i] = std::move(b);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  PassStore store;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (errors[i]) {
      report.failures.emplace_back(dirs[i].string(), *errors[i]);
      continue;
    }
    report.matches.push_back(std::move(*stats[i]));
    store.matches.push_back(std::move(*bundles[i]));
  }
  store.sort();
  std::sort(report.matches.begin(), report.matches.end(),
            [](const MatchIngestStats& a, const MatchIngestStats& b) {
              return a.match_id < b.match_id;
            });
  return store;
}

// ---------------------------------------------------------------------------
// Analysis stage

struct AnalysisResult {
  std::vector<const PassEvent*> passes;  // flattened store order
  std::vector<StructuralFeatures> features;
  NormStats stats;
  ArchetypeModel model;
  std::vector<int> clusters;  // per pass
  std::vector<OutcomeRecord> outcomes;
  Projection projection;
  std::vector<TeamStylePoint> team_styles;  // empty unless model is labeled
  HeatmapGrid heat_origin{8, 12, 10};
  HeatmapGrid heat_destination{8, 12, 10};
  std::vector<PlayerProfile> players;  // unfiltered; reports apply min_passes
  std::vector<DuoRecord> duos;
  std::vector<QuantileRow> quantile_rows;  // empty when passes < quantiles
};

namespace detail {

inline std::vector<const PassEvent*> flatten(const PassStore& store) {
  std::vector<const PassEvent*> out;
  out.reserve(store.total_passes());
  for (const MatchBundle& m : store.matches) {
    for (const PassEvent& p : m.passes) out.push_back(&p);
  }
  return out;
}

inline std::vector<StructuralFeatures> raw_features(const std::vector<const PassEvent*>& passes,
                                                    const DensityParams& density, int jobs) {
  std::vector<StructuralFeatures> fs(passes.size());
  parallel_for(passes.size(), jobs, [&](std::size_t i) {
    fs[i] = compute_features(*passes[i], density);
  });
  return fs;
}

/// Everything downstream of features + clusters; shared by fit and score.
inline void finish_analysis(AnalysisResult& r, const PassStore& store, const AnalysisConfig& cfg) {
  r.clusters.resize(r.features.size());
  for (std::size_t i = 0; i < r.features.size(); ++i) {
    r.clusters[i] = assign(r.features[i].z(), r.model);
  }

  r.outcomes.clear();
  r.outcomes.reserve(r.features.size());
  for (const MatchBundle& m : store.matches) {
    std::vector<OutcomeRecord> recs = annotate_outcomes(m.info, m.passes, m.events, cfg.window_s);
    for (OutcomeRecord& rec : recs) r.outcomes.push_back(std::move(rec));
  }

  std::vector<std::array<double, 3>> zs(r.features.size());
  for (std::size_t i = 0; i < r.features.size(); ++i) zs[i] = r.features[i].z();
  r.projection = project_2d(zs);

  if (r.model.labeled()) {
    std::vector<std::string> team_ids(r.passes.size());
    std::vector<Archetype> archetypes(r.passes.size());
    for (std::size_t i = 0; i < r.passes.size(); ++i) {
      team_ids[i] = r.passes[i]->team_id;
      archetypes[i] = r.model.labels[static_cast<std::size_t>(r.clusters[i])];
    }
    r.team_styles = team_style_points(team_ids, archetypes, r.outcomes, cfg.min_passes);
  }

  r.heat_origin = HeatmapGrid(cfg.grid_nx, cfg.grid_ny, cfg.heatmap_min_count);
  r.heat_destination = HeatmapGrid(cfg.grid_nx, cfg.grid_ny, cfg.heatmap_min_count);
  std::vector<PassEvent> flat_passes;  // value copies for the group-bys
  flat_passes.reserve(r.passes.size());
  for (std::size_t i = 0; i < r.passes.size(); ++i) {
    const PassEvent& p = *r.passes[i];
    r.heat_origin.add(p.start, r.features[i].tiv, cfg.pitch);
    r.heat_destination.add(p.end, r.features[i].tiv, cfg.pitch);
    flat_passes.push_back(p);
  }
  r.players = player_profiles(flat_passes, r.features, r.clusters, r.model.k);
  r.duos = duo_delta_tiv(flat_passes, r.features, r.outcomes, cfg.min_duo_count);

  std::vector<double> tiv(r.features.size());
  for (std::size_t i = 0; i < r.features.size(); ++i) tiv[i] = r.features[i].tiv;
  if (tiv.size() >= static_cast<std::size_t>(cfg.quantiles)) {
    r.quantile_rows = outcome_rates_by_tiv_quantile(r.outcomes, tiv, cfg.quantiles);
  }
}

}  // namespace detail

/// Full fit: raw metrics, normalization, clustering, labeling, outcomes and
/// every aggregate. Deterministic for a given store + config.
inline AnalysisResult analyze(const PassStore& store, const AnalysisConfig& cfg) {
  cfg.validate();
  AnalysisResult r;
  r.passes = detail::flatten(store);
  if (r.passes.size() < 2 || r.passes.size() < static_cast<std::size_t>(cfg.k))
    throw ConfigError("analysis needs at least max(2, k) passes, got " +
                      std::to_string(r.passes.size()));
  r.features = detail::raw_features(r.passes, cfg.density, cfg.jobs);
  r.stats = fit_norm_stats(r.features);
  apply_normalization(r.features, r.stats, cfg.weights);

  std::vector<std::array<double, 3>> zs(r.features.size());
  for (std::size_t i = 0; i < r.features.size(); ++i) zs[i] = r.features[i].z();
  r.model = fit_kmeans_restarts(zs, cfg.k, cfg.seed, cfg.restarts, cfg.max_iter, cfg.cluster_tol);
  if (cfg.k == 4) r.model = label_clusters(std::move(r.model), r.stats);
  r.model.stats = r.stats;

  detail::finish_analysis(r, store, cfg);
  return r;
}

// ---------------------------------------------------------------------------
// Model serialization and frozen-model scoring

inline nlohmann::json model_to_json(const ArchetypeModel& model, const AnalysisConfig& cfg,
                                    const std::string& corpus_hash) {
  nlohmann::json centroids = nlohmann::json::array();
  for (const auto& c : model.centroids) centroids.push_back({c[0], c[1], c[2]});
  nlohmann::json j{{"format", "passlens-model/1"},
                   {"k", model.k},
                   {"seed", model.seed},
                   {"iterations", model.iterations},
                   {"inertia", model.inertia},
                   {"inertia_history", model.inertia_history},
                   {"centroids", std::move(centroids)},
                   {"norm_stats",
                    {{"mu_lbs", model.stats.mu_lbs},
                     {"mu_sgm", model.stats.mu_sgm},
                     {"mu_sdi", model.stats.mu_sdi},
                     {"sd_lbs", model.stats.sd_lbs},
                     {"sd_sgm", model.stats.sd_sgm},
                     {"sd_sdi", model.stats.sd_sdi},
                     {"n_fit", model.stats.n_fit}}},
                   {"sigma", cfg.density.sigma},
                   {"rho_floor", cfg.density.rho_floor},
                   {"weights", {cfg.weights.w_lbs, cfg.weights.w_sgm, cfg.weights.w_sdi}},
                   {"corpus_hash", corpus_hash}};
  if (model.labeled()) {
    nlohmann::json labels = nlohmann::json::array();
    for (Archetype a : model.labels) labels.push_back(to_string(a));
    j["labels"] = std::move(labels);
  }
  return j;
}

inline ArchetypeModel model_from_json(const nlohmann::json& j, AnalysisConfig& cfg_out) {
  ArchetypeModel m;
  try {
    m.k = j.at("k").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<int>();
    m.inertia = j.at("inertia").get<double>();
    m.inertia_history = j.at("inertia_history").get<std::vector<double>>();
    for (const auto& c : j.at("centroids")) {
      m.centroids.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
    }
    const auto& s = j.at("norm_stats");
    m.stats.mu_lbs = s.at("mu_lbs").get<double>();
    m.stats.mu_sgm = s.at("mu_sgm").get<double>();
    m.stats.mu_sdi = s.at("mu_sdi").get<double>();
    m.stats.sd_lbs = s.at("sd_lbs").get<double>();
    m.stats.sd_sgm = s.at("sd_sgm").get<double>();
    m.stats.sd_sdi = s.at("sd_sdi").get<double>();
    m.stats.n_fit = s.at("n_fit").get<std::size_t>();
    cfg_out.density.sigma = j.at("sigma").get<double>();
    cfg_out.density.rho_floor = j.at("rho_floor").get<double>();
    const auto& w = j.at("weights");
    cfg_out.weights = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()};
    cfg_out.seed = m.seed;
    cfg_out.k = m.k;
    if (j.contains("labels")) {
      for (const auto& name : j.at("labels")) {
        const std::string label = name.get<std::string>();
        for (Archetype a : all_archetypes()) {
          if (label == to_string(a)) m.labels.push_back(a);
        }
      }
      if (m.labels.size() != m.centroids.size())
        throw ConfigError("model: labels do not match centroids");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (static_cast<std::size_t>(m.k) != m.centroids.size())
    throw ConfigError("model: centroid count does not match k");
  return m;
}

/// Applies a frozen model to a corpus: same math as analyze but nothing is
/// refit. The request must not contradict the model's metric parameters.
inline AnalysisResult score(const PassStore& store, const nlohmann::json& model_json,
                            AnalysisConfig cfg, std::optional<double> requested_sigma = {}) {
  AnalysisResult r;
  r.model = model_from_json(model_json, cfg);
  if (requested_sigma && *requested_sigma != cfg.density.sigma)
    throw ConfigError("model was fitted with sigma=" + fmt_double(cfg.density.sigma) +
                      "; requested sigma=" + fmt_double(*requested_sigma) +
                      " would make metrics incomparable");
  cfg.validate();
  r.passes = detail::flatten(store);
  if (r.passes.empty()) throw ConfigError("score: empty pass store");
  r.features = detail::raw_features(r.passes, cfg.density, cfg.jobs);
  r.stats = r.model.stats;
  apply_normalization(r.features, r.stats, cfg.weights);
  detail::finish_analysis(r, store, cfg);
  return r;
}

// ---------------------------------------------------------------------------
// Report files

namespace detail {

inline std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace detail

/// Writes every report artifact for a finished analysis. `timestamp_utc` is
/// recorded only in manifest.json so the data files stay byte-reproducible.
inline std::vector<std::string> write_outputs(const AnalysisResult& r, const AnalysisConfig& cfg,
                                              const std::filesystem::path& out_dir,
                                              const std::string& corpus_hash,
                                              const std::string& input_name,
                                              const std::string& timestamp_utc,
                                              const std::string& command) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(r.passes.size());
    for (std::size_t i = 0; i < r.passes.size(); ++i) {
      const PassEvent& p = *r.passes[i];
      const StructuralFeatures& f = r.features[i];
      const OutcomeRecord& o = r.outcomes[i];
      rows.push_back({p.match_id, p.pass_id, p.team_id, p.passer_id, p.receiver_id,
                      std::to_string(p.period), fmt_double(p.t), fmt_double(p.start.x),
                      fmt_double(p.start.y), fmt_double(p.end.x), fmt_double(p.end.y),
                      std::to_string(p.snapshot.n()), detail::flag(p.degenerate()),
                      std::to_string(f.lbs), fmt_double(f.sgm), fmt_double(f.sdi),
                      fmt_double(f.z_lbs), fmt_double(f.z_sgm), fmt_double(f.z_sdi),
                      fmt_double(f.tiv), r.model.cluster_name(r.clusters[i]),
                      fmt_double(r.projection.coords[i][0]), fmt_double(r.projection.coords[i][1]),
                      detail::flag(o.final_third_entry), detail::flag(o.box_entry),
                      detail::flag(o.shot_in_window), detail::flag(o.goal_in_window)});
    }
    write_csv(out_dir / "features.csv",
              {"match_id", "pass_id", "team_id", "passer_id", "receiver_id", "period", "t",
               "start_x", "start_y", "end_x", "end_y", "n_defenders", "degenerate", "lbs", "sgm",
               "sdi", "z_lbs", "z_sgm", "z_sdi", "tiv", "archetype", "pc1", "pc2",
               "final_third_entry", "box_entry", "shot_in_window", "goal_in_window"},
              rows);
    written.push_back("features.csv");
  }

  const int k = r.model.k;
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int c : r.clusters) counts[static_cast<std::size_t>(c)] += 1;
  // Cluster rows are reported in a fixed order: archetype enum order when
  // labeled, cluster index otherwise.
  std::vector<int> cluster_order;
  for (int c = 0; c < k; ++c) cluster_order.push_back(c);
  if (r.model.labeled()) {
    std::sort(cluster_order.begin(), cluster_order.end(), [&r](int a, int b) {
      return static_cast<int>(r.model.labels[static_cast<std::size_t>(a)]) <
             static_cast<int>(r.model.labels[static_cast<std::size_t>(b)]);
    });
  }

  {
    std::vector<std::vector<std::string>> rows;
    const double total = static_cast<double>(r.passes.size());
    for (int c : cluster_order) {
      const double n = static_cast<double>(counts[static_cast<std::size_t>(c)]);
      rows.push_back({r.model.cluster_name(c), std::to_string(counts[static_cast<std::size_t>(c)]),
                      fmt_double(total == 0.0 ? 0.0 : 100.0 * n / total)});
    }
    write_csv(out_dir / "archetype_distribution.csv", {"archetype", "n", "percent"}, rows);
    written.push_back("archetype_distribution.csv");
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (int c : cluster_order) {
      double m_lbs = 0.0, m_sgm = 0.0, m_sdi = 0.0;
      const std::size_t n = counts[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < r.features.size(); ++i) {
        if (r.clusters[i] != c) continue;
        m_lbs += r.features[i].lbs;
        m_sgm += r.features[i].sgm;
        m_sdi += r.features[i].sdi;
      }
      if (n > 0) {
        m_lbs /= static_cast<double>(n);
        m_sgm /= static_cast<double>(n);
        m_sdi /= static_cast<double>(n);
      }
      rows.push_back({r.model.cluster_name(c), std::to_string(n), fmt_double(m_lbs),
                      fmt_double(m_sgm), fmt_double(m_sdi)});
    }
    write_csv(out_dir / "archetype_metrics.csv",
              {"archetype", "n", "mean_lbs", "mean_sgm", "mean_sdi"}, rows);
    written.push_back("archetype_metrics.csv");
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (int c : cluster_order) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < r.features.size(); ++i) {
        if (r.clusters[i] == c) vals.push_back(r.features[i].tiv);
      }
      double mean = 0.0, median = 0.0, sd = 0.0;
      if (!vals.empty()) {
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        for (double v : vals) sd += (v - mean) * (v - mean);
        sd = std::sqrt(sd / static_cast<double>(vals.size()));
        std::sort(vals.begin(), vals.end());
        const std::size_t mid = vals.size() / 2;
        median = vals.size() % 2 == 1 ? vals[mid] : (vals[mid - 1] + vals[mid]) / 2.0;
      }
      rows.push_back({r.model.cluster_name(c), std::to_string(vals.size()), fmt_double(mean),
                      fmt_double(median), fmt_double(sd)});
    }
    write_csv(out_dir / "tiv_by_type.csv", {"archetype", "n", "mean_tiv", "median_tiv", "sd_tiv"},
              rows);
    written.push_back("tiv_by_type.csv");
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (int c : cluster_order) {
      std::vector<const OutcomeRecord*> recs;
      for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
        if (r.clusters[i] == c) recs.push_back(&r.outcomes[i]);
      }
      const OutcomeRates rates = outcome_rates(recs);
      std::vector<std::string> row{r.model.cluster_name(c), std::to_string(rates.n)};
      if (rates.n == 0) {
        row.insert(row.end(), {"", "", "", ""});
      } else {
        row.insert(row.end(), {fmt_double(rates.p_final_third), fmt_double(rates.p_box),
                               fmt_double(rates.p_shot), fmt_double(rates.p_goal)});
      }
      rows.push_back(std::move(row));
    }
    write_csv(out_dir / "outcome_rates.csv",
              {"archetype", "n", "p_final_third", "p_box", "p_shot", "p_goal"}, rows);
    written.push_back("outcome_rates.csv");
  }

  if (!r.quantile_rows.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const QuantileRow& q : r.quantile_rows) {
      rows.push_back({std::to_string(q.bin), std::to_string(q.n), fmt_double(q.tiv_lo),
                      fmt_double(q.tiv_hi), fmt_double(q.rates.p_final_third),
                      fmt_double(q.rates.p_box), fmt_double(q.rates.p_shot),
                      fmt_double(q.rates.p_goal)});
    }
    write_csv(out_dir / "tiv_quantiles.csv",
              {"bin", "n", "tiv_lo", "tiv_hi", "p_final_third", "p_box", "p_shot", "p_goal"},
              rows);
    written.push_back("tiv_quantiles.csv");
  }

  if (r.model.labeled()) {
    std::vector<std::vector<std::string>> rows;
    for (const TeamStylePoint& t : r.team_styles) {
      if (!t.reliable) continue;
      rows.push_back({t.team_id, std::to_string(t.n_passes),
                      fmt_double(t.shares[0]), fmt_double(t.shares[1]), fmt_double(t.shares[2]),
                      fmt_double(t.shares[3]), fmt_double(t.x_style), fmt_double(t.y_style),
                      t.quadrant, fmt_double(t.p_shot), fmt_double(t.p_box)});
    }
    write_csv(out_dir / "team_styles.csv",
              {"team_id", "n_passes", "share_circulatory", "share_destabilising",
               "share_line_breaking", "share_space_expanding", "x_style", "y_style", "quadrant",
               "p_shot", "p_box"},
              rows);
    written.push_back("team_styles.csv");
  }

  for (const auto& [name, grid] : {std::pair<const char*, const HeatmapGrid*>{
                                       "heatmap_origin.csv", &r.heat_origin},
                                   {"heatmap_destination.csv", &r.heat_destination}}) {
    std::vector<std::vector<std::string>> rows;
    for (int iy = 0; iy < grid->ny; ++iy) {
      for (int ix = 0; ix < grid->nx; ++ix) {
        rows.push_back({std::to_string(iy), std::to_string(ix),
                        fmt_double(grid->mean_at(ix, iy)),
                        std::to_string(grid->count_at(ix, iy)),
                        detail::flag(grid->reliable_at(ix, iy))});
      }
    }
    write_csv(out_dir / name, {"row", "col", "mean_tiv", "count", "reliable"}, rows);
    written.push_back(name);
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (const PlayerProfile& p : r.players) {
      if (p.n_passes < cfg.min_passes) continue;
      std::vector<std::string> row{p.player_id, p.team_id, std::to_string(p.n_passes),
                                   fmt_double(p.mean_lbs), fmt_double(p.mean_sgm),
                                   fmt_double(p.mean_sdi), fmt_double(p.mean_tiv),
                                   fmt_double(p.cum_tiv)};
      for (int c : cluster_order) row.push_back(fmt_double(p.cluster_shares[static_cast<std::size_t>(c)]));
      rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"player_id", "team_id",  "n_passes", "mean_lbs",
                                    "mean_sgm",  "mean_sdi", "mean_tiv", "cum_tiv"};
    for (int c : cluster_order) header.push_back("share_" + r.model.cluster_name(c));
    write_csv(out_dir / "players.csv", header, rows);
    written.push_back("players.csv");
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (const DuoRecord& d : r.duos) {
      rows.push_back({d.passer_id, d.receiver_id, d.team_id, std::to_string(d.n),
                      fmt_double(d.mean_tiv), fmt_double(d.passer_mean_tiv),
                      fmt_double(d.delta_tiv), fmt_double(d.rates.p_final_third),
                      fmt_double(d.rates.p_box), fmt_double(d.rates.p_shot),
                      fmt_double(d.rates.p_goal)});
    }
    write_csv(out_dir / "duos.csv",
              {"passer_id", "receiver_id", "team_id", "n", "mean_tiv", "passer_mean_tiv",
               "delta_tiv", "p_final_third", "p_box", "p_shot", "p_goal"},
              rows);
    written.push_back("duos.csv");
  }

  {
    std::ofstream out(out_dir / "model.json", std::ios::binary);
    out << model_to_json(r.model, cfg, corpus_hash).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write model.json");
    written.push_back("model.json");
  }

  {
    nlohmann::json manifest{
        {"tool", "passlens"},
        {"command", command},
        {"created_utc", timestamp_utc},
        {"input", input_name},
        {"corpus_hash", corpus_hash},
        {"config", cfg.to_json()},
        {"n_passes", r.passes.size()},
        {"norm_stats",
         {{"mu_lbs", r.stats.mu_lbs},
          {"mu_sgm", r.stats.mu_sgm},
          {"mu_sdi", r.stats.mu_sdi},
          {"sd_lbs", r.stats.sd_lbs},
          {"sd_sgm", r.stats.sd_sgm},
          {"sd_sdi", r.stats.sd_sdi},
          {"n_fit", r.stats.n_fit}}},
        {"explained_variance_ratio",
         {r.projection.explained_variance_ratio[0], r.projection.explained_variance_ratio[1]}},
        {"outputs", written}};
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest.json");
    written.push_back("manifest.json");
  }

  return written;
}

}  // namespace passlens
