#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "passlens/normalize.hpp"
#include "passlens/rng.hpp"

namespace passlens {

enum class Archetype { circulatory = 0, destabilising = 1, line_breaking = 2, space_expanding = 3 };

inline const char* to_string(Archetype a) {
  switch (a) {
    case Archetype::circulatory: return "circulatory";
    case Archetype::destabilising: return "destabilising";
    case Archetype::line_breaking: return "line_breaking";
    case Archetype::space_expanding: return "space_expanding";
  }
  return "unknown";
}

inline const std::array<Archetype, 4>& all_archetypes() {
  static const std::array<Archetype, 4> a = {Archetype::circulatory, Archetype::destabilising,
                                             Archetype::line_breaking, Archetype::space_expanding};
  return a;
}

/// k-means model over (z_lbs, z_sgm, z_sdi) vectors. `labels` maps cluster
/// index to archetype once label_clusters has run (k == 4 only).
struct ArchetypeModel {
  int k = 4;
  std::uint64_t seed = 0;
  std::vector<std::array<double, 3>> centroids;
  std::vector<Archetype> labels;  // empty until labeled
  std::vector<int> assignments;   // training assignment, aligned with input order
  std::vector<double> inertia_history;
  double inertia = 0.0;
  int iterations = 0;
  NormStats stats;  // attached when labeling, kept for scoring

  bool labeled() const { return !labels.empty(); }

  std::string cluster_name(int cluster) const {
    if (labeled()) return to_string(labels[static_cast<std::size_t>(cluster)]);
    return "cluster_" + std::to_string(cluster);
  }
};

inline double squared_dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// Nearest centroid; ties resolve to the lowest cluster index.
inline int assign(const std::array<double, 3>& z, const ArchetypeModel& model) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    const double d = squared_dist3(z, model.centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace detail {

inline std::vector<std::array<double, 3>> kmeanspp_init(
    const std::vector<std::array<double, 3>>& points, int k, Rng& rng) {
  std::vector<std::array<double, 3>> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(points[rng.uniform_index(points.size())]);
  std::vector<double> d2(points.size(), 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = squared_dist3(points[i], centers[0]);
      for (std::size_t j = 1; j < centers.size(); ++j) {
        best = std::min(best, squared_dist3(points[i], centers[j]));
      }
      d2[i] = best;
      total += best;
    }
    if (total == 0.0) {
      centers.push_back(points[rng.uniform_index(points.size())]);
      continue;
    }
    const double r = rng.uniform() * total;
    double acc = 0.0;
    std::size_t picked = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc += d2[i];
      if (acc > r) {
        picked = i;
        break;
      }
    }
    centers.push_back(points[picked]);
  }
  return centers;
}

}  // namespace detail

/// Lloyd iterations with k-means++ seeding. Deterministic for a given seed:
/// assignment ties go to the lowest cluster index and empty clusters are
/// re-seeded onto the points currently farthest from their own centroid.
/// inertia_history records the cost after each centroid update and is
/// non-increasing.
inline ArchetypeModel fit_kmeans(const std::vector<std::array<double, 3>>& points, int k,
                                 std::uint64_t seed, int max_iter = 300, double tol = 1e-6) {
  if (k < 1) throw std::invalid_argument("fit_kmeans: k must be >= 1");
  if (points.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("fit_kmeans: fewer points than clusters");

  ArchetypeModel model;
  model.k = k;
  model.seed = seed;
  Rng rng(seed);
  std::vector<std::array<double, 3>> centers = detail::kmeanspp_init(points, k, rng);
  std::vector<int> assignment(points.size(), 0);
  std::vector<double> dist_to_own(points.size(), 0.0);

  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = squared_dist3(points[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = squared_dist3(points[i], centers[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      dist_to_own[i] = best_d;
    }

    std::vector<std::array<double, 3>> next(static_cast<std::size_t>(k), {0.0, 0.0, 0.0});
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& acc = next[static_cast<std::size_t>(assignment[i])];
      acc[0] += points[i][0];
      acc[1] += points[i][1];
      acc[2] += points[i][2];
      ++counts[static_cast<std::size_t>(assignment[i])];
    }

    std::vector<std::size_t> by_distance;
    for (int c = 0; c < k; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      if (counts[uc] > 0) {
        next[uc][0] /= static_cast<double>(counts[uc]);
        next[uc][1] /= static_cast<double>(counts[uc]);
        next[uc][2] /= static_cast<double>(counts[uc]);
        continue;
      }
      if (by_distance.empty()) {
        by_distance.resize(points.size());
        std::iota(by_distance.begin(), by_distance.end(), std::size_t{0});
        std::sort(by_distance.begin(), by_distance.end(), [&](std::size_t a, std::size_t b) {
          if (dist_to_own[a] != dist_to_own[b]) return dist_to_own[a] > dist_to_own[b];
          return a < b;
        });
      }
      // Re-seed onto the next farthest point; it gets captured on the
      // following assignment sweep.
      std::size_t take = 0;
      for (std::size_t r = 0; r < by_distance.size(); ++r) {
        take = by_distance[r];
        bool used = false;
        for (int c2 = 0; c2 < c; ++c2) {
          if (counts[static_cast<std::size_t>(c2)] == 0 &&
              next[static_cast<std::size_t>(c2)] == points[take]) {
            used = true;
            break;
          }
        }
        if (!used) break;
      }
      next[uc] = points[take];
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      inertia += squared_dist3(points[i], next[static_cast<std::size_t>(assignment[i])]);
    }
    model.inertia_history.push_back(inertia);
    model.iterations = iter + 1;

    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      shift = std::max(shift, squared_dist3(centers[static_cast<std::size_t>(c)],
                                            next[static_cast<std::size_t>(c)]));
    }
    centers = std::move(next);
    if (std::sqrt(shift) < tol) break;
  }

  model.centroids = std::move(centers);
  model.assignments = std::move(assignment);
  model.inertia = model.inertia_history.back();
  return model;
}

/// Best of `restarts` independent fits (sub-seeded from `seed`), judged by
/// final inertia; ties keep the earliest restart.
inline ArchetypeModel fit_kmeans_restarts(const std::vector<std::array<double, 3>>& points, int k,
                                          std::uint64_t seed, int restarts, int max_iter = 300,
                                          double tol = 1e-6) {
  if (restarts < 1) throw std::invalid_argument("fit_kmeans_restarts: restarts must be >= 1");
  ArchetypeModel best;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t sub = restarts == 1 ? seed : Rng::derive_seed(seed, static_cast<std::uint64_t>(r));
    ArchetypeModel m = fit_kmeans(points, k, sub, max_iter, tol);
    if (r == 0 || m.inertia < best.inertia) best = std::move(m);
  }
  best.seed = seed;
  return best;
}

/// Maps the four clusters onto the archetype taxonomy by centroid dominance:
/// highest z_lbs is line-breaking, then highest z_sgm is space-expanding,
/// then highest z_sdi is destabilising, and the remainder is circulatory.
inline ArchetypeModel label_clusters(ArchetypeModel model, const NormStats& stats) {
  if (model.k != 4 || model.centroids.size() != 4)
    throw std::invalid_argument("label_clusters: archetype taxonomy requires k == 4");
  std::vector<int> remaining = {0, 1, 2, 3};
  auto take_max = [&remaining, &model](int axis) {
    int best = remaining[0];
    for (int c : remaining) {
      if (model.centroids[static_cast<std::size_t>(c)][static_cast<std::size_t>(axis)] >
          model.centroids[static_cast<std::size_t>(best)][static_cast<std::size_t>(axis)]) {
        best = c;
      }
    }
    remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    return best;
  };
  model.labels.assign(4, Archetype::circulatory);
  model.labels[static_cast<std::size_t>(take_max(0))] = Archetype::line_breaking;
  model.labels[static_cast<std::size_t>(take_max(1))] = Archetype::space_expanding;
  model.labels[static_cast<std::size_t>(take_max(2))] = Archetype::destabilising;
  model.labels[static_cast<std::size_t>(remaining[0])] = Archetype::circulatory;
  model.stats = stats;
  return model;
}

}  // namespace passlens
