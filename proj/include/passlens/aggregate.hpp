#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "passlens/cluster.hpp"
#include "passlens/geometry.hpp"
#include "passlens/outcomes.hpp"
#include "passlens/types.hpp"

namespace passlens {

struct TeamStylePoint {
  std::string team_id;
  std::size_t n_passes = 0;
  std::array<double, 4> shares{0.0, 0.0, 0.0, 0.0};  // archetype enum order
  double x_style = 0.0;  // circulation vs direct progression
  double y_style = 0.0;  // destabilisation vs space expansion
  std::string quadrant;
  double p_shot = 0.0;
  double p_box = 0.0;
  bool reliable = false;
};

inline std::string style_quadrant(double x, double y) {
  if (x >= 0.0 && y >= 0.0) return "circulatory destabilisation";
  if (x >= 0.0) return "space expansion";
  if (y >= 0.0) return "destabilising progression";
  return "direct progression";
}

/// One style point per team from its archetype shares and outcome rates.
/// Teams are emitted in id order; points under `min_passes` are flagged
/// unreliable so reports can suppress them.
inline std::vector<TeamStylePoint> team_style_points(const std::vector<std::string>& team_ids,
                                                     const std::vector<Archetype>& archetypes,
                                                     const std::vector<OutcomeRecord>& records,
                                                     std::size_t min_passes = 30) {
  if (team_ids.size() != archetypes.size() || team_ids.size() != records.size())
    throw std::invalid_argument("team_style_points: size mismatch");
  std::map<std::string, TeamStylePoint> by_team;
  for (std::size_t i = 0; i < team_ids.size(); ++i) {
    TeamStylePoint& t = by_team[team_ids[i]];
    t.team_id = team_ids[i];
    t.n_passes += 1;
    t.shares[static_cast<std::size_t>(archetypes[i])] += 1.0;
    t.p_shot += records[i].shot_in_window ? 1.0 : 0.0;
    t.p_box += records[i].box_entry ? 1.0 : 0.0;
  }
  std::vector<TeamStylePoint> out;
  out.reserve(by_team.size());
  for (auto& [id, t] : by_team) {
    const double n = static_cast<double>(t.n_passes);
    for (double& s : t.shares) s /= n;
    t.p_shot /= n;
    t.p_box /= n;
    const double circ = t.shares[static_cast<std::size_t>(Archetype::circulatory)];
    const double dest = t.shares[static_cast<std::size_t>(Archetype::destabilising)];
    const double lb = t.shares[static_cast<std::size_t>(Archetype::line_breaking)];
    const double se = t.shares[static_cast<std::size_t>(Archetype::space_expanding)];
    t.x_style = circ - lb - se;
    t.y_style = dest - se;
    t.quadrant = style_quadrant(t.x_style, t.y_style);
    t.reliable = t.n_passes >= min_passes;
    out.push_back(std::move(t));
  }
  return out;
}

/// Mean impact value per pitch cell. Cells are indexed (ix, iy) with ix
/// binning the width axis and iy the attacking axis; boundary coordinates
/// fall into the higher cell and the far pitch edges into the last one.
struct HeatmapGrid {
  int nx = 8;
  int ny = 12;
  std::size_t min_count = 10;
  std::vector<double> sum;          // iy * nx + ix
  std::vector<std::size_t> counts;

  HeatmapGrid(int nx_, int ny_, std::size_t min_count_)
      : nx(nx_), ny(ny_), min_count(min_count_),
        sum(static_cast<std::size_t>(nx_ * ny_), 0.0),
        counts(static_cast<std::size_t>(nx_ * ny_), 0) {
    if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("HeatmapGrid: bins must be >= 1");
  }

  static int bin(double v, double extent, int n) {
    int i = static_cast<int>(std::floor(v / extent * static_cast<double>(n)));
    return std::clamp(i, 0, n - 1);
  }

  std::size_t cell(const Point2D& p, const Pitch& pitch) const {
    const int ix = bin(p.x, pitch.width, nx);
    const int iy = bin(p.y, pitch.length, ny);
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }

  void add(const Point2D& p, double tiv, const Pitch& pitch) {
    const std::size_t c = cell(p, pitch);
    sum[c] += tiv;
    counts[c] += 1;
  }

  std::size_t count_at(int ix, int iy) const {
    return counts[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                  static_cast<std::size_t>(ix)];
  }

  double mean_at(int ix, int iy) const {
    const std::size_t c = static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                          static_cast<std::size_t>(ix);
    return counts[c] == 0 ? 0.0 : sum[c] / static_cast<double>(counts[c]);
  }

  bool reliable_at(int ix, int iy) const { return count_at(ix, iy) >= min_count; }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    return n;
  }
};

inline HeatmapGrid tiv_heatmap(const std::vector<Point2D>& points, const std::vector<double>& tiv,
                               const Pitch& pitch, int nx = 8, int ny = 12,
                               std::size_t min_count = 10) {
  if (points.size() != tiv.size()) throw std::invalid_argument("tiv_heatmap: size mismatch");
  HeatmapGrid g(nx, ny, min_count);
  for (std::size_t i = 0; i < points.size(); ++i) g.add(points[i], tiv[i], pitch);
  return g;
}

struct PlayerProfile {
  std::string player_id;
  std::string team_id;
  std::size_t n_passes = 0;
  double mean_lbs = 0.0;
  double mean_sgm = 0.0;
  double mean_sdi = 0.0;
  double mean_tiv = 0.0;
  double cum_tiv = 0.0;
  std::vector<double> cluster_shares;  // sized k
};

/// Per-passer aggregates, ranked by cumulative impact value (ties by id).
inline std::vector<PlayerProfile> player_profiles(const std::vector<PassEvent>& passes,
                                                  const std::vector<StructuralFeatures>& features,
                                                  const std::vector<int>& clusters, int k) {
  if (passes.size() != features.size() || passes.size() != clusters.size())
    throw std::invalid_argument("player_profiles: size mismatch");
  std::map<std::string, PlayerProfile> by_player;
  for (std::size_t i = 0; i < passes.size(); ++i) {
    PlayerProfile& p = by_player[passes[i].passer_id];
    if (p.n_passes == 0) {
      p.player_id = passes[i].passer_id;
      p.team_id = passes[i].team_id;
      p.cluster_shares.assign(static_cast<std::size_t>(k), 0.0);
    }
    p.n_passes += 1;
    p.mean_lbs += features[i].lbs;
    p.mean_sgm += features[i].sgm;
    p.mean_sdi += features[i].sdi;
    p.cum_tiv += features[i].tiv;
    p.cluster_shares[static_cast<std::size_t>(clusters[i])] += 1.0;
  }
  std::vector<PlayerProfile> out;
  out.reserve(by_player.size());
  for (auto& [id, p] : by_player) {
    const double n = static_cast<double>(p.n_passes);
    p.mean_lbs /= n;
    p.mean_sgm /= n;
    p.mean_sdi /= n;
    p.mean_tiv = p.cum_tiv / n;
    for (double& s : p.cluster_shares) s /= n;
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const PlayerProfile& a, const PlayerProfile& b) {
    if (a.cum_tiv != b.cum_tiv) return a.cum_tiv > b.cum_tiv;
    return a.player_id < b.player_id;
  });
  return out;
}

struct DuoRecord {
  std::string passer_id;
  std::string receiver_id;
  std::string team_id;
  std::size_t n = 0;
  double mean_tiv = 0.0;         // over this pair's passes
  double passer_mean_tiv = 0.0;  // over all the passer's passes
  double delta_tiv = 0.0;
  OutcomeRates rates;
};

/// Lift of each passer-receiver pair over the passer's own baseline. Pairs
/// with fewer than `min_count` passes are dropped; the baseline always uses
/// every pass the passer played. Sorted by delta descending, ties by ids.
inline std::vector<DuoRecord> duo_delta_tiv(const std::vector<PassEvent>& passes,
                                            const std::vector<StructuralFeatures>& features,
                                            const std::vector<OutcomeRecord>& records,
                                            std::size_t min_count = 5) {
  if (passes.size() != features.size() || passes.size() != records.size())
    throw std::invalid_argument("duo_delta_tiv: size mismatch");
  struct Acc {
    std::string team_id;
    std::size_t n = 0;
    double sum_tiv = 0.0;
    std::vector<const OutcomeRecord*> recs;
  };
  std::map<std::string, std::pair<std::size_t, double>> passer_totals;  // n, sum tiv
  std::map<std::pair<std::string, std::string>, Acc> pairs;
  for (std::size_t i = 0; i < passes.size(); ++i) {
    auto& tot = passer_totals[passes[i].passer_id];
    tot.first += 1;
    tot.second += features[i].tiv;
    Acc& a = pairs[{passes[i].passer_id, passes[i].receiver_id}];
    a.team_id = passes[i].team_id;
    a.n += 1;
    a.sum_tiv += features[i].tiv;
    a.recs.push_back(&records[i]);
  }
  std::vector<DuoRecord> out;
  for (auto& [key, a] : pairs) {
    if (a.n < min_count) continue;
    DuoRecord d;
    d.passer_id = key.first;
    d.receiver_id = key.second;
    d.team_id = a.team_id;
    d.n = a.n;
    d.mean_tiv = a.sum_tiv / static_cast<double>(a.n);
    const auto& tot = passer_totals[key.first];
    d.passer_mean_tiv = tot.second / static_cast<double>(tot.first);
    d.delta_tiv = d.mean_tiv - d.passer_mean_tiv;
    d.rates = outcome_rates(a.recs);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DuoRecord& a, const DuoRecord& b) {
    if (a.delta_tiv != b.delta_tiv) return a.delta_tiv > b.delta_tiv;
    return std::tie(a.passer_id, a.receiver_id) < std::tie(b.passer_id, b.receiver_id);
  });
  return out;
}

struct Projection {
  std::vector<std::array<double, 2>> coords;
  std::array<std::array<double, 3>, 2> components{{{1, 0, 0}, {0, 1, 0}}};
  std::array<double, 2> explained_variance_ratio{0.0, 0.0};
  std::array<double, 3> mean{0.0, 0.0, 0.0};
};

namespace detail {

/// Jacobi eigendecomposition of a symmetric 3x3 matrix. Returns eigenvalues
/// descending with matching unit eigenvectors as rows.
inline void jacobi_eigen3(std::array<std::array<double, 3>, 3> a,
                          std::array<double, 3>& values,
                          std::array<std::array<double, 3>, 3>& vectors) {
  std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-15) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < 3; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (int i = 0; i < 3; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (int i = 0; i < 3; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&a](int x, int y) {
    if (a[x][x] != a[y][y]) return a[x][x] > a[y][y];
    return x < y;
  });
  for (int r = 0; r < 3; ++r) {
    values[static_cast<std::size_t>(r)] = a[order[static_cast<std::size_t>(r)]]
                                           [order[static_cast<std::size_t>(r)]];
    for (int i = 0; i < 3; ++i) {
      vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
          v[static_cast<std::size_t>(i)][order[static_cast<std::size_t>(r)]];
    }
  }
}

}  // namespace detail

/// Projects normalized metric vectors onto their top two principal axes.
/// Component signs are fixed so the largest-magnitude loading is positive,
/// which keeps reruns byte-identical.
inline Projection project_2d(const std::vector<std::array<double, 3>>& z) {
  if (z.empty()) throw std::invalid_argument("project_2d: empty input");
  Projection proj;
  const double n = static_cast<double>(z.size());
  for (const auto& p : z) {
    for (int i = 0; i < 3; ++i) proj.mean[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
  }
  for (double& m : proj.mean) m /= n;

  std::array<std::array<double, 3>, 3> cov{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  for (const auto& p : z) {
    const std::array<double, 3> d = {p[0] - proj.mean[0], p[1] - proj.mean[1],
                                     p[2] - proj.mean[2]};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)];
      }
    }
  }
  for (auto& row : cov) {
    for (double& x : row) x /= n;
  }

  const double total = cov[0][0] + cov[1][1] + cov[2][2];
  if (total > 0.0) {
    std::array<double, 3> values{};
    std::array<std::array<double, 3>, 3> vectors{};
    detail::jacobi_eigen3(cov, values, vectors);
    for (int r = 0; r < 2; ++r) {
      auto& comp = vectors[static_cast<std::size_t>(r)];
      int arg = 0;
      for (int i = 1; i < 3; ++i) {
        if (std::abs(comp[static_cast<std::size_t>(i)]) >
            std::abs(comp[static_cast<std::size_t>(arg)]))
          arg = i;
      }
      if (comp[static_cast<std::size_t>(arg)] < 0.0) {
        for (double& x : comp) x = -x;
      }
      proj.components[static_cast<std::size_t>(r)] = comp;
      proj.explained_variance_ratio[static_cast<std::size_t>(r)] =
          std::max(values[static_cast<std::size_t>(r)], 0.0) / total;
    }
  }

  proj.coords.reserve(z.size());
  for (const auto& p : z) {
    const std::array<double, 3> d = {p[0] - proj.mean[0], p[1] - proj.mean[1],
                                     p[2] - proj.mean[2]};
    std::array<double, 2> c{0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
      c[static_cast<std::size_t>(r)] = d[0] * proj.components[static_cast<std::size_t>(r)][0] +
                                       d[1] * proj.components[static_cast<std::size_t>(r)][1] +
                                       d[2] * proj.components[static_cast<std::size_t>(r)][2];
    }
    proj.coords.push_back(c);
  }
  return proj;
}

}  // namespace passlens
