#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "passlens/geometry.hpp"

namespace passlens {

/// Opposing outfield players at the moment a pass is played, in the canonical
/// frame of the passing team. The goalkeeper is excluded upstream.
struct DefensiveSnapshot {
  std::vector<Point2D> defenders;
  long frame_id = -1;
  Point2D centroid;

  static DefensiveSnapshot of(std::vector<Point2D> defenders, long frame_id = -1) {
    DefensiveSnapshot s;
    s.defenders = std::move(defenders);
    s.frame_id = frame_id;
    if (!s.defenders.empty()) {
      double sx = 0.0, sy = 0.0;
      for (const Point2D& d : s.defenders) {
        sx += d.x;
        sy += d.y;
      }
      s.centroid = {sx / static_cast<double>(s.defenders.size()),
                    sy / static_cast<double>(s.defenders.size())};
    }
    return s;
  }

  std::size_t n() const { return defenders.size(); }
};

/// One successful open-play pass joined with the defensive picture at release.
struct PassEvent {
  std::string pass_id;
  std::string match_id;
  std::string team_id;
  std::string passer_id;
  std::string receiver_id;
  int period = 1;
  double t = 0.0;  // seconds from period start
  Point2D start;
  Point2D end;
  DefensiveSnapshot snapshot;

  bool degenerate() const { return start == end; }
};

struct Weights {
  double w_lbs = 1.0 / 3.0;
  double w_sgm = 1.0 / 3.0;
  double w_sdi = 1.0 / 3.0;

  static Weights equal() { return {}; }

  bool valid(double eps = 1e-12) const {
    return w_lbs >= 0.0 && w_sgm >= 0.0 && w_sdi >= 0.0 &&
           std::abs(w_lbs + w_sgm + w_sdi - 1.0) <= eps;
  }
};

/// Raw structural metrics for one pass plus their normalized form and the
/// combined impact value. z fields are filled once corpus statistics exist.
struct StructuralFeatures {
  int lbs = 0;
  double sgm = 0.0;
  double sdi = 0.0;
  double z_lbs = 0.0;
  double z_sgm = 0.0;
  double z_sdi = 0.0;
  double tiv = 0.0;

  std::array<double, 3> z() const { return {z_lbs, z_sgm, z_sdi}; }
};

/// Per-match context that outlives ingest: enough to rebuild any team's
/// canonical frame for any period.
struct MatchInfo {
  std::string match_id;
  Pitch pitch;
  std::string home_team_id;
  std::string away_team_id;
  bool home_attacks_positive_x_first = true;

  TeamFrame frame_for(const std::string& team_id, int period) const {
    if (team_id != home_team_id && team_id != away_team_id)
      throw std::invalid_argument("unknown team id: " + team_id);
    return TeamFrame{pitch, attacks_positive_x(home_attacks_positive_x_first,
                                               team_id == home_team_id, period)};
  }
};

struct ValidationReport {
  bool admissible = true;
  bool degenerate = false;
  std::vector<std::string> violations;
};

/// Admissibility rules for a pass record. Never aborts; collects every
/// violation. Zero-length passes are admissible but flagged degenerate.
inline ValidationReport validate_pass(const PassEvent& p, const Pitch& pitch,
                                      double oob_tolerance_m = 2.0) {
  ValidationReport r;
  r.degenerate = p.degenerate();
  auto fail = [&r](const char* why) {
    r.admissible = false;
    r.violations.push_back(why);
  };
  if (p.snapshot.n() == 0) fail("empty defense");
  if (p.snapshot.n() > 10) fail("too many defenders");
  if (!pitch.in_bounds(p.start, oob_tolerance_m)) fail("start out of bounds");
  if (!pitch.in_bounds(p.end, oob_tolerance_m)) fail("end out of bounds");
  for (const Point2D& d : p.snapshot.defenders) {
    if (!pitch.in_bounds(d, oob_tolerance_m)) {
      fail("defender out of bounds");
      break;
    }
  }
  if (!p.passer_id.empty() && p.passer_id == p.receiver_id) fail("passer equals receiver");
  return r;
}

}  // namespace passlens
