#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "passlens/geometry.hpp"
#include "passlens/types.hpp"

namespace passlens {

/// Event record as shipped by the provider, in file coordinates.
struct RawEvent {
  std::string event_id;
  std::string match_id;
  std::string team_id;
  std::string actor_id;
  std::string receiver_id;  // optional; required to keep a pass
  std::string type;         // "pass", "shot", "carry", ...
  int period = 1;
  double t = 0.0;  // seconds from period start
  std::array<double, 2> start_xy{0.0, 0.0};
  std::array<double, 2> end_xy{0.0, 0.0};
  bool success = false;
  std::string set_piece;  // empty for open play
};

struct TrackedPlayer {
  std::string player_id;
  double x = 0.0;
  double y = 0.0;
};

struct TrackingFrame {
  long frame_id = -1;
  int period = 1;
  double t = 0.0;  // seconds from period start
  std::vector<TrackedPlayer> players;
  std::array<double, 2> ball_xy{0.0, 0.0};
  bool has_ball = false;
};

struct RosterEntry {
  std::string team_id;
  bool goalkeeper = false;
};

struct MatchMeta {
  std::string match_id;
  Pitch pitch;
  double frame_rate = 29.97;
  std::string home_team_id;
  std::string away_team_id;
  bool home_attacks_positive_x_first = true;
  std::map<std::string, RosterEntry> roster;  // player_id -> entry

  bool knows_team(const std::string& team_id) const {
    return team_id == home_team_id || team_id == away_team_id;
  }

  TeamFrame frame_for(const std::string& team_id, int period) const {
    if (!knows_team(team_id)) throw std::invalid_argument("unknown team id: " + team_id);
    return TeamFrame{pitch, attacks_positive_x(home_attacks_positive_x_first,
                                               team_id == home_team_id, period)};
  }

  MatchInfo info() const {
    return MatchInfo{match_id, pitch, home_team_id, away_team_id,
                     home_attacks_positive_x_first};
  }
};

inline std::string defending_team(const RawEvent& e, const MatchMeta& meta) {
  if (e.team_id == meta.home_team_id) return meta.away_team_id;
  if (e.team_id == meta.away_team_id) return meta.home_team_id;
  throw std::invalid_argument("unknown team id: " + e.team_id);
}

/// Centered moving average over each entity's own appearance sequence. The
/// window shrinks symmetrically near the ends, so short series and series
/// with gaps stay well defined and a constant series is unchanged.
inline std::vector<TrackingFrame> smooth_tracking(const std::vector<TrackingFrame>& frames,
                                                  int window = 7) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("smooth_tracking: window must be odd and >= 1");
  std::vector<TrackingFrame> out = frames;
  if (window == 1 || frames.empty()) return out;
  const int h = (window - 1) / 2;

  struct Series {
    std::vector<std::pair<std::size_t, std::size_t>> at;  // (frame index, player slot)
    std::vector<double> xs, ys;
  };
  std::map<std::string, Series> by_entity;
  Series ball;
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    for (std::size_t pi = 0; pi < frames[fi].players.size(); ++pi) {
      Series& s = by_entity[frames[fi].players[pi].player_id];
      s.at.emplace_back(fi, pi);
      s.xs.push_back(frames[fi].players[pi].x);
      s.ys.push_back(frames[fi].players[pi].y);
    }
    if (frames[fi].has_ball) {
      ball.at.emplace_back(fi, 0);
      ball.xs.push_back(frames[fi].ball_xy[0]);
      ball.ys.push_back(frames[fi].ball_xy[1]);
    }
  }

  auto smooth_at = [h](const std::vector<double>& v, std::size_t i) {
    const std::size_t m = v.size();
    const std::size_t r = std::min<std::size_t>(
        {static_cast<std::size_t>(h), i, m - 1 - i});
    double acc = 0.0;
    for (std::size_t j = i - r; j <= i + r; ++j) acc += v[j];
    return acc / static_cast<double>(2 * r + 1);
  };

  for (const auto& [id, s] : by_entity) {
    for (std::size_t i = 0; i < s.at.size(); ++i) {
      auto [fi, pi] = s.at[i];
      out[fi].players[pi].x = smooth_at(s.xs, i);
      out[fi].players[pi].y = smooth_at(s.ys, i);
    }
  }
  for (std::size_t i = 0; i < ball.at.size(); ++i) {
    out[ball.at[i].first].ball_xy = {smooth_at(ball.xs, i), smooth_at(ball.ys, i)};
  }
  return out;
}

struct SyncResult {
  bool ok = false;
  std::size_t frame_pos = 0;  // index into the frame vector
  double dt = 0.0;            // event time minus frame time
};

/// Nearest tracking frame within the same period; ties break toward the
/// earlier frame. Fails when the nearest frame is more than `tolerance_s`
/// away. Frames must be sorted by (period, t).
inline SyncResult sync_event_to_frame(int period, double t,
                                      const std::vector<TrackingFrame>& frames,
                                      double tolerance_s = 0.5) {
  SyncResult r;
  auto lo = std::lower_bound(frames.begin(), frames.end(), period,
                             [](const TrackingFrame& f, int p) { return f.period < p; });
  auto hi = std::lower_bound(lo, frames.end(), period + 1,
                             [](const TrackingFrame& f, int p) { return f.period < p; });
  if (lo == hi) return r;
  auto it = std::lower_bound(lo, hi, t,
                             [](const TrackingFrame& f, double tt) { return f.t < tt; });
  std::size_t best;
  if (it == hi) {
    best = static_cast<std::size_t>(std::prev(it) - frames.begin());
  } else if (it == lo) {
    best = static_cast<std::size_t>(it - frames.begin());
  } else {
    const std::size_t after = static_cast<std::size_t>(it - frames.begin());
    const std::size_t before = after - 1;
    const double d_before = t - frames[before].t;
    const double d_after = frames[after].t - t;
    best = d_before <= d_after ? before : after;
  }
  const double dt = t - frames[best].t;
  if (std::abs(dt) > tolerance_s) return r;
  r.ok = true;
  r.frame_pos = best;
  r.dt = dt;
  return r;
}

}  // namespace passlens
