#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "passlens/geometry.hpp"
#include "passlens/metrics.hpp"
#include "passlens/outcomes.hpp"
#include "passlens/tracking.hpp"
#include "passlens/types.hpp"

namespace passlens {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  return *it;
}

inline std::array<double, 2> parse_xy(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(std::string(what) + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline MatchMeta parse_meta(const nlohmann::json& j) {
  using detail::require_field;
  MatchMeta m;
  m.match_id = require_field(j, "match_id", "meta").get<std::string>();
  const auto& pitch = require_field(j, "pitch", "meta");
  m.pitch.length = require_field(pitch, "length", "meta.pitch").get<double>();
  m.pitch.width = require_field(pitch, "width", "meta.pitch").get<double>();
  if (pitch.contains("box_depth")) m.pitch.box_depth = pitch.at("box_depth").get<double>();
  if (pitch.contains("box_width")) m.pitch.box_width = pitch.at("box_width").get<double>();
  if (!m.pitch.valid()) throw ParseError("meta: invalid pitch dimensions");
  if (j.contains("frame_rate")) m.frame_rate = j.at("frame_rate").get<double>();
  if (m.frame_rate <= 0.0) throw ParseError("meta: frame_rate must be > 0");
  m.home_team_id = require_field(j, "home_team_id", "meta").get<std::string>();
  m.away_team_id = require_field(j, "away_team_id", "meta").get<std::string>();
  if (m.home_team_id == m.away_team_id) throw ParseError("meta: home and away team ids equal");
  if (j.contains("home_attacks_positive_x_first"))
    m.home_attacks_positive_x_first = j.at("home_attacks_positive_x_first").get<bool>();

  const auto& players = require_field(j, "players", "meta");
  if (!players.is_array()) throw ParseError("meta: players must be an array");
  int gk_home = 0, gk_away = 0;
  for (const auto& p : players) {
    const std::string pid = require_field(p, "player_id", "meta.players").get<std::string>();
    RosterEntry e;
    e.team_id = require_field(p, "team_id", "meta.players").get<std::string>();
    if (!m.knows_team(e.team_id))
      throw ParseError("meta: player " + pid + " has unknown team " + e.team_id);
    if (p.contains("goalkeeper")) e.goalkeeper = p.at("goalkeeper").get<bool>();
    if (e.goalkeeper) (e.team_id == m.home_team_id ? gk_home : gk_away) += 1;
    if (!m.roster.emplace(pid, e).second) throw ParseError("meta: duplicate player " + pid);
  }
  if (gk_home != 1 || gk_away != 1)
    throw ParseError("meta: each team needs exactly one goalkeeper");
  return m;
}

inline RawEvent parse_event(const nlohmann::json& j) {
  using detail::require_field;
  RawEvent e;
  e.event_id = require_field(j, "event_id", "event").get<std::string>();
  e.team_id = require_field(j, "team_id", "event").get<std::string>();
  e.actor_id = require_field(j, "actor_id", "event").get<std::string>();
  if (j.contains("receiver_id")) e.receiver_id = j.at("receiver_id").get<std::string>();
  e.type = require_field(j, "type", "event").get<std::string>();
  e.period = require_field(j, "period", "event").get<int>();
  if (e.period < 1) throw ParseError("event " + e.event_id + ": period must be >= 1");
  e.t = require_field(j, "t", "event").get<double>();
  if (e.t < 0.0) throw ParseError("event " + e.event_id + ": t must be >= 0");
  e.start_xy = detail::parse_xy(require_field(j, "start", "event"), "event.start");
  e.end_xy = detail::parse_xy(require_field(j, "end", "event"), "event.end");
  e.success = require_field(j, "success", "event").get<bool>();
  if (j.contains("set_piece")) e.set_piece = j.at("set_piece").get<std::string>();
  return e;
}

inline TrackingFrame parse_frame(const nlohmann::json& j) {
  using detail::require_field;
  TrackingFrame f;
  f.frame_id = require_field(j, "frame_id", "frame").get<long>();
  f.period = require_field(j, "period", "frame").get<int>();
  f.t = require_field(j, "t", "frame").get<double>();
  if (f.period < 1 || f.t < 0.0) throw ParseError("frame: bad period or timestamp");
  const auto& players = require_field(j, "players", "frame");
  if (!players.is_array()) throw ParseError("frame: players must be an array");
  f.players.reserve(players.size());
  for (const auto& p : players) {
    TrackedPlayer tp;
    tp.player_id = require_field(p, "id", "frame.players").get<std::string>();
    tp.x = require_field(p, "x", "frame.players").get<double>();
    tp.y = require_field(p, "y", "frame.players").get<double>();
    f.players.push_back(std::move(tp));
  }
  if (j.contains("ball")) {
    f.ball_xy = detail::parse_xy(j.at("ball"), "frame.ball");
    f.has_ball = true;
  }
  return f;
}

struct RecordIssue {
  std::string file;
  std::size_t line = 0;
  std::string what;
};

struct MatchFiles {
  MatchMeta meta;
  std::vector<RawEvent> events;
  std::vector<TrackingFrame> frames;
  std::vector<RecordIssue> record_issues;
};

namespace detail {

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, std::vector<RecordIssue>& issues, Fn fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      issues.push_back({path.filename().string(), lineno, e.what()});
    } catch (const ParseError& e) {
      issues.push_back({path.filename().string(), lineno, e.what()});
    }
  }
}

}  // namespace detail

/// Reads one canonical match directory (meta.json, events.jsonl,
/// tracking.jsonl). Structural problems throw; bad individual records are
/// collected and skipped.
inline MatchFiles load_match_dir(const std::filesystem::path& dir) {
  MatchFiles mf;
  {
    std::ifstream in(dir / "meta.json");
    if (!in) throw ParseError("cannot open " + (dir / "meta.json").string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("meta.json: " + std::string(e.what()));
    }
    mf.meta = parse_meta(j);
  }
  detail::for_each_jsonl(dir / "events.jsonl", mf.record_issues,
                         [&mf](const nlohmann::json& j) { mf.events.push_back(parse_event(j)); });
  detail::for_each_jsonl(dir / "tracking.jsonl", mf.record_issues,
                         [&mf](const nlohmann::json& j) { mf.frames.push_back(parse_frame(j)); });

  std::sort(mf.events.begin(), mf.events.end(), [](const RawEvent& a, const RawEvent& b) {
    if (a.period != b.period) return a.period < b.period;
    if (a.t != b.t) return a.t < b.t;
    return a.event_id < b.event_id;
  });
  for (std::size_t i = 1; i < mf.frames.size(); ++i) {
    const TrackingFrame& prev = mf.frames[i - 1];
    const TrackingFrame& cur = mf.frames[i];
    if (cur.period < prev.period || (cur.period == prev.period && cur.t <= prev.t))
      throw ParseError("tracking.jsonl: timestamps not strictly increasing within period near frame " +
                       std::to_string(cur.frame_id));
  }
  return mf;
}

struct ExtractOptions {
  double sync_tolerance_s = 0.5;
  double oob_tolerance_m = 2.0;
  bool include_goal_kicks = false;
};

struct ExtractResult {
  std::vector<PassEvent> passes;
  std::map<std::string, std::size_t> drops;  // reason -> count
  std::size_t candidates = 0;                // events of type "pass"
};

/// Joins successful open-play pass events with the defensive picture from
/// tracking. Smoothing is the caller's job; frames must be sorted.
inline ExtractResult extract_passes(const std::vector<RawEvent>& events,
                                    const std::vector<TrackingFrame>& frames,
                                    const MatchMeta& meta, const ExtractOptions& opt = {}) {
  ExtractResult res;
  auto drop = [&res](const std::string& reason) { res.drops[reason] += 1; };

  for (const RawEvent& e : events) {
    if (e.type != "pass") continue;
    ++res.candidates;
    if (!e.success) {
      drop("unsuccessful");
      continue;
    }
    if (!e.set_piece.empty() && !(opt.include_goal_kicks && e.set_piece == "goal_kick")) {
      drop("set piece");
      continue;
    }
    if (!meta.knows_team(e.team_id)) {
      drop("unknown team");
      continue;
    }
    auto actor = meta.roster.find(e.actor_id);
    if (actor == meta.roster.end() || actor->second.team_id != e.team_id) {
      drop("unknown actor");
      continue;
    }
    auto receiver = meta.roster.find(e.receiver_id);
    if (e.receiver_id.empty() || receiver == meta.roster.end() ||
        receiver->second.team_id != e.team_id) {
      drop("unresolvable receiver");
      continue;
    }

    const SyncResult sync = sync_event_to_frame(e.period, e.t, frames, opt.sync_tolerance_s);
    if (!sync.ok) {
      drop("sync failure");
      continue;
    }
    const TrackingFrame& frame = frames[sync.frame_pos];

    const std::string def_team = defending_team(e, meta);
    const TeamFrame team_frame = meta.frame_for(e.team_id, e.period);
    std::vector<Point2D> defenders;
    for (const TrackedPlayer& tp : frame.players) {
      auto it = meta.roster.find(tp.player_id);
      if (it == meta.roster.end() || it->second.team_id != def_team) continue;
      if (it->second.goalkeeper) continue;
      defenders.push_back(team_frame.to_canonical(tp.x, tp.y));
    }

    PassEvent p;
    p.pass_id = e.event_id;
    p.match_id = meta.match_id;
    p.team_id = e.team_id;
    p.passer_id = e.actor_id;
    p.receiver_id = e.receiver_id;
    p.period = e.period;
    p.t = e.t;
    p.start = team_frame.to_canonical(e.start_xy[0], e.start_xy[1]);
    p.end = team_frame.to_canonical(e.end_xy[0], e.end_xy[1]);
    p.snapshot = DefensiveSnapshot::of(std::move(defenders), frame.frame_id);

    const ValidationReport v = validate_pass(p, meta.pitch, opt.oob_tolerance_m);
    if (!v.admissible) {
      drop(v.violations.front());
      continue;
    }
    res.passes.push_back(std::move(p));
  }
  return res;
}

/// Compact event digest kept alongside extracted passes so outcome windows
/// can be evaluated without the raw files.
inline std::vector<OutcomeEvent> to_outcome_events(const std::vector<RawEvent>& events) {
  std::vector<OutcomeEvent> out;
  out.reserve(events.size());
  for (const RawEvent& e : events) {
    OutcomeEvent oe;
    oe.event_id = e.event_id;
    oe.team_id = e.team_id;
    oe.type = e.type;
    oe.period = e.period;
    oe.t = e.t;
    oe.success = e.success;
    oe.set_piece = !e.set_piece.empty();
    oe.start_xy = e.start_xy;
    oe.end_xy = e.end_xy;
    out.push_back(std::move(oe));
  }
  return out;
}

}  // namespace passlens
