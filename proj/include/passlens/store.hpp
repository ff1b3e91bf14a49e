#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "passlens/ingest.hpp"
#include "passlens/outcomes.hpp"
#include "passlens/types.hpp"

namespace passlens {

struct MatchBundle {
  MatchInfo info;
  std::vector<PassEvent> passes;
  std::vector<OutcomeEvent> events;
};

/// Self-contained intermediate corpus: per match the extracted passes with
/// their defensive snapshots plus the on-ball event digest needed for outcome
/// windows. Serialized as one JSONL file with kind-tagged lines.
struct PassStore {
  std::vector<MatchBundle> matches;

  std::size_t total_passes() const {
    std::size_t n = 0;
    for (const MatchBundle& m : matches) n += m.passes.size();
    return n;
  }

  void sort() {
    std::sort(matches.begin(), matches.end(), [](const MatchBundle& a, const MatchBundle& b) {
      return a.info.match_id < b.info.match_id;
    });
    for (MatchBundle& m : matches) {
      std::sort(m.passes.begin(), m.passes.end(), [](const PassEvent& a, const PassEvent& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.t != b.t) return a.t < b.t;
        return a.pass_id < b.pass_id;
      });
      std::sort(m.events.begin(), m.events.end(), [](const OutcomeEvent& a, const OutcomeEvent& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.t != b.t) return a.t < b.t;
        return a.event_id < b.event_id;
      });
    }
  }

  void save(const std::filesystem::path& path) const;
  static PassStore load(const std::filesystem::path& path);
};

namespace detail {

inline nlohmann::json match_to_json(const MatchInfo& info) {
  return nlohmann::json{{"kind", "match"},
                        {"match_id", info.match_id},
                        {"pitch",
                         {{"length", info.pitch.length},
                          {"width", info.pitch.width},
                          {"box_depth", info.pitch.box_depth},
                          {"box_width", info.pitch.box_width}}},
                        {"home_team_id", info.home_team_id},
                        {"away_team_id", info.away_team_id},
                        {"home_attacks_positive_x_first", info.home_attacks_positive_x_first}};
}

inline nlohmann::json pass_to_json(const PassEvent& p) {
  nlohmann::json defs = nlohmann::json::array();
  for (const Point2D& d : p.snapshot.defenders) defs.push_back({d.x, d.y});
  return nlohmann::json{{"kind", "pass"},
                        {"pass_id", p.pass_id},
                        {"team_id", p.team_id},
                        {"passer_id", p.passer_id},
                        {"receiver_id", p.receiver_id},
                        {"period", p.period},
                        {"t", p.t},
                        {"start", {p.start.x, p.start.y}},
                        {"end", {p.end.x, p.end.y}},
                        {"frame_id", p.snapshot.frame_id},
                        {"defenders", std::move(defs)}};
}

inline nlohmann::json event_to_json(const OutcomeEvent& e) {
  return nlohmann::json{{"kind", "event"},     {"event_id", e.event_id},
                        {"team_id", e.team_id}, {"type", e.type},
                        {"period", e.period},   {"t", e.t},
                        {"success", e.success}, {"set_piece", e.set_piece},
                        {"start", {e.start_xy[0], e.start_xy[1]}},
                        {"end", {e.end_xy[0], e.end_xy[1]}}};
}

}  // namespace detail

inline void PassStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const MatchBundle& m : matches) {
    out << detail::match_to_json(m.info).dump() << '\n';
    for (const OutcomeEvent& e : m.events) out << detail::event_to_json(e).dump() << '\n';
    for (const PassEvent& p : m.passes) out << detail::pass_to_json(p).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline PassStore PassStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  PassStore store;
  MatchBundle* cur = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const std::string kind = detail::require_field(j, "kind", "store").get<std::string>();
    if (kind == "match") {
      MatchBundle m;
      m.info.match_id = detail::require_field(j, "match_id", "store.match").get<std::string>();
      const auto& pitch = detail::require_field(j, "pitch", "store.match");
      m.info.pitch.length = pitch.at("length").get<double>();
      m.info.pitch.width = pitch.at("width").get<double>();
      m.info.pitch.box_depth = pitch.at("box_depth").get<double>();
      m.info.pitch.box_width = pitch.at("box_width").get<double>();
      m.info.home_team_id = detail::require_field(j, "home_team_id", "store.match").get<std::string>();
      m.info.away_team_id = detail::require_field(j, "away_team_id", "store.match").get<std::string>();
      m.info.home_attacks_positive_x_first =
          detail::require_field(j, "home_attacks_positive_x_first", "store.match").get<bool>();
      store.matches.push_back(std::move(m));
      cur = &store.matches.back();
      continue;
    }
    if (cur == nullptr)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": record before match line");
    if (kind == "pass") {
      PassEvent p;
      p.pass_id = detail::require_field(j, "pass_id", "store.pass").get<std::string>();
      p.match_id = cur->info.match_id;
      p.team_id = detail::require_field(j, "team_id", "store.pass").get<std::string>();
      p.passer_id = detail::require_field(j, "passer_id", "store.pass").get<std::string>();
      p.receiver_id = detail::require_field(j, "receiver_id", "store.pass").get<std::string>();
      p.period = detail::require_field(j, "period", "store.pass").get<int>();
      p.t = detail::require_field(j, "t", "store.pass").get<double>();
      const auto s = detail::parse_xy(detail::require_field(j, "start", "store.pass"), "store.pass.start");
      const auto e = detail::parse_xy(detail::require_field(j, "end", "store.pass"), "store.pass.end");
      p.start = {s[0], s[1]};
      p.end = {e[0], e[1]};
      const auto& defs = detail::require_field(j, "defenders", "store.pass");
      std::vector<Point2D> defenders;
      defenders.reserve(defs.size());
      for (const auto& d : defs) {
        const auto xy = detail::parse_xy(d, "store.pass.defenders");
        defenders.push_back({xy[0], xy[1]});
      }
      p.snapshot = DefensiveSnapshot::of(std::move(defenders),
                                         detail::require_field(j, "frame_id", "store.pass").get<long>());
      cur->passes.push_back(std::move(p));
      continue;
    }
    if (kind == "event") {
      OutcomeEvent e;
      e.event_id = detail::require_field(j, "event_id", "store.event").get<std::string>();
      e.team_id = detail::require_field(j, "team_id", "store.event").get<std::string>();
      e.type = detail::require_field(j, "type", "store.event").get<std::string>();
      e.period = detail::require_field(j, "period", "store.event").get<int>();
      e.t = detail::require_field(j, "t", "store.event").get<double>();
      e.success = detail::require_field(j, "success", "store.event").get<bool>();
      e.set_piece = detail::require_field(j, "set_piece", "store.event").get<bool>();
      e.start_xy = detail::parse_xy(detail::require_field(j, "start", "store.event"), "store.event.start");
      e.end_xy = detail::parse_xy(detail::require_field(j, "end", "store.event"), "store.event.end");
      cur->events.push_back(std::move(e));
      continue;
    }
    throw ParseError(path.string() + ":" + std::to_string(lineno) + ": unknown kind '" + kind + "'");
  }
  store.sort();
  return store;
}

}  // namespace passlens
