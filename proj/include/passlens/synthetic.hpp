#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "passlens/csv.hpp"
#include "passlens/geometry.hpp"
#include "passlens/rng.hpp"

namespace passlens {

enum class DefenseTemplate { two_lines_4_4 = 0, flat_back_four = 1, compact_block = 2, stretched_block = 3 };
enum class PassIntent { circulatory = 0, destabilising = 1, line_breaking = 2, space_expanding = 3 };

inline const char* to_string(PassIntent i) {
  switch (i) {
    case PassIntent::circulatory: return "circulatory";
    case PassIntent::destabilising: return "destabilising";
    case PassIntent::line_breaking: return "line_breaking";
    case PassIntent::space_expanding: return "space_expanding";
  }
  return "unknown";
}

inline DefenseTemplate defense_template_from_string(const std::string& s) {
  if (s == "two_lines_4_4") return DefenseTemplate::two_lines_4_4;
  if (s == "flat_back_four") return DefenseTemplate::flat_back_four;
  if (s == "compact_block") return DefenseTemplate::compact_block;
  if (s == "stretched_block") return DefenseTemplate::stretched_block;
  throw std::invalid_argument("unknown defense template: " + s);
}

/// Outfield defender offsets from the block centre, in the attacking team's
/// canonical frame (negative y is goal side of the block).
inline std::vector<Point2D> defense_template_offsets(DefenseTemplate t) {
  switch (t) {
    case DefenseTemplate::two_lines_4_4:
      return {{-9, -6}, {-3, -6}, {3, -6}, {9, -6}, {-13, 0}, {13, 0},
              {-9, 6},  {-3, 6},  {3, 6},  {9, 6}};
    case DefenseTemplate::flat_back_four:
      return {{0, -20}, {-14, -6}, {-7, -6}, {0, -6}, {7, -6}, {14, -6},
              {-12, 4}, {-4, 4},   {4, 4},   {12, 4}};
    case DefenseTemplate::compact_block:
      return {{-8, -4}, {-4, -4}, {0, -4}, {4, -4}, {8, -4},
              {-8, 4},  {-4, 4},  {0, 4},  {4, 4},  {8, 4}};
    case DefenseTemplate::stretched_block:
      return {{-6, -22}, {6, -22}, {-18, -4}, {-6, -4}, {6, -4},
              {18, -4},  {-15, 8}, {-5, 8},   {5, 8},   {15, 8}};
  }
  throw std::invalid_argument("unknown defense template");
}

/// Recipe for a synthetic corpus. Pass geometry is drawn around a defensive
/// block so that each intent produces a known metric signature; noise_sd
/// jitters defender positions (clamped at 2.5 sd) without breaking the
/// signatures.
struct ScenarioSpec {
  std::uint64_t seed = 7;
  int n_matches = 4;
  int passes_per_match = 160;
  int teams = 8;
  DefenseTemplate defense = DefenseTemplate::two_lines_4_4;
  std::array<double, 4> pass_mix{0.25, 0.25, 0.25, 0.25};  // PassIntent order
  double noise_sd = 0.5;
  double sigma = 10.0;
  double rho_floor = 1e-6;
  double frame_rate = 29.97;
  Pitch pitch;

  void validate() const {
    if (n_matches < 1) throw std::invalid_argument("scenario: n_matches must be >= 1");
    if (passes_per_match < 1) throw std::invalid_argument("scenario: passes_per_match must be >= 1");
    if (teams < 2) throw std::invalid_argument("scenario: teams must be >= 2");
    double sum = 0.0;
    for (double m : pass_mix) {
      if (m < 0.0) throw std::invalid_argument("scenario: negative intent share");
      sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("scenario: intent shares must sum to 1");
    if (noise_sd < 0.0 || noise_sd > 1.5)
      throw std::invalid_argument("scenario: noise_sd must be in [0, 1.5]");
    if (sigma <= 0.0 || rho_floor <= 0.0) throw std::invalid_argument("scenario: sigma and rho_floor must be > 0");
    if (frame_rate <= 0.0) throw std::invalid_argument("scenario: frame_rate must be > 0");
    if (!pitch.valid() || pitch.length < 90.0 || pitch.width < 64.0)
      throw std::invalid_argument("scenario: pitch must be at least 90 x 64");
    if (defense_template_offsets(defense).empty())
      throw std::invalid_argument("scenario: defense template has no defenders");
  }
};

/// Per-pass reference values computed by the generator itself, kept apart
/// from the analysis code so the pipeline can be checked against them.
struct GroundTruthRow {
  std::string match_id;
  std::string event_id;
  std::string team_id;
  int intent = 0;
  int period = 1;
  double t = 0.0;
  double lbs = 0.0;
  double sgm = 0.0;
  double sdi = 0.0;
};

struct SynthSummary {
  int matches = 0;
  std::size_t passes = 0;
};

namespace synthdetail {

struct PassGeometry {
  Point2D start;
  Point2D end;
  std::vector<Point2D> defenders;  // jittered block, canonical frame
};

inline double clamped_gaussian(Rng& rng, double sd) {
  if (sd == 0.0) {
    rng.gaussian();  // keep the stream aligned across noise settings
    return 0.0;
  }
  return std::clamp(rng.gaussian(0.0, sd), -2.5 * sd, 2.5 * sd);
}

inline PassGeometry draw_pass(PassIntent intent, DefenseTemplate tmpl, const Pitch& pitch,
                              double noise_sd, Rng& rng) {
  PassGeometry g;
  const double bx = rng.uniform(pitch.width / 2.0 - 8.0, pitch.width / 2.0 + 8.0);
  const double by = rng.uniform(0.45 * pitch.length, 0.60 * pitch.length);
  const double side = bx <= pitch.width / 2.0 ? 1.0 : -1.0;

  const std::vector<Point2D> offsets = defense_template_offsets(tmpl);
  g.defenders.reserve(offsets.size());
  for (const Point2D& o : offsets) {
    g.defenders.push_back({bx + o.x + clamped_gaussian(rng, noise_sd),
                           by + o.y + clamped_gaussian(rng, noise_sd)});
  }

  // Template anchors: first and last line, and the most lateral defender on
  // the roomier flank. Geometry is placed off the nominal offsets, not the
  // jittered positions, so each intent keeps a tight metric signature.
  double front_y = offsets[0].y;
  double back_y = offsets[0].y;
  Point2D wide = offsets[0];
  for (const Point2D& o : offsets) {
    front_y = std::min(front_y, o.y);
    back_y = std::max(back_y, o.y);
    if (side * o.x > side * wide.x) wide = o;
  }

  switch (intent) {
    case PassIntent::circulatory: {
      // Lateral switch in front of the block: no line crossed, symmetric
      // distances to the block centre.
      const double r = rng.uniform(9.0, 13.0);
      const double d = rng.uniform(10.0, 14.0);
      g.start = {bx - r, by + front_y - d};
      g.end = {bx + r, by + front_y - d};
      break;
    }
    case PassIntent::destabilising: {
      // From just behind the first line out to the widest defender's boots:
      // large centroid-distance change, nearly no space gained.
      g.start = {bx + rng.uniform(-2.0, 2.0), by + front_y + rng.uniform(1.5, 3.0)};
      g.end = {bx + side * (std::abs(wide.x) + rng.uniform(6.0, 9.0)),
               by + wide.y + rng.uniform(1.0, 3.0)};
      break;
    }
    case PassIntent::line_breaking: {
      // Vertical ball through the whole block. Margins beat the worst-case
      // jitter clamp (2.5 * 1.5 m) so the bypass count never wavers.
      g.start = {bx + rng.uniform(-2.0, 2.0), by + front_y - rng.uniform(4.0, 9.0)};
      g.end = {bx + rng.uniform(-2.0, 2.0), by + back_y + rng.uniform(4.5, 6.5)};
      break;
    }
    case PassIntent::space_expanding: {
      // Slightly backward ball into the empty flank, landing a controlled
      // 20-23 m from the nearest defender so the space gain stays bounded.
      g.start = {bx + rng.uniform(-2.0, 2.0), by + front_y - rng.uniform(2.0, 5.0)};
      const double ey = g.start.y - rng.uniform(1.0, 4.0);
      const double d_target = rng.uniform(21.0, 22.5);
      const double dy_w = (by + wide.y) - ey;
      const double dx_w = std::sqrt(std::max(d_target * d_target - dy_w * dy_w, 25.0));
      g.end = {bx + side * (std::abs(wide.x) + dx_w), ey};
      break;
    }
  }

  // Keep defender heights away from the knife edge of the line count.
  for (Point2D& d : g.defenders) {
    if (std::abs(d.y - g.start.y) < 0.05 || std::abs(d.y - g.end.y) < 0.05) d.y += 0.1;
  }
  return g;
}

// Reference metric implementations, deliberately written against the raw
// arrays rather than the analysis types.
inline double ref_lbs(const PassGeometry& g) {
  double n = 0.0;
  for (const Point2D& d : g.defenders) {
    n += (g.start.y < d.y && d.y <= g.end.y) ? 1.0 : 0.0;
  }
  return n;
}

inline double ref_density(const Point2D& at, const std::vector<Point2D>& defenders, double sigma,
                          double rho_floor) {
  double rho = 0.0;
  for (const Point2D& d : defenders) {
    const double dx = at.x - d.x;
    const double dy = at.y - d.y;
    rho += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  }
  return std::max(rho, rho_floor);
}

inline double ref_sgm(const PassGeometry& g, double sigma, double rho_floor) {
  return 1.0 / ref_density(g.end, g.defenders, sigma, rho_floor) -
         1.0 / ref_density(g.start, g.defenders, sigma, rho_floor);
}

inline double ref_sdi(const PassGeometry& g) {
  double cx = 0.0, cy = 0.0;
  for (const Point2D& d : g.defenders) {
    cx += d.x;
    cy += d.y;
  }
  cx /= static_cast<double>(g.defenders.size());
  cy /= static_cast<double>(g.defenders.size());
  const double de = std::hypot(g.end.x - cx, g.end.y - cy);
  const double ds = std::hypot(g.start.x - cx, g.start.y - cy);
  return de - ds;
}

inline std::string player_id(const std::string& team, int slot) {
  return team + "_P" + (slot < 10 ? "0" : "") + std::to_string(slot);
}

}  // namespace synthdetail

/// Writes a synthetic corpus of canonical match directories under `out_dir`
/// plus ground_truth.jsonl with the intent and reference metrics of every
/// generated pass. Tracking is emitted as a short burst of frames around each
/// pass with the defensive block held still, so the smoothed, synced snapshot
/// equals the generated one.
inline SynthSummary generate(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  std::ofstream truth(out_dir / "ground_truth.jsonl", std::ios::binary);
  if (!truth) throw std::runtime_error("cannot open ground truth for writing");

  SynthSummary summary;
  summary.matches = spec.n_matches;

  auto team_id = [](int idx) {
    return "T" + std::string(idx + 1 < 10 ? "0" : "") + std::to_string(idx + 1);
  };

  for (int mi = 0; mi < spec.n_matches; ++mi) {
    Rng rng(Rng::derive_seed(spec.seed, static_cast<std::uint64_t>(mi)));
    const std::string match_id = [mi] {
      std::string n = std::to_string(mi + 1);
      return "m" + std::string(4 - std::min<std::size_t>(4, n.size()), '0') + n;
    }();
    const std::string home = team_id((2 * mi) % spec.teams);
    const std::string away = team_id((2 * mi + 1) % spec.teams);
    const std::filesystem::path dir = out_dir / match_id;
    std::filesystem::create_directories(dir);

    {
      nlohmann::json players = nlohmann::json::array();
      for (const std::string& t : {home, away}) {
        for (int slot = 0; slot <= 10; ++slot) {
          players.push_back({{"player_id", synthdetail::player_id(t, slot)},
                             {"team_id", t},
                             {"goalkeeper", slot == 0}});
        }
      }
      nlohmann::json meta = {{"match_id", match_id},
                             {"pitch",
                              {{"length", spec.pitch.length},
                               {"width", spec.pitch.width},
                               {"box_depth", spec.pitch.box_depth},
                               {"box_width", spec.pitch.box_width}}},
                             {"frame_rate", spec.frame_rate},
                             {"home_team_id", home},
                             {"away_team_id", away},
                             {"home_attacks_positive_x_first", true},
                             {"players", players}};
      std::ofstream out(dir / "meta.json", std::ios::binary);
      out << meta.dump(2) << '\n';
      if (!out) throw std::runtime_error("cannot write meta.json");
    }

    std::ofstream events(dir / "events.jsonl", std::ios::binary);
    std::ofstream tracking(dir / "tracking.jsonl", std::ios::binary);
    if (!events || !tracking) throw std::runtime_error("cannot write match files");

    const int first_half = (spec.passes_per_match + 1) / 2;
    long frame_id = 0;
    int event_no = 0;
    int passes_left_in_episode = 0;
    bool home_possession = false;  // flipped before the first episode
    int period = 0;                // forces period start handling on the first pass
    double t = 0.0;

    auto next_event_id = [&event_no] {
      ++event_no;
      std::string n = std::to_string(event_no);
      return "e" + std::string(5 - std::min<std::size_t>(5, n.size()), '0') + n;
    };

    auto emit_kickoff = [&](int p) {
      const std::string team = p == 1 ? home : away;
      nlohmann::json e = {{"event_id", next_event_id()},
                          {"team_id", team},
                          {"actor_id", synthdetail::player_id(team, 5)},
                          {"type", "pass"},
                          {"period", p},
                          {"t", 0.5},
                          {"start", {spec.pitch.length / 2.0, spec.pitch.width / 2.0}},
                          {"end", {spec.pitch.length / 2.0 - 3.0, spec.pitch.width / 2.0}},
                          {"success", true},
                          {"set_piece", "kick_off"}};
      events << e.dump() << '\n';
    };

    for (int pi = 0; pi < spec.passes_per_match; ++pi) {
      const int want_period = pi < first_half ? 1 : 2;
      if (want_period != period) {
        period = want_period;
        emit_kickoff(period);
        t = 4.0;
        passes_left_in_episode = 0;
      }
      if (passes_left_in_episode == 0) {
        passes_left_in_episode = 3 + static_cast<int>(rng.uniform_index(6));
        home_possession = !home_possession;
      }
      const std::string team = home_possession ? home : away;
      const std::string opp = home_possession ? away : home;

      double u = rng.uniform();
      int intent_idx = 0;
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        acc += spec.pass_mix[static_cast<std::size_t>(i)];
        if (u < acc) {
          intent_idx = i;
          break;
        }
        intent_idx = i;
      }
      const auto intent = static_cast<PassIntent>(intent_idx);
      const synthdetail::PassGeometry geo =
          synthdetail::draw_pass(intent, spec.defense, spec.pitch, spec.noise_sd, rng);

      const TeamFrame frame{spec.pitch, attacks_positive_x(true, team == home, period)};
      const auto start_f = frame.to_file(geo.start);
      const auto end_f = frame.to_file(geo.end);

      const int passer_slot = 1 + static_cast<int>(rng.uniform_index(10));
      const int receiver_slot = 1 + (passer_slot - 1 + 1 + static_cast<int>(rng.uniform_index(9))) % 10;
      const std::string event_id = next_event_id();

      nlohmann::json e = {{"event_id", event_id},
                          {"team_id", team},
                          {"actor_id", synthdetail::player_id(team, passer_slot)},
                          {"receiver_id", synthdetail::player_id(team, receiver_slot)},
                          {"type", "pass"},
                          {"period", period},
                          {"t", t},
                          {"start", {start_f[0], start_f[1]}},
                          {"end", {end_f[0], end_f[1]}},
                          {"success", true}};
      events << e.dump() << '\n';

      // Burst of frames centred exactly on the pass timestamp.
      std::vector<std::pair<std::string, std::array<double, 2>>> placements;
      placements.reserve(22);
      for (std::size_t di = 0; di < geo.defenders.size(); ++di) {
        placements.emplace_back(synthdetail::player_id(opp, 1 + static_cast<int>(di)),
                                frame.to_file(geo.defenders[di]));
      }
      placements.emplace_back(synthdetail::player_id(opp, 0),
                              frame.to_file({spec.pitch.width / 2.0, spec.pitch.length - 3.0}));
      placements.emplace_back(synthdetail::player_id(team, 0),
                              frame.to_file({spec.pitch.width / 2.0, 3.0}));
      int scatter = 0;
      for (int slot = 1; slot <= 10; ++slot) {
        if (slot == passer_slot || slot == receiver_slot) continue;
        placements.emplace_back(
            synthdetail::player_id(team, slot),
            frame.to_file({6.0 + 6.0 * scatter, 12.0 + 3.0 * scatter}));
        ++scatter;
      }
      placements.emplace_back(synthdetail::player_id(team, passer_slot), start_f);
      placements.emplace_back(synthdetail::player_id(team, receiver_slot), end_f);

      for (int k = -3; k <= 3; ++k) {
        tracking << "{\"frame_id\":" << frame_id << ",\"period\":" << period
                 << ",\"t\":" << fmt_double(t + static_cast<double>(k) / spec.frame_rate)
                 << ",\"ball\":[" << fmt_double(start_f[0]) << ',' << fmt_double(start_f[1])
                 << "],\"players\":[";
        for (std::size_t i = 0; i < placements.size(); ++i) {
          if (i) tracking << ',';
          tracking << "{\"id\":\"" << placements[i].first << "\",\"x\":"
                   << fmt_double(placements[i].second[0]) << ",\"y\":"
                   << fmt_double(placements[i].second[1]) << '}';
        }
        tracking << "]}\n";
        ++frame_id;
      }

      GroundTruthRow row;
      row.match_id = match_id;
      row.event_id = event_id;
      row.team_id = team;
      row.intent = intent_idx;
      row.period = period;
      row.t = t;
      {
        // Round-trip through file coordinates so the reference sees the exact
        // doubles the pipeline will parse.
        synthdetail::PassGeometry seen;
        seen.start = frame.to_canonical(start_f[0], start_f[1]);
        seen.end = frame.to_canonical(end_f[0], end_f[1]);
        seen.defenders.reserve(geo.defenders.size());
        for (const Point2D& d : geo.defenders) {
          const auto f = frame.to_file(d);
          seen.defenders.push_back(frame.to_canonical(f[0], f[1]));
        }
        row.lbs = synthdetail::ref_lbs(seen);
        row.sgm = synthdetail::ref_sgm(seen, spec.sigma, spec.rho_floor);
        row.sdi = synthdetail::ref_sdi(seen);
      }
      truth << nlohmann::json{{"match_id", row.match_id}, {"event_id", row.event_id},
                              {"team_id", row.team_id},   {"intent", to_string(intent)},
                              {"period", row.period},     {"t", row.t},
                              {"lbs", row.lbs},           {"sgm", row.sgm},
                              {"sdi", row.sdi}}
                   .dump()
            << '\n';
      ++summary.passes;

      --passes_left_in_episode;
      const bool episode_over = passes_left_in_episode == 0;
      if (episode_over && rng.bernoulli(intent == PassIntent::line_breaking ||
                                                intent == PassIntent::space_expanding
                                            ? 0.15
                                            : 0.05)) {
        const bool goal = rng.bernoulli(0.25);
        const Point2D shot_spot{spec.pitch.width / 2.0 + rng.uniform(-5.0, 5.0),
                                spec.pitch.length - 12.0 + rng.uniform(-4.0, 4.0)};
        const auto shot_f = frame.to_file(shot_spot);
        nlohmann::json shot = {{"event_id", next_event_id()},
                               {"team_id", team},
                               {"actor_id", synthdetail::player_id(team, receiver_slot)},
                               {"type", "shot"},
                               {"period", period},
                               {"t", t + 1.5},
                               {"start", {shot_f[0], shot_f[1]}},
                               {"end", {shot_f[0], shot_f[1]}},
                               {"success", goal}};
        events << shot.dump() << '\n';
        if (goal) {
          const TeamFrame opp_frame{spec.pitch, attacks_positive_x(true, opp == home, period)};
          const auto gk_f = opp_frame.to_file({spec.pitch.width / 2.0, 5.5});
          const auto out_f = opp_frame.to_file({spec.pitch.width / 2.0 - 8.0, 32.0});
          nlohmann::json gk = {{"event_id", next_event_id()},
                               {"team_id", opp},
                               {"actor_id", synthdetail::player_id(opp, 0)},
                               {"type", "pass"},
                               {"period", period},
                               {"t", t + 3.0},
                               {"start", {gk_f[0], gk_f[1]}},
                               {"end", {out_f[0], out_f[1]}},
                               {"success", true},
                               {"set_piece", "goal_kick"}};
          events << gk.dump() << '\n';
        }
      }
      t += 4.0;
    }
    if (!events || !tracking) throw std::runtime_error("write failed for match " + match_id);
  }
  if (!truth) throw std::runtime_error("ground truth write failed");
  return summary;
}

inline std::vector<GroundTruthRow> load_ground_truth(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<GroundTruthRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    GroundTruthRow r;
    r.match_id = j.at("match_id").get<std::string>();
    r.event_id = j.at("event_id").get<std::string>();
    r.team_id = j.at("team_id").get<std::string>();
    const std::string intent = j.at("intent").get<std::string>();
    for (int i = 0; i < 4; ++i) {
      if (intent == to_string(static_cast<PassIntent>(i))) r.intent = i;
    }
    r.period = j.at("period").get<int>();
    r.t = j.at("t").get<double>();
    r.lbs = j.at("lbs").get<double>();
    r.sgm = j.at("sgm").get<double>();
    r.sdi = j.at("sdi").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace passlens
