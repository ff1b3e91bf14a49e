#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "passlens/geometry.hpp"
#include "passlens/types.hpp"

namespace passlens {

/// Minimal on-ball event retained for outcome attribution. Coordinates stay
/// in file frame; they are mapped into the possessing team's canonical frame
/// per analysed pass.
struct OutcomeEvent {
  std::string event_id;
  std::string team_id;
  std::string type;
  int period = 1;
  double t = 0.0;
  bool success = false;
  bool set_piece = false;
  std::array<double, 2> start_xy{0.0, 0.0};
  std::array<double, 2> end_xy{0.0, 0.0};
};

struct OutcomeRecord {
  std::string pass_id;
  bool final_third_entry = false;
  bool box_entry = false;
  bool shot_in_window = false;
  bool goal_in_window = false;
  double window_s = 0.0;
};

/// Flags what the passing team achieved within `window_s` seconds after each
/// pass. The window is truncated at the first successful opposing action or
/// set piece awarded to the opponent, and never crosses a period boundary.
/// Entries require the ball to start outside the zone: a pass released beyond
/// the final-third line cannot re-enter it.
inline std::vector<OutcomeRecord> annotate_outcomes(const MatchInfo& match,
                                                    const std::vector<PassEvent>& passes,
                                                    std::vector<OutcomeEvent> events,
                                                    double window_s = 10.0) {
  if (window_s < 0.0) throw std::invalid_argument("annotate_outcomes: window must be >= 0");
  std::sort(events.begin(), events.end(), [](const OutcomeEvent& a, const OutcomeEvent& b) {
    if (a.period != b.period) return a.period < b.period;
    if (a.t != b.t) return a.t < b.t;
    return a.event_id < b.event_id;
  });

  const double line = match.pitch.final_third_line();
  std::vector<OutcomeRecord> out;
  out.reserve(passes.size());
  for (const PassEvent& p : passes) {
    OutcomeRecord rec;
    rec.pass_id = p.pass_id;
    rec.window_s = window_s;
    const TeamFrame frame = match.frame_for(p.team_id, p.period);

    const bool start_outside_third = p.start.y <= line;
    const bool start_outside_box = !match.pitch.in_box(p.start);
    if (start_outside_third && match.pitch.in_final_third(p.end)) rec.final_third_entry = true;
    if (start_outside_box && match.pitch.in_box(p.end)) rec.box_entry = true;

    auto touch = [&](const Point2D& loc) {
      if (start_outside_third && match.pitch.in_final_third(loc)) rec.final_third_entry = true;
      if (start_outside_box && match.pitch.in_box(loc)) rec.box_entry = true;
    };

    auto it = std::upper_bound(
        events.begin(), events.end(), std::make_pair(p.period, p.t),
        [](const std::pair<int, double>& key, const OutcomeEvent& e) {
          if (key.first != e.period) return key.first < e.period;
          return key.second < e.t;
        });
    for (; it != events.end(); ++it) {
      const OutcomeEvent& e = *it;
      if (e.period != p.period || e.t > p.t + window_s) break;
      if (e.team_id != p.team_id) {
        if (e.success || e.set_piece) break;  // possession lost
        continue;
      }
      touch(frame.to_canonical(e.start_xy[0], e.start_xy[1]));
      touch(frame.to_canonical(e.end_xy[0], e.end_xy[1]));
      if (e.type == "shot") {
        rec.shot_in_window = true;
        if (e.success) rec.goal_in_window = true;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

struct OutcomeRates {
  std::size_t n = 0;
  double p_final_third = 0.0;
  double p_box = 0.0;
  double p_shot = 0.0;
  double p_goal = 0.0;
};

inline OutcomeRates outcome_rates(const std::vector<const OutcomeRecord*>& records) {
  OutcomeRates r;
  r.n = records.size();
  if (r.n == 0) return r;
  for (const OutcomeRecord* rec : records) {
    r.p_final_third += rec->final_third_entry ? 1.0 : 0.0;
    r.p_box += rec->box_entry ? 1.0 : 0.0;
    r.p_shot += rec->shot_in_window ? 1.0 : 0.0;
    r.p_goal += rec->goal_in_window ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(r.n);
  r.p_final_third /= n;
  r.p_box /= n;
  r.p_shot /= n;
  r.p_goal /= n;
  return r;
}

struct QuantileRow {
  int bin = 0;  // 1-based, ascending impact value
  std::size_t n = 0;
  double tiv_lo = 0.0;
  double tiv_hi = 0.0;
  OutcomeRates rates;
};

/// Splits passes into q quantile bins by impact value (stable order breaks
/// ties, so bin populations differ by at most one) and reports outcome rates
/// per bin.
inline std::vector<QuantileRow> outcome_rates_by_tiv_quantile(
    const std::vector<OutcomeRecord>& records, const std::vector<double>& tiv, int q) {
  if (records.size() != tiv.size())
    throw std::invalid_argument("outcome_rates_by_tiv_quantile: size mismatch");
  if (q < 2) throw std::invalid_argument("outcome_rates_by_tiv_quantile: q must be >= 2");
  if (static_cast<std::size_t>(q) > records.size())
    throw std::invalid_argument("outcome_rates_by_tiv_quantile: more bins than passes");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&tiv](std::size_t a, std::size_t b) { return tiv[a] < tiv[b]; });

  std::vector<QuantileRow> rows;
  rows.reserve(static_cast<std::size_t>(q));
  const std::size_t n = records.size();
  for (int b = 0; b < q; ++b) {
    const std::size_t begin = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(q);
    const std::size_t end = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(q);
    QuantileRow row;
    row.bin = b + 1;
    row.n = end - begin;
    row.tiv_lo = tiv[order[begin]];
    row.tiv_hi = tiv[order[end - 1]];
    std::vector<const OutcomeRecord*> bucket;
    bucket.reserve(row.n);
    for (std::size_t i = begin; i < end; ++i) bucket.push_back(&records[order[i]]);
    row.rates = outcome_rates(bucket);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace passlens
