#include <gtest/gtest.h>

#include <vector>

#include "passlens/outcomes.hpp"

namespace passlens {
namespace {

const MatchInfo kMatch{"m1", Pitch{}, "H", "A", true};

PassEvent pass_at(Point2D start, Point2D end, double t = 100.0) {
  PassEvent p;
  p.pass_id = "p";
  p.match_id = "m1";
  p.team_id = "H";
  p.passer_id = "h1";
  p.receiver_id = "h2";
  p.period = 1;
  p.t = t;
  p.start = start;
  p.end = end;
  p.snapshot = DefensiveSnapshot::of({{34, 50}});
  return p;
}

// Home attacks +x in period 1, so canonical (x, y) sits at file (y, x).
OutcomeEvent event(const std::string& team, const std::string& type, double t, Point2D canonical,
                   bool success = true, bool set_piece = false) {
  OutcomeEvent e;
  static int id = 0;
  e.event_id = "oe" + std::to_string(++id);
  e.team_id = team;
  e.type = type;
  e.period = 1;
  e.t = t;
  e.success = success;
  e.set_piece = set_piece;
  e.start_xy = {canonical.y, canonical.x};
  e.end_xy = {canonical.y, canonical.x};
  return e;
}

TEST(Outcomes, PassItselfCanEnterTheThird) {
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 75})}, {});
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_TRUE(recs[0].final_third_entry);
  EXPECT_FALSE(recs[0].box_entry);
  EXPECT_FALSE(recs[0].shot_in_window);
}

TEST(Outcomes, EndingOnTheLineIsNotAnEntry) {
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 70})}, {});
  EXPECT_FALSE(recs[0].final_third_entry);
}

TEST(Outcomes, EntryRequiresStartingOutsideTheZone) {
  // Released beyond the line: later touches deeper in do not count as entries.
  const auto recs = annotate_outcomes(
      kMatch, {pass_at({34, 75}, {34, 90})},
      {event("H", "carry", 103.0, {34, 95})});
  EXPECT_FALSE(recs[0].final_third_entry);
  // Box entry is still possible: the ball started outside the box.
  EXPECT_TRUE(recs[0].box_entry);
}

TEST(Outcomes, LaterTeammateTouchCountsWithinWindow) {
  const std::vector<OutcomeEvent> events{event("H", "carry", 109.9, {34, 72})};
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})}, events);
  EXPECT_TRUE(recs[0].final_third_entry);
}

TEST(Outcomes, WindowBoundaryIsInclusive) {
  EXPECT_TRUE(annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})},
                                {event("H", "carry", 110.0, {34, 72})})[0]
                  .final_third_entry);
  EXPECT_FALSE(annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})},
                                 {event("H", "carry", 110.01, {34, 72})})[0]
                   .final_third_entry);
}

TEST(Outcomes, EventAtExactlyThePassTimeIsNotInTheWindow) {
  EXPECT_FALSE(annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})},
                                 {event("H", "carry", 100.0, {34, 72})})[0]
                   .final_third_entry);
}

TEST(Outcomes, WindowStopsAtPeriodBoundary) {
  std::vector<OutcomeEvent> events{event("H", "carry", 3.0, {34, 72})};
  events[0].period = 2;
  const auto recs =
      annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50}, 100.0)}, events);
  EXPECT_FALSE(recs[0].final_third_entry);
}

TEST(Outcomes, SuccessfulOpponentActionTruncatesTheWindow) {
  const std::vector<OutcomeEvent> events{
      event("A", "pass", 102.0, {20, 40}, true),
      event("H", "carry", 105.0, {34, 72}),
  };
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})}, events);
  EXPECT_FALSE(recs[0].final_third_entry);
}

TEST(Outcomes, FailedOpponentActionDoesNotTruncate) {
  const std::vector<OutcomeEvent> events{
      event("A", "interception", 102.0, {20, 40}, false),
      event("H", "carry", 105.0, {34, 72}),
  };
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})}, events);
  EXPECT_TRUE(recs[0].final_third_entry);
}

TEST(Outcomes, OpponentSetPieceTruncatesEvenIfUnsuccessful) {
  const std::vector<OutcomeEvent> events{
      event("A", "pass", 102.0, {20, 40}, false, true),
      event("H", "carry", 105.0, {34, 72}),
  };
  const auto recs = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})}, events);
  EXPECT_FALSE(recs[0].final_third_entry);
}

TEST(Outcomes, ShotAndGoalFlags) {
  const auto miss = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})},
                                      {event("H", "shot", 104.0, {34, 95}, false)});
  EXPECT_TRUE(miss[0].shot_in_window);
  EXPECT_FALSE(miss[0].goal_in_window);
  const auto scored = annotate_outcomes(kMatch, {pass_at({34, 30}, {34, 50})},
                                        {event("H", "shot", 104.0, {34, 95}, true)});
  EXPECT_TRUE(scored[0].shot_in_window);
  EXPECT_TRUE(scored[0].goal_in_window);
}

TEST(Outcomes, BoxEntryGatedOnStartingOutside) {
  // Start already inside the box.
  const auto inside = annotate_outcomes(kMatch, {pass_at({34, 100}, {30, 95})}, {});
  EXPECT_FALSE(inside[0].box_entry);
  const auto entering = annotate_outcomes(kMatch, {pass_at({34, 80}, {30, 95})}, {});
  EXPECT_TRUE(entering[0].box_entry);
}

TEST(Outcomes, AwayTeamUsesItsOwnFrame) {
  // Away attacks -x in period 1; canonical (34, 75) maps to file (30, 34).
  PassEvent p = pass_at({34, 30}, {34, 50});
  p.team_id = "A";
  OutcomeEvent e;
  e.event_id = "x";
  e.team_id = "A";
  e.type = "carry";
  e.period = 1;
  e.t = 103.0;
  e.success = true;
  e.start_xy = {30.0, 34.0};
  e.end_xy = {30.0, 34.0};
  const auto recs = annotate_outcomes(kMatch, {p}, {e});
  EXPECT_TRUE(recs[0].final_third_entry);
}

TEST(Outcomes, RatesAreSimpleFractions) {
  std::vector<OutcomeRecord> recs(4);
  recs[0].final_third_entry = true;
  recs[1].final_third_entry = true;
  recs[2].box_entry = true;
  recs[3].shot_in_window = true;
  recs[3].goal_in_window = true;
  std::vector<const OutcomeRecord*> ptrs;
  for (const auto& r : recs) ptrs.push_back(&r);
  const OutcomeRates rates = outcome_rates(ptrs);
  EXPECT_EQ(rates.n, 4u);
  EXPECT_DOUBLE_EQ(rates.p_final_third, 0.5);
  EXPECT_DOUBLE_EQ(rates.p_box, 0.25);
  EXPECT_DOUBLE_EQ(rates.p_shot, 0.25);
  EXPECT_DOUBLE_EQ(rates.p_goal, 0.25);
  EXPECT_EQ(outcome_rates({}).n, 0u);
}

TEST(Quantiles, PopulationsDifferByAtMostOne) {
  for (const auto& [n, q] : std::vector<std::pair<int, int>>{{11, 5}, {100, 5}, {7, 3}, {23, 4}}) {
    std::vector<OutcomeRecord> recs(static_cast<std::size_t>(n));
    std::vector<double> tiv;
    for (int i = 0; i < n; ++i) tiv.push_back(static_cast<double>(i % 13) - 6.0);
    const auto rows = outcome_rates_by_tiv_quantile(recs, tiv, q);
    ASSERT_EQ(rows.size(), static_cast<std::size_t>(q));
    std::size_t total = 0, lo = recs.size(), hi = 0;
    for (const QuantileRow& r : rows) {
      total += r.n;
      lo = std::min(lo, r.n);
      hi = std::max(hi, r.n);
    }
    EXPECT_EQ(total, static_cast<std::size_t>(n));
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(Quantiles, BinsAscendByImpactValue) {
  std::vector<OutcomeRecord> recs(11);
  std::vector<double> tiv;
  for (int i = 0; i < 11; ++i) tiv.push_back(static_cast<double>(10 - i));  // descending input
  recs[10].final_third_entry = true;  // lowest tiv (0) -> first bin
  recs[0].final_third_entry = true;   // highest tiv (10) -> last bin
  const auto rows = outcome_rates_by_tiv_quantile(recs, tiv, 5);
  EXPECT_EQ(rows[0].bin, 1);
  EXPECT_EQ(rows[0].n, 2u);
  EXPECT_EQ(rows[4].n, 3u);  // 11 = 2+2+2+2+3
  EXPECT_DOUBLE_EQ(rows[0].tiv_lo, 0.0);
  EXPECT_DOUBLE_EQ(rows[0].tiv_hi, 1.0);
  EXPECT_DOUBLE_EQ(rows[4].tiv_hi, 10.0);
  EXPECT_DOUBLE_EQ(rows[0].rates.p_final_third, 0.5);
  EXPECT_DOUBLE_EQ(rows[4].rates.p_final_third, 1.0 / 3.0);
  for (std::size_t b = 1; b < rows.size(); ++b) EXPECT_GE(rows[b].tiv_lo, rows[b - 1].tiv_hi);
}

TEST(Quantiles, ArgumentChecks) {
  std::vector<OutcomeRecord> recs(5);
  std::vector<double> tiv{1, 2, 3, 4, 5};
  EXPECT_THROW(outcome_rates_by_tiv_quantile(recs, {1, 2}, 2), std::invalid_argument);
  EXPECT_THROW(outcome_rates_by_tiv_quantile(recs, tiv, 1), std::invalid_argument);
  EXPECT_THROW(outcome_rates_by_tiv_quantile(recs, tiv, 6), std::invalid_argument);
  EXPECT_NO_THROW(outcome_rates_by_tiv_quantile(recs, tiv, 5));
}

TEST(Outcomes, NegativeWindowRejected) {
  EXPECT_THROW(annotate_outcomes(kMatch, {}, {}, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace passlens
