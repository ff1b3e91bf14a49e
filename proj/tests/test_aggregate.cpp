#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "passlens/aggregate.hpp"
#include "passlens/rng.hpp"

namespace passlens {
namespace {

TEST(StyleQuadrant, ZeroCountsAsPositive) {
  EXPECT_EQ(style_quadrant(0.0, 0.0), "circulatory destabilisation");
  EXPECT_EQ(style_quadrant(0.1, -0.1), "space expansion");
  EXPECT_EQ(style_quadrant(-0.1, 0.0), "destabilising progression");
  EXPECT_EQ(style_quadrant(-0.1, -0.1), "direct progression");
}

TEST(TeamStyle, SharesAndAxesFromKnownMix) {
  // 10 passes: 2 circulatory, 4 destabilising, 3 line-breaking, 1 space-expanding
  // -> x = 0.2 - 0.3 - 0.1 = -0.2, y = 0.4 - 0.1 = 0.3.
  std::vector<std::string> teams(10, "T1");
  std::vector<Archetype> arch{
      Archetype::circulatory,    Archetype::circulatory,     Archetype::destabilising,
      Archetype::destabilising,  Archetype::destabilising,   Archetype::destabilising,
      Archetype::line_breaking,  Archetype::line_breaking,   Archetype::line_breaking,
      Archetype::space_expanding};
  std::vector<OutcomeRecord> recs(10);
  recs[0].shot_in_window = true;
  recs[1].box_entry = true;
  const auto points = team_style_points(teams, arch, recs, 5);
  ASSERT_EQ(points.size(), 1u);
  const TeamStylePoint& t = points[0];
  EXPECT_EQ(t.n_passes, 10u);
  EXPECT_DOUBLE_EQ(t.shares[0], 0.2);
  EXPECT_DOUBLE_EQ(t.shares[1], 0.4);
  EXPECT_DOUBLE_EQ(t.shares[2], 0.3);
  EXPECT_DOUBLE_EQ(t.shares[3], 0.1);
  EXPECT_NEAR(t.x_style, -0.2, 1e-15);
  EXPECT_NEAR(t.y_style, 0.3, 1e-15);
  EXPECT_EQ(t.quadrant, "destabilising progression");
  EXPECT_DOUBLE_EQ(t.p_shot, 0.1);
  EXPECT_DOUBLE_EQ(t.p_box, 0.1);
  EXPECT_TRUE(t.reliable);
  EXPECT_FALSE(team_style_points(teams, arch, recs, 11)[0].reliable);
}

TEST(TeamStyle, TeamsEmittedInIdOrder) {
  std::vector<std::string> teams{"B", "A", "B", "A"};
  std::vector<Archetype> arch(4, Archetype::circulatory);
  std::vector<OutcomeRecord> recs(4);
  const auto points = team_style_points(teams, arch, recs, 0);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].team_id, "A");
  EXPECT_EQ(points[1].team_id, "B");
  EXPECT_THROW(team_style_points(teams, arch, std::vector<OutcomeRecord>(3), 0),
               std::invalid_argument);
}

TEST(Heatmap, CountsConservePasses) {
  Rng rng(2);
  const Pitch pitch;
  std::vector<Point2D> pts;
  std::vector<double> tiv;
  for (int i = 0; i < 500; ++i) {
    pts.push_back({rng.uniform(0, 68), rng.uniform(0, 105)});
    tiv.push_back(rng.gaussian());
  }
  const HeatmapGrid g = tiv_heatmap(pts, tiv, pitch, 8, 12, 10);
  EXPECT_EQ(g.total_count(), 500u);
}

TEST(Heatmap, EdgesClampIntoTheLastCell) {
  const Pitch pitch;
  HeatmapGrid g(8, 12, 1);
  g.add({68.0, 105.0}, 1.0, pitch);  // far corner
  g.add({0.0, 0.0}, 2.0, pitch);     // origin corner
  g.add({-0.5, 106.0}, 3.0, pitch);  // tolerated out-of-bounds clamps per axis
  EXPECT_EQ(g.count_at(7, 11), 1u);
  EXPECT_EQ(g.count_at(0, 0), 1u);
  EXPECT_EQ(g.count_at(0, 11), 1u);
  EXPECT_EQ(g.total_count(), 3u);
}

TEST(Heatmap, CellMath) {
  const Pitch pitch;
  HeatmapGrid g(8, 12, 2);
  // Cell width 8.5 m, cell length 8.75 m.
  g.add({8.4, 0.0}, 1.0, pitch);
  g.add({8.5, 0.0}, 5.0, pitch);  // boundary goes to the next cell
  EXPECT_EQ(g.count_at(0, 0), 1u);
  EXPECT_EQ(g.count_at(1, 0), 1u);
  EXPECT_DOUBLE_EQ(g.mean_at(1, 0), 5.0);
  EXPECT_DOUBLE_EQ(g.mean_at(3, 3), 0.0);  // empty cell reports 0
  EXPECT_FALSE(g.reliable_at(1, 0));
  g.add({8.6, 0.0}, 3.0, pitch);
  EXPECT_TRUE(g.reliable_at(1, 0));
  EXPECT_DOUBLE_EQ(g.mean_at(1, 0), 4.0);
  EXPECT_THROW(HeatmapGrid(0, 12, 1), std::invalid_argument);
}

std::vector<PassEvent> passes_for(const std::vector<std::pair<std::string, std::string>>& pr) {
  std::vector<PassEvent> out;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    PassEvent p;
    p.pass_id = "p" + std::to_string(i);
    p.team_id = "T1";
    p.passer_id = pr[i].first;
    p.receiver_id = pr[i].second;
    p.snapshot = DefensiveSnapshot::of({{34, 50}});
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<StructuralFeatures> features_with_tiv(const std::vector<double>& tiv) {
  std::vector<StructuralFeatures> fs(tiv.size());
  for (std::size_t i = 0; i < tiv.size(); ++i) {
    fs[i].tiv = tiv[i];
    fs[i].lbs = static_cast<int>(i);
    fs[i].sgm = 2.0 * static_cast<double>(i);
    fs[i].sdi = -1.0 * static_cast<double>(i);
  }
  return fs;
}

TEST(Players, AggregatesAndConservation) {
  const auto passes = passes_for({{"a", "b"}, {"a", "c"}, {"b", "a"}, {"a", "b"}});
  const auto fs = features_with_tiv({1.0, 2.0, 4.0, 3.0});
  const std::vector<int> clusters{0, 1, 0, 1};
  const auto profiles = player_profiles(passes, fs, clusters, 4);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(profiles[0].player_id, "a");  // cum 6 > 4
  EXPECT_EQ(profiles[0].n_passes, 3u);
  EXPECT_DOUBLE_EQ(profiles[0].cum_tiv, 6.0);
  EXPECT_DOUBLE_EQ(profiles[0].mean_tiv, 2.0);
  EXPECT_DOUBLE_EQ(profiles[0].mean_lbs, (0.0 + 1.0 + 3.0) / 3.0);
  EXPECT_DOUBLE_EQ(profiles[0].cluster_shares[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(profiles[0].cluster_shares[1], 2.0 / 3.0);
  EXPECT_EQ(profiles[1].player_id, "b");
  double cum = 0.0, total = 0.0;
  for (const auto& p : profiles) cum += p.cum_tiv;
  for (const auto& f : fs) total += f.tiv;
  EXPECT_NEAR(cum, total, 1e-12);
}

TEST(Duos, DeltaAgainstPasserBaseline) {
  // Passer a: pair (a,b) has tiv {1, 3}, pair (a,c) has {5}; baseline 3.
  const auto passes = passes_for({{"a", "b"}, {"a", "b"}, {"a", "c"}});
  const auto fs = features_with_tiv({1.0, 3.0, 5.0});
  std::vector<OutcomeRecord> recs(3);
  recs[2].box_entry = true;
  const auto duos = duo_delta_tiv(passes, fs, recs, 1);
  ASSERT_EQ(duos.size(), 2u);
  EXPECT_EQ(duos[0].receiver_id, "c");  // delta +2 sorts first
  EXPECT_DOUBLE_EQ(duos[0].delta_tiv, 2.0);
  EXPECT_DOUBLE_EQ(duos[0].passer_mean_tiv, 3.0);
  EXPECT_DOUBLE_EQ(duos[0].rates.p_box, 1.0);
  EXPECT_EQ(duos[1].receiver_id, "b");
  EXPECT_DOUBLE_EQ(duos[1].delta_tiv, -1.0);
  EXPECT_EQ(duos[1].n, 2u);
}

TEST(Duos, WeightedDeltasBalancePerPasser) {
  Rng rng(31);
  std::vector<std::pair<std::string, std::string>> pr;
  std::vector<double> tiv;
  const char* names[] = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 400; ++i) {
    const char* passer = names[rng.uniform_index(5)];
    const char* receiver = names[rng.uniform_index(5)];
    if (receiver == passer) receiver = names[(rng.uniform_index(4) + 1) % 5];
    pr.emplace_back(passer, receiver);
    tiv.push_back(rng.gaussian(0.0, 1.0));
  }
  const auto passes = passes_for(pr);
  const auto fs = features_with_tiv(tiv);
  const std::vector<OutcomeRecord> recs(pr.size());
  const auto duos = duo_delta_tiv(passes, fs, recs, 0);
  std::map<std::string, double> balance;
  for (const DuoRecord& d : duos) {
    balance[d.passer_id] += static_cast<double>(d.n) * d.delta_tiv;
  }
  for (const auto& [passer, sum] : balance) EXPECT_NEAR(sum, 0.0, 1e-9);
}

TEST(Duos, MinCountFiltersPairsNotBaseline) {
  const auto passes = passes_for({{"a", "b"}, {"a", "b"}, {"a", "c"}});
  const auto fs = features_with_tiv({1.0, 3.0, 11.0});
  const std::vector<OutcomeRecord> recs(3);
  const auto duos = duo_delta_tiv(passes, fs, recs, 2);
  ASSERT_EQ(duos.size(), 1u);
  EXPECT_EQ(duos[0].receiver_id, "b");
  // Baseline still includes the dropped (a, c) pass: mean = 5.
  EXPECT_DOUBLE_EQ(duos[0].passer_mean_tiv, 5.0);
  EXPECT_DOUBLE_EQ(duos[0].delta_tiv, 2.0 - 5.0);
}

TEST(Projection, RankOneDataIsExplainedByOneAxis) {
  std::vector<std::array<double, 3>> z;
  for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) z.push_back({s, 2 * s, 3 * s});
  const Projection p = project_2d(z);
  EXPECT_NEAR(p.explained_variance_ratio[0], 1.0, 1e-12);
  EXPECT_NEAR(p.explained_variance_ratio[1], 0.0, 1e-12);
  const double inv = 1.0 / std::sqrt(14.0);
  EXPECT_NEAR(p.components[0][0], inv, 1e-9);
  EXPECT_NEAR(p.components[0][1], 2 * inv, 1e-9);
  EXPECT_NEAR(p.components[0][2], 3 * inv, 1e-9);  // largest loading positive
  // Distances along the line are preserved.
  EXPECT_NEAR(p.coords[4][0] - p.coords[0][0], 4.0 * std::sqrt(14.0), 1e-9);
}

TEST(Projection, IsotropicDataSplitsVarianceEvenly) {
  std::vector<std::array<double, 3>> z;
  for (int axis = 0; axis < 3; ++axis) {
    for (double s : {-1.0, 1.0}) {
      std::array<double, 3> v{0, 0, 0};
      v[static_cast<std::size_t>(axis)] = s;
      z.push_back(v);
    }
  }
  const Projection p = project_2d(z);
  EXPECT_NEAR(p.explained_variance_ratio[0] + p.explained_variance_ratio[1], 2.0 / 3.0, 1e-12);
}

TEST(Projection, PlanarDataKeepsPairwiseDistances) {
  Rng rng(8);
  std::vector<std::array<double, 3>> z;
  for (int i = 0; i < 60; ++i) {
    const double a = rng.gaussian(), b = rng.gaussian();
    // Plane spanned by (1,0,1)/sqrt(2) and (0,1,0).
    z.push_back({a / std::sqrt(2.0), b, a / std::sqrt(2.0)});
  }
  const Projection p = project_2d(z);
  EXPECT_NEAR(p.explained_variance_ratio[0] + p.explained_variance_ratio[1], 1.0, 1e-9);
  for (std::size_t i = 0; i < z.size(); i += 7) {
    for (std::size_t j = i + 1; j < z.size(); j += 11) {
      const double d3 = std::sqrt(squared_dist3(z[i], z[j]));
      const double dx = p.coords[i][0] - p.coords[j][0];
      const double dy = p.coords[i][1] - p.coords[j][1];
      EXPECT_NEAR(std::sqrt(dx * dx + dy * dy), d3, 1e-6);
    }
  }
}

TEST(Projection, DegenerateInputFallsBackToAxes) {
  const std::vector<std::array<double, 3>> z(5, {1.0, 2.0, 3.0});
  const Projection p = project_2d(z);
  EXPECT_DOUBLE_EQ(p.explained_variance_ratio[0], 0.0);
  EXPECT_DOUBLE_EQ(p.coords[0][0], 0.0);
  EXPECT_DOUBLE_EQ(p.coords[0][1], 0.0);
  EXPECT_THROW(project_2d({}), std::invalid_argument);
}

TEST(Projection, DeterministicSigns) {
  Rng rng(77);
  std::vector<std::array<double, 3>> z;
  for (int i = 0; i < 200; ++i) z.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
  const Projection a = project_2d(z);
  const Projection b = project_2d(z);
  EXPECT_EQ(a.components, b.components);
  for (int r = 0; r < 2; ++r) {
    int arg = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(a.components[r][i]) > std::abs(a.components[r][arg])) arg = i;
    }
    EXPECT_GT(a.components[r][arg], 0.0);
  }
}

}  // namespace
}  // namespace passlens
