#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "ifslab/errors.hpp"
#include "ifslab/experiments.hpp"
#include "ifslab/stationary_measures.hpp"

using namespace ifslab;

namespace {

bool same_tables(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.tables.size() != b.tables.size()) return false;
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    if (a.tables[i].first != b.tables[i].first) return false;
    if (a.tables[i].second.columns != b.tables[i].second.columns) return false;
    const auto& ra = a.tables[i].second.rows;
    const auto& rb = b.tables[i].second.rows;
    if (ra.size() != rb.size()) return false;
    for (std::size_t r = 0; r < ra.size(); ++r)
      for (std::size_t c = 0; c < ra[r].size(); ++c)
        if (std::memcmp(&ra[r][c], &rb[r][c], sizeof(double)) != 0) return false;
  }
  return a.aggregates == b.aggregates && a.config == b.config;
}

}  // namespace

TEST(DecadeCheckpoints, Examples) {
  EXPECT_EQ(decade_checkpoints(1000), (std::vector<std::uint64_t>{10, 100, 1000}));
  EXPECT_EQ(decade_checkpoints(250), (std::vector<std::uint64_t>{10, 100, 250}));
  EXPECT_EQ(decade_checkpoints(5), (std::vector<std::uint64_t>{5}));
  EXPECT_TRUE(decade_checkpoints(0).empty());
}

TEST(Sync, NegativeExponentSynchronizes) {
  const auto r = sync_experiment(make_system(3, 2, 0.5), 1000, 2000, 1);
  EXPECT_GE(r.aggregate("fraction_final_below_1e-6"), 0.95);
  EXPECT_EQ(r.table("trials").rows.size(), 1000u);
  EXPECT_EQ(r.table("curve").rows.back()[0], 2000.0);
}

TEST(Sync, DiagonalStaysAtZero) {
  const auto r = sync_experiment(make_system(3, 2, 0.5), 5, 500, 2, PairStart{0.3, 0.3});
  EXPECT_EQ(r.aggregate("fraction_final_below_1e-12"), 1.0);
  EXPECT_EQ(r.aggregate("fraction_reached_1e-6"), 1.0);
  const auto& t = r.table("trials");
  const auto hit = t.column("first_time_below_1e-6");
  for (const auto& row : t.rows) EXPECT_EQ(row[hit], 0.0);
}

TEST(Sync, Reproducible) {
  const auto s = make_system(4, 3, 0.45);
  EXPECT_TRUE(same_tables(sync_experiment(s, 50, 300, 9), sync_experiment(s, 50, 300, 9)));
  EXPECT_FALSE(same_tables(sync_experiment(s, 50, 300, 9), sync_experiment(s, 50, 300, 10)));
}

TEST(Sync, RegimeGate) {
  EXPECT_THROW(sync_experiment(make_system(2, 2, 0.5), 10, 10, 1), PreconditionError);
  EXPECT_THROW(sync_experiment(make_system(2, 3, 0.5), 10, 10, 1), PreconditionError);
  EXPECT_THROW(sync_experiment(make_system(3, 2, 0.5), 0, 10, 1), DomainError);
}

TEST(Intermittency, DiagonalIsAlwaysClose) {
  const auto r = intermittency_experiment(make_system(2, 2, 0.5), 0.1, 0.5, 1000, 3, 1, PairStart{0.4, 0.4});
  for (const auto& row : r.table("curve").rows) EXPECT_EQ(row[1], 1.0);
  const auto& t = r.table("trials");
  for (const auto& row : t.rows) EXPECT_EQ(row[t.column("excursions")], 0.0);
}

TEST(Intermittency, CloseFractionGrows) {
  const auto r = intermittency_experiment(make_system(2, 2, 0.5), 0.1, 0.5, 1'000'000, 40, 3);
  EXPECT_GT(r.aggregate("median_F@1000000"), r.aggregate("median_F@10000"));
}

TEST(Intermittency, ExcursionsRecur) {
  const auto r = intermittency_experiment(make_system(3, 3, 0.5), 0.1, 0.5, 200'000, 40, 4);
  EXPECT_GE(r.aggregate("fraction_nonmerged_with_excursion"), 0.9);
  EXPECT_EQ(r.aggregate("merged_trials") + r.aggregate("nonmerged_trials"), 40.0);
}

TEST(Intermittency, Preconditions) {
  EXPECT_THROW(intermittency_experiment(make_system(3, 2, 0.5), 0.1, 0.5, 10, 1, 1), PreconditionError);
  const auto s = make_system(2, 2, 0.5);
  EXPECT_THROW(intermittency_experiment(s, 0.0, 0.5, 10, 1, 1), DomainError);
  EXPECT_THROW(intermittency_experiment(s, 0.1, 1.0, 10, 1, 1), DomainError);
  EXPECT_THROW(intermittency_experiment(s, 0.1, 0.5, 0, 1, 1), DomainError);
}

TEST(Divergence, WholeSquareHasFullMass) {
  const auto r = divergence_experiment(make_system(3, 3, 0.6), {1.0, 2.0}, 1000, 2, 1);
  const auto& t = r.table("p_eps");
  for (const auto& row : t.rows) {
    EXPECT_EQ(row[t.column("p_hat")], 1.0);
    EXPECT_DOUBLE_EQ(row[t.column("analytic")], 1.0);
  }
}

TEST(Divergence, IndependentCaseDecreasesWithoutOverlay) {
  std::vector<double> grid;
  for (int m = 1; m <= 5; ++m) grid.push_back(std::pow(3.0, -m));
  const auto r = divergence_experiment(make_system(2, 3, 0.5), grid, 200'000, 4, 2);
  const auto& t = r.table("p_eps");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"eps", "p_hat", "stderr"}));
  for (std::size_t j = 1; j < t.rows.size(); ++j) EXPECT_LT(t.rows[j][1], t.rows[j - 1][1]);
  EXPECT_FALSE(r.aggregates.contains("exponent"));
}

TEST(Divergence, DependentCaseTracksAnalyticCurve) {
  std::vector<double> grid;
  for (int m = 1; m <= 4; ++m) grid.push_back(std::pow(3.0, -m));
  const auto r = divergence_experiment(make_system(3, 3, 0.6), grid, 1'000'000, 8, 3);
  EXPECT_NEAR(r.aggregate("exponent"), -std::log(2.0 / 3.0) / std::log(3.0), 1e-12);
  const auto& t = r.table("p_eps");
  for (const auto& row : t.rows) {
    const double se = row[t.column("stderr")];
    EXPECT_LT(std::abs(row[1] - row[t.column("analytic")]), std::max(4 * se, 0.01));
  }
}

TEST(Divergence, Preconditions) {
  EXPECT_THROW(divergence_experiment(make_system(2, 2, 0.5), {0.1}, 10, 1, 1), PreconditionError);
  const auto s = make_system(2, 3, 0.5);
  EXPECT_THROW(divergence_experiment(s, {}, 10, 1, 1), DomainError);
  EXPECT_THROW(divergence_experiment(s, {0.0}, 10, 1, 1), DomainError);
  EXPECT_THROW(divergence_experiment(s, {0.1}, 0, 1, 1), DomainError);
}

TEST(Equidistribution, PassesInEveryRegime) {
  // (3,3) stands in for the zero regime: with M and N powers of two every map is
  // exact in binary and orbits collapse onto coarse dyadic grids in double precision.
  for (const auto& s : {make_system(3, 2, 0.5), make_system(3, 3, 0.5), make_system(2, 3, 0.5)}) {
    const auto r = equidistribution_test(s, 20, 1'000'000, 5);
    EXPECT_EQ(r.aggregate("pass"), 1.0) << s.M << " " << s.N << " dev " << r.aggregate("sup_deviation");
    double total = 0.0;
    for (const auto& row : r.table("bins").rows) total += row[2];
    EXPECT_EQ(total, 1'000'000.0);
  }
}

TEST(Equidistribution, RejectsDegenerateInput) {
  const auto s = make_system(3, 2, 0.5);
  EXPECT_THROW(equidistribution_test(s, 20, 0, 1), DomainError);
  EXPECT_THROW(equidistribution_test(s, 1, 10, 1), DomainError);
}

TEST(TwoPointHistogram, SingleCellHoldsEverything) {
  const auto r = two_point_histogram(make_system(3, 9, 0.5), 1, 12345, 1);
  const auto& t = r.table("counts");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][2], 12345.0);
}

TEST(TwoPointHistogram, DiagonalDominatesAndMatchesAnalytic) {
  const auto r = two_point_histogram(make_system(3, 9, 0.5), 9, 2'000'000, 2);
  EXPECT_EQ(r.aggregate("fraction_diagonal_dominant"), 1.0);
  EXPECT_EQ(r.aggregate("kappa"), 3.0);
  EXPECT_GT(r.aggregate("cells_above_1e-3"), 9.0);
  EXPECT_LT(r.aggregate("max_relative_error"), 0.05);
}

TEST(TwoPointHistogram, Preconditions) {
  EXPECT_THROW(two_point_histogram(make_system(3, 2, 0.5), 9, 10, 1), PreconditionError);
  EXPECT_THROW(two_point_histogram(make_system(2, 2, 0.5), 9, 10, 1), PreconditionError);
  EXPECT_THROW(two_point_histogram(make_system(3, 9, 0.5), 0, 10, 1), DomainError);
  const auto r = two_point_histogram(make_system(2, 3, 0.5), 8, 1000, 1);
  EXPECT_FALSE(r.aggregates.contains("max_relative_error"));
}

TEST(WalkOccupation, SumsToOne) {
  const auto f = walk_occupation(0.7, 1, 1, 10000, 20, 3);
  double s = 0.0;
  for (double v : f) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_THROW(walk_occupation(0.7, 1, 1, 0, 20, 3), DomainError);
}

TEST(Report, LookupErrors) {
  const auto r = equidistribution_test(make_system(3, 2, 0.5), 4, 100, 1);
  EXPECT_THROW(r.table("nope"), DomainError);
  EXPECT_THROW(r.aggregate("nope"), DomainError);
  EXPECT_THROW(r.table("bins").column("nope"), DomainError);
}
