#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gen.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/experiments.hpp"
#include "ifslab/stationary_measures.hpp"

using namespace ifslab;

namespace {

// Stationary law of the reflected walk truncated to states 0..S-1, by a dense solve.
std::vector<double> truncated_chain_law(double p0, int k, int l, int S) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    P(s, std::max(0, s - k)) += p0;
    P(s, std::min(S - 1, s + l)) += 1.0 - p0;
  }
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(S, S);
  A.row(S - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
  rhs[S - 1] = 1.0;
  const Eigen::VectorXd pi = A.partialPivLu().solve(rhs);
  return {pi.data(), pi.data() + S};
}

std::vector<double> powers(double base, int from, int to) {
  std::vector<double> v;
  for (int m = from; m <= to; ++m) v.push_back(std::pow(base, -m));
  return v;
}

}  // namespace

TEST(MultDependence, Examples) {
  const auto a = mult_dependence(3, 9);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->kappa, 3);
  EXPECT_EQ(a->l, 1);
  EXPECT_EQ(a->k, 2);
  const auto b = mult_dependence(2, 2);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->kappa, 2);
  EXPECT_EQ(b->k, 1);
  EXPECT_EQ(b->l, 1);
  EXPECT_FALSE(mult_dependence(2, 3));
  EXPECT_FALSE(mult_dependence(6, 12));
  const auto c = mult_dependence(4, 16);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->kappa, 4);
  EXPECT_EQ(c->l, 1);
  EXPECT_EQ(c->k, 2);
  const auto d = mult_dependence(8, 4);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->kappa, 2);
  EXPECT_EQ(d->l, 3);
  EXPECT_EQ(d->k, 2);
  EXPECT_THROW(mult_dependence(1, 4), DomainError);
}

TEST(MultDependence, PropertyReconstructsMN) {
  gen::for_all(200, 41, [](gen::Gen& g) {
    const int base = g.integer(2, 6);
    const int a = g.integer(1, 5), b = g.integer(1, 5);
    const int M = static_cast<int>(std::pow(base, a)), N = static_cast<int>(std::pow(base, b));
    const auto md = mult_dependence(M, N);
    ASSERT_TRUE(md);
    EXPECT_EQ(std::gcd(md->k, md->l), 1);
    EXPECT_EQ(std::pow(md->kappa, md->l), M);
    EXPECT_EQ(std::pow(md->kappa, md->k), N);
  });
}

TEST(Nu1, Examples) {
  EXPECT_NEAR(nu1(0.75, 1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(nu1(0.5, 2, 1), 0.6180339887498949, 1e-15);
  EXPECT_NEAR(nu1(0.8, 1, 2), 0.6403882032022076, 1e-15);
  EXPECT_NEAR(nu1(0.6, 1, 1), 2.0 / 3.0, 1e-15);
}

TEST(Nu1, Preconditions) {
  EXPECT_THROW(nu1(0.5, 1, 1), PreconditionError);
  EXPECT_THROW(nu1(0.3, 1, 1), PreconditionError);
  EXPECT_THROW(nu1(1.0, 1, 1), PreconditionError);
  EXPECT_THROW(nu1(0.9, 2, 2), PreconditionError);
  EXPECT_THROW(nu1(0.9, 0, 1), PreconditionError);
}

TEST(Nu1, PropertyRootInUnitInterval) {
  gen::for_all(300, 42, [](gen::Gen& g) {
    int k = g.integer(1, 7), l = g.integer(1, 7);
    while (std::gcd(k, l) != 1) l = g.integer(1, 7);
    const double lo = static_cast<double>(l) / (k + l);
    const double p0 = g.real(lo + 1e-3, 0.999);
    const double r = nu1(p0, k, l);
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
    EXPECT_LT(std::abs(char_poly(p0, k, l, r)), 1e-13);
  });
}

TEST(CharRoots, Examples) {
  const auto a = char_roots(0.5, 2, 1);
  EXPECT_EQ(a.inside, 1);
  EXPECT_EQ(a.on_circle, 1);
  EXPECT_EQ(a.outside, 1);
  ASSERT_EQ(a.roots.size(), 3u);
  EXPECT_EQ(a.roots[0], std::complex<double>(1.0, 0.0));
  std::vector<double> re;
  for (auto z : a.roots) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -1.6180339887498949, 1e-12);
  EXPECT_NEAR(re[1], 0.6180339887498949, 1e-12);
  EXPECT_NEAR(re[2], 1.0, 1e-15);

  const auto b = char_roots(0.75, 1, 1);
  EXPECT_EQ(b.inside, 1);
  EXPECT_EQ(b.on_circle, 1);
  EXPECT_EQ(b.outside, 0);
  EXPECT_NEAR(b.roots[1].real(), 1.0 / 3.0, 1e-14);
}

TEST(CharRoots, CountsAcrossGrid) {
  for (int k = 1; k <= 7; ++k)
    for (int l = 1; l <= 7; ++l) {
      if (std::gcd(k, l) != 1) continue;
      const double lo = static_cast<double>(l) / (k + l);
      for (double p0 : {lo + 0.05 * (1 - lo), lo + 0.5 * (1 - lo), lo + 0.95 * (1 - lo)}) {
        const auto rc = char_roots(p0, k, l);
        EXPECT_EQ(rc.inside, l) << k << " " << l << " " << p0;
        EXPECT_EQ(rc.on_circle, 1);
        EXPECT_EQ(rc.outside, k - 1);
        double worst = 0.0, largest_inside = 0.0;
        std::complex<double> prod = 1.0;
        for (auto z : rc.roots) {
          worst = std::max(worst, std::abs(char_poly(p0, k, l, z)));
          prod *= z;
          if (std::abs(z) < 1.0) largest_inside = std::max(largest_inside, std::abs(z));
        }
        EXPECT_LT(worst, 1e-10);
        // Product of roots: (-1)^(k+l) (1-p0)/p0.
        const double sign = (k + l) % 2 == 0 ? 1.0 : -1.0;
        EXPECT_NEAR(prod.real(), sign * (1 - p0) / p0, 1e-10);
        EXPECT_NEAR(prod.imag(), 0.0, 1e-10);
        EXPECT_NEAR(largest_inside, rc.nu1, 1e-11);
      }
    }
}

TEST(SolveB, GeometricForUnitSteps) {
  const auto cs = solve_b(0.75, 1, 1, 40);
  EXPECT_EQ(cs.regime, MeasureRegime::finite);
  EXPECT_NEAR(cs.b[0], 2.0 / 3.0, 1e-12);
  for (int h = 0; h < 40; ++h) EXPECT_NEAR(cs.b[h + 1] / cs.b[h], 1.0 / 3.0, 1e-9);
}

TEST(SolveB, TailRatioApproachesNu1) {
  const auto cs = solve_b(0.5, 2, 1, 60);
  for (int h = 30; h < 60; ++h) EXPECT_NEAR(cs.b[h + 1] / cs.b[h], 0.6180339887498949, 1e-6);
}

TEST(SolveB, SigmaFiniteAtZeroDrift) {
  const auto cs = solve_b(0.5, 1, 1, 200);
  EXPECT_EQ(cs.regime, MeasureRegime::sigma_finite);
  for (int h = 0; h < 200; ++h) EXPECT_GE(cs.b[h + 1], cs.b[h] - 1e-12);
  const auto ps = cs.partial_sums();
  for (int h = 10; h <= 200; h += 10) EXPECT_GE(ps[h], 0.5 * cs.b[0] * h);
  const auto cs2 = solve_b(2.0 / 3.0, 1, 2, 150);
  EXPECT_EQ(cs2.regime, MeasureRegime::sigma_finite);
}

TEST(SolveB, Preconditions) {
  EXPECT_THROW(solve_b(0.4, 1, 1), PreconditionError);
  EXPECT_THROW(solve_b(0.55, 2, 3), PreconditionError);
  EXPECT_EQ(solve_b(0.6, 2, 3, 50).regime, MeasureRegime::sigma_finite);
  EXPECT_THROW(solve_b(0.8, 2, 1, 2), PreconditionError);
  EXPECT_THROW(solve_b(1.0, 1, 1), PreconditionError);
}

TEST(SolveB, PropertyResidualsAndNormalization) {
  gen::for_all(80, 43, [](gen::Gen& g) {
    int k = g.integer(1, 5), l = g.integer(1, 5);
    while (std::gcd(k, l) != 1) l = g.integer(1, 5);
    const double lo = static_cast<double>(l) / (k + l);
    const double p0 = g.real(lo + 0.02 * (1 - lo), lo + 0.95 * (1 - lo));
    const auto cs = solve_b(p0, k, l);
    EXPECT_LT(cs.recurrence_residual(), 1e-9);
    EXPECT_LT(cs.boundary_residual(), 1e-9);
    double total = std::accumulate(cs.b.begin(), cs.b.end(), 0.0);
    total += cs.b.back() * cs.tail_ratio / (1 - cs.tail_ratio);
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (double v : cs.b) EXPECT_GE(v, 0.0);
  });
}

TEST(SolveB, MatchesTruncatedChainOracle) {
  for (auto [p0, k, l] : {std::tuple{0.75, 1, 1}, {0.5, 2, 1}, {0.8, 1, 2}, {0.55, 3, 2}, {0.9, 1, 3}}) {
    const auto cs = solve_b(p0, k, l);
    const auto pi = truncated_chain_law(p0, k, l, 600);
    for (int h = 0; h <= 30; ++h) EXPECT_NEAR(cs.b[h], pi[h], 1e-10) << p0 << " " << k << " " << l << " h=" << h;
  }
}

TEST(SolveB, MatchesSimulatedOccupation) {
  const auto cs = solve_b(0.5, 2, 1);
  const auto occ = walk_occupation(0.5, 2, 1, 2'000'000, 30, 7);
  double tv = 0.0;
  for (std::size_t h = 0; h < 30; ++h) tv += std::abs(occ[h] - cs.b[h]);
  double rest = 0.0;
  for (std::size_t h = 30; h < cs.b.size(); ++h) rest += cs.b[h];
  tv += std::abs(occ[30] - rest);
  EXPECT_LT(0.5 * tv, 0.01);
}

TEST(DeltaEpsMass, Examples) {
  const auto cs = solve_b(0.6, 1, 1);
  EXPECT_NEAR(delta_eps_mass(cs, 3, 1.0), 1.0, 1e-12);
  const auto eps = powers(3.0, 0, 20);
  double prev = 2.0;
  for (double e : eps) {
    const double m = delta_eps_mass(cs, 3, e);
    EXPECT_LE(m, prev + 1e-15);
    EXPECT_GT(m, 0.0);
    prev = m;
  }
  EXPECT_THROW(delta_eps_mass(cs, 3, 0.0), DomainError);
  EXPECT_THROW(delta_eps_mass(cs, 1, 0.5), DomainError);
  EXPECT_THROW(delta_eps_mass(solve_b(0.5, 1, 1, 50), 2, 0.5), PreconditionError);
}

TEST(DeltaEpsMass, ShallowGridSlope) {
  const auto cs = solve_b(0.6, 1, 1);
  const auto eps = powers(3.0, 1, 6);
  std::vector<double> mass;
  for (double e : eps) mass.push_back(delta_eps_mass(cs, 3, e));
  EXPECT_NEAR(loglog_slope(eps, mass), 0.3325, 1e-3);
}

TEST(DeltaEpsMass, DeepGridSlopeMatchesExponent) {
  const auto cs = solve_b(0.6, 1, 1);
  const auto eps = powers(3.0, 15, 40);
  std::vector<double> mass;
  for (double e : eps) mass.push_back(delta_eps_mass(cs, 3, e));
  EXPECT_NEAR(loglog_slope(eps, mass), -std::log(2.0 / 3.0) / std::log(3.0), 0.01);
}

TEST(DeltaEpsMass, BoundaryCaseSlopeCreepsTowardOne) {
  const auto cs = solve_b(0.75, 1, 1);
  auto slope = [&](int from, int to) {
    const auto eps = powers(3.0, from, to);
    std::vector<double> mass;
    for (double e : eps) mass.push_back(delta_eps_mass(cs, 3, e));
    return loglog_slope(eps, mass);
  };
  const double shallow = slope(1, 10), deep = slope(20, 40);
  EXPECT_LT(shallow, deep);
  EXPECT_LT(deep, 1.0);
  EXPECT_NEAR(deep, 1.0, 0.05);
}

TEST(DensitySup, Examples) {
  const auto hi = density_sup(solve_b(0.9, 1, 1), 3, 2);
  EXPECT_TRUE(hi.bounded);
  EXPECT_FALSE(hi.boundary);
  EXPECT_NEAR(hi.growth, 3.0 / 9.0, 1e-12);
  const auto lo = density_sup(solve_b(0.6, 1, 1), 3, 2);
  EXPECT_FALSE(lo.bounded);
  EXPECT_NEAR(lo.growth, 2.0, 1e-12);
  const auto edge = density_sup(solve_b(0.9, 1, 1), 3, 3);
  EXPECT_TRUE(edge.boundary);
  EXPECT_FALSE(edge.bounded);
  EXPECT_GE(hi.sup_estimate, solve_b(0.9, 1, 1).b[0]);
  EXPECT_THROW(density_sup(solve_b(0.9, 1, 1), 3, 1), DomainError);
}

TEST(DensitySup, Threshold) {
  EXPECT_NEAR(density_threshold_p0(1, 1, 3, 2), 0.75, 1e-9);
  // nu1 = 1/9 at the threshold for kappa = 3, d = 3: p0 = 0.9.
  EXPECT_NEAR(density_threshold_p0(1, 1, 3, 3), 0.9, 1e-9);
}

TEST(DiagonalCellMass, SumsToOneAndIsSymmetric) {
  const auto cs = solve_b(0.7, 1, 1);
  for (int g : {0, 1, 2, 3}) {
    const long long G = static_cast<long long>(std::pow(2, g));
    double total = 0.0;
    for (long long i = 0; i < G; ++i)
      for (long long j = 0; j < G; ++j) {
        const double m = diagonal_cell_mass(cs, 2, g, i, j);
        EXPECT_GE(m, 0.0);
        EXPECT_DOUBLE_EQ(m, diagonal_cell_mass(cs, 2, g, j, i));
        total += m;
      }
    EXPECT_NEAR(total, 1.0, 1e-12) << "g=" << g;
  }
  EXPECT_GT(diagonal_cell_mass(cs, 2, 3, 2, 2), diagonal_cell_mass(cs, 2, 3, 2, 5));
}

TEST(LoglogSlope, ExactPowerLaw) {
  const std::vector<double> eps{0.1, 0.01, 0.001};
  std::vector<double> mass;
  for (double e : eps) mass.push_back(5.0 * std::pow(e, 0.7));
  EXPECT_NEAR(loglog_slope(eps, mass), 0.7, 1e-12);
  EXPECT_THROW(loglog_slope({0.1}, {0.2}), DomainError);
  EXPECT_THROW(loglog_slope({0.1, 0.1}, {0.2, 0.3}), DomainError);
  EXPECT_THROW(loglog_slope({0.1, -0.1}, {0.2, 0.3}), DomainError);
}

TEST(DefaultTruncation, Examples) {
  EXPECT_EQ(default_truncation(1.0), 100);
  EXPECT_EQ(default_truncation(0.5), 100);
  EXPECT_EQ(default_truncation(0.99), static_cast<int>(std::ceil(60.0 / -std::log(0.99))));
}
