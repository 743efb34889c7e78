#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "gen.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/ifs_core.hpp"

using namespace ifslab;

TEST(MakeSystem, LyapunovExamples) {
  EXPECT_NEAR(make_system(3, 2, 0.5).lyap, -0.20273255405408225, 1e-15);
  EXPECT_EQ(make_system(2, 2, 0.5).lyap, 0.0);
  EXPECT_NEAR(make_system(2, 3, 0.5).lyap, 0.20273255405408225, 1e-15);
  EXPECT_EQ(lyap_regime(make_system(3, 2, 0.5)), LyapRegime::negative);
  EXPECT_EQ(lyap_regime(make_system(2, 2, 0.5)), LyapRegime::zero);
  EXPECT_EQ(lyap_regime(make_system(2, 3, 0.5)), LyapRegime::positive);
  // 0.5 ln 9 - 0.5 ln 9 style cancellations stay in the zero regime.
  EXPECT_EQ(lyap_regime(make_system(3, 3, 0.5)), LyapRegime::zero);
  EXPECT_EQ(lyap_regime(make_system(4, 2, 2.0 / 3.0)), LyapRegime::zero);
}

TEST(MakeSystem, DerivedFields) {
  const auto s = make_system(3, 2, 0.4);
  ASSERT_EQ(s.probs.size(), 4u);
  EXPECT_DOUBLE_EQ(s.probs[0], 0.4);
  EXPECT_DOUBLE_EQ(s.probs[3], 0.2);
  ASSERT_EQ(s.breakpoints.size(), 5u);
  EXPECT_EQ(s.breakpoints.front(), 0.0);
  EXPECT_EQ(s.breakpoints.back(), 1.0);
  EXPECT_DOUBLE_EQ(s.breakpoints[1], 0.4);
  EXPECT_DOUBLE_EQ(s.breakpoints[2], 0.6);
  EXPECT_DOUBLE_EQ(s.breakpoints[3], 0.8);
  EXPECT_DOUBLE_EQ(s.contraction_prob(), 0.2);
}

TEST(MakeSystem, RejectsOutOfRange) {
  EXPECT_THROW(make_system(1, 2, 0.5), DomainError);
  EXPECT_THROW(make_system(2, 1, 0.5), DomainError);
  EXPECT_THROW(make_system(2, 2, 0.0), DomainError);
  EXPECT_THROW(make_system(2, 2, 1.0), DomainError);
  EXPECT_THROW(make_system(2, 2, std::numeric_limits<double>::quiet_NaN()), DomainError);
  try {
    make_system(0, 2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.exit_code(), 5);
  }
}

TEST(MakeSystem, PropertyInvariants) {
  gen::for_all(500, 11, [](gen::Gen& g) {
    const auto s = g.system(12, 12);
    EXPECT_NEAR(std::accumulate(s.probs.begin(), s.probs.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 1; i < s.breakpoints.size(); ++i) EXPECT_LT(s.breakpoints[i - 1], s.breakpoints[i]);
    const double a = s.p0 * std::log(static_cast<double>(s.N)), b = (1 - s.p0) * std::log(static_cast<double>(s.M));
    if (std::abs(a - b) > 1e-9) EXPECT_EQ(s.lyap > 0, a > b);
  });
}

TEST(ApplyMap, Examples) {
  const auto s = make_system(3, 2, 0.5);
  EXPECT_EQ(apply_map(s, 0, 0.75), 0.5);
  EXPECT_EQ(apply_map(s, 1, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(apply_map(s, 3, 0.5), 5.0 / 6.0);
}

TEST(ApplyMap, DomainErrors) {
  const auto s = make_system(3, 2, 0.5);
  EXPECT_THROW(apply_map(s, 0, 1.0), DomainError);
  EXPECT_THROW(apply_map(s, 0, -0.1), DomainError);
  EXPECT_THROW(apply_map(s, 4, 0.1), DomainError);
  EXPECT_THROW(apply_map(s, -1, 0.1), DomainError);
}

TEST(ApplyMap, ResultsStayInUnitInterval) {
  const auto s = make_system(3, 3, 0.5);
  const double top = std::nextafter(1.0, 0.0);
  for (Symbol i = 0; i <= 3; ++i) {
    EXPECT_LT(apply_map(s, i, top), 1.0);
    EXPECT_GE(apply_map(s, i, top), 0.0);
  }
  EXPECT_EQ(apply_map(s, 0, 1.0 / 3.0), 0.0);  // 3 * (1/3) rounds to exactly 1
}

TEST(ApplyMap, PropertyConstantSlope) {
  gen::for_all(2000, 12, [](gen::Gen& g) {
    const auto s = g.system();
    const double x = g.unit(), y = g.unit();
    const Symbol i = g.integer(1, s.M);
    EXPECT_NEAR(std::abs(apply_map(s, i, x) - apply_map(s, i, y)), std::abs(x - y) / s.M, 1e-15);
    if (continuity_interval(s.N, x) == continuity_interval(s.N, y))
      EXPECT_NEAR(std::abs(apply_map(s, 0, x) - apply_map(s, 0, y)), s.N * std::abs(x - y), 1e-14);
  });
}

TEST(SymbolStream, DeterministicAndMaterializable) {
  const auto s = make_system(3, 2, 0.3);
  SymbolStream a(s, 77), b(s, 77), c(s, 78);
  const Word wa = a.take(1000), wb = b.take(1000), wc = c.take(1000);
  EXPECT_EQ(wa, wb);
  EXPECT_NE(wa, wc);
  EXPECT_EQ(sample_word(s, 77, 1000), wa);
  for (Symbol x : wa) {
    EXPECT_GE(x, 0);
    EXPECT_LE(x, 3);
  }
}

TEST(SymbolStream, FrequencyOfSymbolZero) {
  for (double p0 : {0.1, 0.5, 0.77}) {
    const auto s = make_system(4, 2, p0);
    SymbolStream st(s, 2024);
    const int n = 1'000'000;
    int zeros = 0;
    std::vector<int> counts(5, 0);
    for (int i = 0; i < n; ++i) {
      const Symbol x = st.next();
      zeros += x == 0;
      ++counts[x];
    }
    const double sd = std::sqrt(p0 * (1 - p0) / n);
    EXPECT_NEAR(static_cast<double>(zeros) / n, p0, 3 * sd) << "p0 = " << p0;
    const double q = (1 - p0) / 4, sdq = std::sqrt(q * (1 - q) / n);
    for (int i = 1; i <= 4; ++i) EXPECT_NEAR(static_cast<double>(counts[i]) / n, q, 3 * sdq);
  }
}

TEST(SymbolFromUniform, BreakpointsAreHalfOpen) {
  const auto s = make_system(2, 2, 0.5);
  EXPECT_EQ(symbol_from_uniform(s, 0.0), 0);
  EXPECT_EQ(symbol_from_uniform(s, 0.4999), 0);
  EXPECT_EQ(symbol_from_uniform(s, 0.5), 1);
  EXPECT_EQ(symbol_from_uniform(s, 0.75), 2);
  EXPECT_EQ(symbol_from_uniform(s, std::nextafter(1.0, 0.0)), 2);
}

TEST(IterateOrbit, FigureWordFromZero) {
  const auto s = make_system(3, 2, 0.5);
  const Word w{3, 0, 2, 0, 0, 2, 0};
  const double x0 = 0.0;
  const auto recs = iterate_orbit(s, w, std::span<const double>(&x0, 1));
  ASSERT_EQ(recs.size(), 1u);
  ASSERT_EQ(recs[0].points.size(), 8u);
  // omega_0 applied first.
  double x = 0.0;
  for (Symbol i : w) x = apply_map(s, i, x);
  EXPECT_EQ(recs[0].points.back(), x);
  EXPECT_NEAR(x, 5.0 / 27.0, 1e-15);
  // Composing in the written order (rightmost symbol first) gives the figure's value 26/27.
  double y = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) y = apply_map(s, *it, y);
  EXPECT_NEAR(y, 26.0 / 27.0, 1e-15);
  // Four expansions, three contractions.
  EXPECT_NEAR(recs[0].log_deriv.back(), 4 * std::log(2.0) - 3 * std::log(3.0), 1e-14);
}

TEST(IterateOrbit, EmptyWord) {
  const auto s = make_system(2, 3, 0.4);
  const double x0 = 0.3;
  const auto recs = iterate_orbit(s, Word{}, std::span<const double>(&x0, 1));
  ASSERT_EQ(recs[0].points.size(), 1u);
  EXPECT_EQ(recs[0].points[0], 0.3);
  ASSERT_EQ(recs[0].log_deriv.size(), 1u);
  EXPECT_EQ(recs[0].log_deriv[0], 0.0);
  EXPECT_TRUE(recs[0].crossings.empty());
}

TEST(IterateOrbit, MatchesScalarReimplementation) {
  const auto s = make_system(2, 2, 0.5);
  const std::vector<double> starts{0.1, 0.9};
  SymbolStream st(s, 42);
  const auto recs = iterate_orbit(s, st, starts, 10000);
  const Word w = sample_word(s, 42, 10000);
  double a = 0.1, b = 0.9;
  for (Symbol i : w) {
    if (i == 0) {
      a = std::fmod(2.0 * a, 1.0);
      b = std::fmod(2.0 * b, 1.0);
    } else {
      a = (a + (i - 1)) / 2.0;
      b = (b + (i - 1)) / 2.0;
    }
  }
  EXPECT_EQ(recs[0].points.back(), a);
  EXPECT_EQ(recs[1].points.back(), b);
  EXPECT_EQ(std::abs(recs[0].points.back() - recs[1].points.back()), std::abs(a - b));
}

TEST(IterateOrbit, PropertyLogDerivIsIntegerCombination) {
  gen::for_all(200, 13, [](gen::Gen& g) {
    const auto s = g.system();
    const Word w = g.word(s.M, g.integer(0, 400));
    const double x0 = g.unit();
    const auto rec = iterate_orbit(s, w, std::span<const double>(&x0, 1))[0];
    long a = 0, b = 0;
    for (std::size_t t = 0; t <= w.size(); ++t) {
      const double expect = a * std::log(static_cast<double>(s.N)) - b * std::log(static_cast<double>(s.M));
      ASSERT_NEAR(rec.log_deriv[t], expect, 1e-12 * (1.0 + static_cast<double>(t)));
      if (t < w.size()) (w[t] == 0 ? a : b) += 1;
    }
  });
}

TEST(IterateOrbit, PropertyCrossingsFlagStraddles) {
  gen::for_all(200, 14, [](gen::Gen& g) {
    const auto s = g.system();
    const Word w = g.word(s.M, 60);
    const std::vector<double> starts{g.unit(), g.unit(), g.unit()};
    const auto recs = iterate_orbit(s, w, starts);
    for (std::size_t t = 0; t < w.size(); ++t) {
      for (std::size_t j = 0; j < starts.size(); ++j) {
        bool straddle = false;
        if (w[t] == 0)
          for (std::size_t o = 0; o < starts.size(); ++o)
            straddle = straddle || continuity_interval(s.N, recs[j].points[t]) !=
                                       continuity_interval(s.N, recs[o].points[t]);
        ASSERT_EQ(recs[j].crossings[t], straddle) << "t = " << t << ", point " << j;
      }
    }
  });
}

TEST(IterateOrbit, ContractionsNeverCross) {
  const auto s = make_system(3, 2, 0.5);
  const std::vector<double> starts{0.1, 0.9};
  const auto recs = iterate_orbit(s, Word{1, 2, 3, 1}, starts);
  for (bool c : recs[0].crossings) EXPECT_FALSE(c);
  const auto recs0 = iterate_orbit(s, Word{0}, starts);
  EXPECT_TRUE(recs0[0].crossings[0]);
  EXPECT_TRUE(recs0[1].crossings[0]);
}

TEST(IterateOrbit, RejectsStartsOutsideUnitInterval) {
  const auto s = make_system(2, 2, 0.5);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(iterate_orbit(s, Word{0}, bad), DomainError);
  const Word w{0, 5};
  const std::vector<double> ok{0.2};
  EXPECT_THROW(iterate_orbit(s, w, ok), DomainError);
}

TEST(TransferDensity, GridIsExactlyStationary) {
  const auto s = make_system(3, 2, 0.5);
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i / 1000.0;
  EXPECT_LE(transfer_density_check(s, xs), 1e-15);
}

TEST(TransferDensity, SinglePoint) {
  const auto s = make_system(2, 3, 0.9);
  const double x = 0.5;
  EXPECT_LE(transfer_density_check(s, std::span<const double>(&x, 1)), 1e-15);
}

TEST(TransferDensity, MiswiredProbabilities) {
  const auto s = make_system(3, 2, 0.5);
  const std::vector<double> probs{0.5, 0.25, 0.25, 0.25};
  std::vector<double> xs(100);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i / 100.0;
  EXPECT_NEAR(transfer_density_check(s, probs, xs), 0.25, 1e-15);
  EXPECT_THROW(transfer_density_check(s, std::vector<double>{0.5, 0.5}, xs), DomainError);
}

TEST(TransferDensity, PropertyZeroForEverySystem) {
  gen::for_all(300, 15, [](gen::Gen& g) {
    const auto s = g.system(20, 20);
    std::vector<double> xs(200);
    for (auto& x : xs) x = g.unit();
    EXPECT_LE(transfer_density_check(s, xs), 1e-14);
  });
}
