#include "ifslab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ifslab/errors.hpp"
#include "ifslab/experiments.hpp"
#include "ifslab/ifs_core.hpp"
#include "ifslab/multivalued.hpp"
#include "ifslab/random_walks.hpp"
#include "ifslab/skew_products.hpp"
#include "ifslab/stationary_measures.hpp"

namespace ifslab::acceptance {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome exact_stationarity() {
  Engine eng = make_engine(101);
  std::vector<double> grid(10000);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / grid.size();
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int M = 2 + static_cast<int>(eng() % 8), N = 2 + static_cast<int>(eng() % 8);
    const double p0 = 0.01 + 0.98 * uniform01(eng);
    worst = std::max(worst, transfer_density_check(make_system(M, N, p0), grid));
  }
  return {worst < 1e-14, fmt("max deviation %.3g over 20 configs x 1e4 points", worst)};
}

Outcome gamma_round_trip() {
  Engine eng = make_engine(202);
  double round = 0.0, factor = 0.0;
  const int configs = 10, points = 100000;
  for (int c = 0; c < configs; ++c) {
    const int M = 2 + static_cast<int>(eng() % 5), N = 2 + static_cast<int>(eng() % 5);
    const auto sys = make_system(M, N, 0.05 + 0.9 * uniform01(eng));
    for (int i = 0; i < points; ++i) {
      const Point3 p{uniform01(eng), uniform01(eng), uniform01(eng)};
      const Point3 f = gamma(sys, p, Direction::forward);
      const Point3 b = gamma(sys, f, Direction::inverse);
      round = std::max({round, std::abs(b.w - p.w), std::abs(b.x - p.x), std::abs(b.y - p.y)});
      const auto [gw, gx] = G_map(sys, p.w, p.x);
      factor = std::max({factor, std::abs(gw - f.w), std::abs(gx - f.x)});
    }
  }
  return {round <= 1e-12 && factor <= 1e-12,
          fmt("round trip %.3g, factor %.3g over %d configs x %d points", round, factor, configs, points)};
}

Outcome fiber_uniformity() {
  const std::pair<int, int> pairs[] = {{2, 2}, {3, 2}, {2, 4}, {3, 3}};
  std::uint64_t words = 0, etas = 0;
  for (auto [M, N] : pairs) {
    const auto sys = make_system(M, N, 0.5);
    for (int len = 0; len <= 10; ++len) {
      for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
        BinaryWord eta(len);
        for (int i = 0; i < len; ++i) eta[i] = (bits >> i) & 1u;
        const auto fd = fiber_distribution(sys, eta);
        ++etas;
        words += fd.words;
        if (!fd.uniform(M))
          return {false, fmt("unequal fiber counts for (M,N)=(%d,%d), |eta|=%d, bits=%u", M, N, len, bits)};
      }
    }
  }
  return {true, fmt("%llu binary words, %llu symbol words, all fibers uniform",
                    static_cast<unsigned long long>(etas), static_cast<unsigned long long>(words))};
}

Outcome root_classification() {
  int cases = 0;
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k)
    for (int l = 1; l <= 6; ++l) {
      if (std::gcd(k, l) != 1) continue;
      const double a = static_cast<double>(l) / (k + l);
      for (int i = 0; i < 20; ++i) {
        const double p0 = a + (1.0 - a) * (i + 1) / 21.0;
        const auto rc = char_roots(p0, k, l);
        ++cases;
        if (rc.inside != l || rc.on_circle != 1 || rc.outside != k - 1)
          return {false, fmt("counts (%d,%d,%d) at p0=%.6f k=%d l=%d", rc.inside, rc.on_circle, rc.outside, p0, k, l)};
        std::complex<double> top = 0.0;
        for (const auto& z : rc.roots)
          if (std::abs(z) < 1.0 && std::abs(z) > std::abs(top)) top = z;
        const double err = std::abs(top - std::complex<double>(rc.nu1, 0.0));
        worst = std::max(worst, err);
        if (err > 1e-11) return {false, fmt("nu1 mismatch %.3g at p0=%.6f k=%d l=%d", err, p0, k, l)};
      }
    }
  const double s1 = std::abs(nu1(0.75, 1, 1) - 1.0 / 3.0);
  const double s2 = std::abs(nu1(0.5, 2, 1) - (std::sqrt(5.0) - 1.0) / 2.0);
  return {s1 <= 1e-12 && s2 <= 1e-12,
          fmt("%d cases, max |nu1 - top inside root| %.3g; spot errors %.3g, %.3g", cases, worst, s1, s2)};
}

Outcome coefficient_law() {
  struct Case {
    double p0;
    int k, l;
  };
  const Case cases[] = {{0.75, 1, 1}, {0.5, 2, 1}, {0.8, 1, 2}};
  std::ostringstream detail;
  bool ok = true;
  std::uint64_t seed = 505;
  for (const auto& c : cases) {
    const auto cs = solve_b(c.p0, c.k, c.l);
    const double rec = cs.recurrence_residual(), bnd = cs.boundary_residual();
    double geo = 0.0;
    if (c.l == 1)
      for (int h = 0; h <= 40; ++h) geo = std::max(geo, std::abs(cs.b[h] / cs.b[0] - std::pow(cs.tail_ratio, h)));
    const std::size_t top = static_cast<std::size_t>(cs.H);
    const auto occ = walk_occupation(c.p0, c.k, c.l, 10'000'000, top, seed++);
    double tv = 0.0, tail = 0.0;
    for (std::size_t h = 0; h < top; ++h) tv += std::abs(occ[h] - cs.b[h]);
    for (std::size_t h = top; h < cs.b.size(); ++h) tail += cs.b[h];
    tail += cs.b.back() * cs.tail_ratio / (1.0 - cs.tail_ratio);
    tv = 0.5 * (tv + std::abs(occ[top] - tail));
    const bool pass = rec < 1e-9 && bnd < 1e-9 && geo <= 1e-9 && tv < 0.01;
    ok = ok && pass;
    detail << fmt("(%.2f,%d,%d): rec %.2g bnd %.2g geo %.2g TV %.4f; ", c.p0, c.k, c.l, rec, bnd, geo, tv);
  }
  return {ok, detail.str()};
}

Outcome boundedness_threshold() {
  const auto md = mult_dependence(3, 3);
  const auto lo = density_sup(solve_b(0.6, md->k, md->l), md->kappa, 2);
  const auto hi = density_sup(solve_b(0.9, md->k, md->l), md->kappa, 2);
  const double t = density_threshold_p0(md->k, md->l, md->kappa, 2);
  const bool ok = !lo.bounded && !lo.boundary && hi.bounded && std::abs(t - 0.75) <= 1e-9;
  return {ok, fmt("p0=0.6 growth %.4f (%s), p0=0.9 growth %.4f (%s), threshold %.12f", lo.growth,
                  lo.bounded ? "bounded" : "unbounded", hi.growth, hi.bounded ? "bounded" : "unbounded", t)};
}

Outcome divergence_scaling() {
  std::vector<double> eps;
  for (int m = 1; m <= 6; ++m) eps.push_back(std::pow(3.0, -m));
  const auto r = divergence_experiment(make_system(3, 3, 0.6), eps, 10'000'000, 20, 707);
  const double target = -std::log(2.0 / 3.0) / std::log(3.0);
  const double slope = r.aggregate("slope_empirical");
  return {std::abs(slope - target) <= 0.05,
          fmt("empirical slope %.4f, analytic-curve slope %.4f, exponent %.4f, max z %.2f", slope,
              r.aggregate("slope_analytic"), target, r.aggregate("max_z_vs_analytic"))};
}

Outcome synchronization() {
  const auto r = sync_experiment(make_system(3, 2, 0.5), 1000, 2000, 808);
  const double reached = r.aggregate("fraction_reached_1e-6"), fin = r.aggregate("fraction_final_below_1e-6");
  return {reached >= 0.95 && fin >= 0.95,
          fmt("reached 1e-6: %.3f, final below 1e-6: %.3f (1000 trials, n=2000)", reached, fin)};
}

Outcome intermittency() {
  const auto r = intermittency_experiment(make_system(2, 2, 0.5), 0.1, 0.5, 10'000'000, 100, 909);
  const double f4 = r.aggregate("median_F@10000"), f7 = r.aggregate("median_F@10000000");
  const double exc = r.aggregate("fraction_nonmerged_with_excursion");
  return {f7 > f4 && exc >= 0.9,
          fmt("median F(1e4) %.4f, median F(1e7) %.4f, excursion fraction %.3f (%g merged)", f4, f7, exc,
              r.aggregate("merged_trials"))};
}

Outcome wald_martingale() {
  const double p0s[] = {0.65, 0.7, 0.8};
  const double scales[] = {0.5, 1.0, 2.0};
  const std::uint64_t trials = 100000;
  std::ostringstream detail;
  bool ok = true;
  std::uint64_t cfg = 0;
  double worst_wald = INFINITY, worst_mart = 0.0;
  for (double p0 : p0s)
    for (double s : scales) {
      const auto wp = make_walk(-s, 1.5 * s, p0);
      const double bound = wald_bound(wp), r = martingale_exponent(wp);
      const double z0w = 0.5 * wp.step_up, K = 10.0 * s, z0m = 0.5 * K;
      std::vector<double> T(trials), E(trials);
      std::vector<int> cens(trials, 0);
      const std::uint64_t base = derive_seed(1010, cfg++);
      const long long nt = static_cast<long long>(trials);
#pragma omp parallel for schedule(static)
      for (long long t = 0; t < nt; ++t) {
        Engine eng = make_engine(derive_seed(base, static_cast<std::uint64_t>(t)));
        const auto a = first_passage(wp, z0w, std::nullopt, eng);
        T[t] = static_cast<double>(a.time);
        cens[t] = a.censored();
        const auto b = first_passage(wp, z0m, K, eng);
        cens[t] += b.censored();
        E[t] = std::exp(r * b.final_position);
      }
      auto mean_sd = [&](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double q = 0.0;
        for (double x : v) q += (x - m) * (x - m);
        return std::pair{m, std::sqrt(q / (v.size() - 1) / v.size())};
      };
      const auto [mt, st] = mean_sd(T);
      const auto [me, se] = mean_sd(E);
      const int censored = std::accumulate(cens.begin(), cens.end(), 0);
      const double target = std::exp(r * z0m);
      const double zw = (mt - bound) / st, zm = std::abs(me - target) / se;
      worst_wald = std::min(worst_wald, zw);
      worst_mart = std::max(worst_mart, zm);
      const bool pass = mt >= bound - 3.0 * st && zm <= 3.0 && censored == 0;
      if (!pass) detail << fmt("FAIL p0=%.2f s=%.1f: E T %.4f vs bound %.4f, mart %.5f vs %.5f (se %.2g), censored %d; ",
                               p0, s, mt, bound, me, target, se, censored);
      ok = ok && pass;
    }
  detail << fmt("9 configs x %llu trials; min (E T - bound)/se %.2f, max martingale |z| %.2f",
                static_cast<unsigned long long>(trials), worst_wald, worst_mart);
  return {ok, detail.str()};
}

Outcome infinite_expectation() {
  const auto sys = make_system(2, 2, 0.5);
  const auto wp = derivative_walk(sys);
  const auto sched = LevelSchedule::make(10, 0.009);
  const std::uint64_t caps[] = {1000, 10000, 100000};
  const std::uint64_t trials = 100000;
  const int campaigns = 20;
  int good = 0;
  std::ostringstream detail;
  for (int c = 0; c < campaigns; ++c) {
    double meanS[3], meanW[3];
    for (int ci = 0; ci < 3; ++ci) {
      const std::uint64_t base = derive_seed(1111, static_cast<std::uint64_t>(c * 3 + ci));
      std::vector<double> s(trials), w(trials);
      const long long nt = static_cast<long long>(trials);
#pragma omp parallel for schedule(dynamic, 256)
      for (long long t = 0; t < nt; ++t) {
        Engine eng = make_engine(derive_seed(base, 2 * static_cast<std::uint64_t>(t)));
        s[t] = static_cast<double>(stop_S_timedep(wp, sched, 0.0, eng, caps[ci]).time);
        SymbolStream st(sys, derive_seed(base, 2 * static_cast<std::uint64_t>(t) + 1));
        w[t] = static_cast<double>(stop_W(sys, 0.009, 1.0 / 256.0, st, caps[ci]).time);
      }
      meanS[ci] = std::accumulate(s.begin(), s.end(), 0.0) / trials;
      meanW[ci] = std::accumulate(w.begin(), w.end(), 0.0) / trials;
    }
    const bool inc = meanS[0] < meanS[1] && meanS[1] < meanS[2] && meanW[0] < meanW[1] && meanW[1] < meanW[2];
    good += inc;
    if (c == 0)
      detail << fmt("campaign 0: S means %.2f/%.2f/%.2f, W means %.2f/%.2f/%.2f; ", meanS[0], meanS[1], meanS[2],
                    meanW[0], meanW[1], meanW[2]);
  }
  detail << fmt("%d/%d campaigns strictly increasing", good, campaigns);
  return {good >= 19, detail.str()};
}

Outcome sigma_finite() {
  const auto cs = solve_b(0.5, 1, 1, 200);
  bool mono = cs.regime == MeasureRegime::sigma_finite;
  for (std::size_t h = 1; h < cs.b.size(); ++h) mono = mono && cs.b[h] >= cs.b[h - 1];
  const double total = cs.partial_sums().back();
  return {mono && total >= 0.4 * cs.H,
          fmt("%s, nondecreasing=%s, partial sum %.3f vs 0.4 H = %.1f", to_string(cs.regime), mono ? "yes" : "no",
              total, 0.4 * cs.H)};
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "exact-stationarity", 1.0, exact_stationarity},
      {2, "gamma-round-trip", 1.0, gamma_round_trip},
      {3, "fiber-uniformity", 30.0, fiber_uniformity},
      {4, "root-classification", 10.0, root_classification},
      {5, "coefficient-law", 60.0, coefficient_law},
      {6, "boundedness-threshold", 1.0, boundedness_threshold},
      {7, "divergence-scaling", 300.0, divergence_scaling},
      {8, "synchronization", 10.0, synchronization},
      {9, "intermittency", 600.0, intermittency},
      {10, "wald-martingale", 120.0, wald_martingale},
      {11, "infinite-expectation", 600.0, infinite_expectation},
      {12, "sigma-finite", 1.0, sigma_finite},
  };
  return all;
}

std::string format_line(const Result& r) {
  return fmt("[%s] %2d %-22s %8.2fs / %4.0fs  %s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
             r.budget_s, r.detail.c_str());
}

std::vector<Result> run(const std::vector<int>& only, std::ostream* live) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Result r{c.id, c.name, false, "", 0.0, c.budget_s};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > c.budget_s) {
      r.passed = false;
      r.detail += fmt(" [over runtime budget %.0f s]", c.budget_s);
    }
    if (live) *live << format_line(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ifslab::acceptance
