#include "ifslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ifslab/errors.hpp"
#include "ifslab/point_pair.hpp"
#include "ifslab/rng.hpp"
#include "ifslab/stationary_measures.hpp"

namespace ifslab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Trials are independent and write only to their own slot, so the result does
// not depend on the thread count or schedule.
template <class F>
void for_each_trial(std::uint64_t trials, F&& body) {
  const long long nt = static_cast<long long>(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long t = 0; t < nt; ++t) body(static_cast<std::uint64_t>(t));
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

struct TrialStart {
  Engine eng;
  PointPair pair;
};

TrialStart start_trial(std::uint64_t seed, std::uint64_t t, const std::optional<PairStart>& start) {
  Engine eng = make_engine(derive_seed(seed, t));
  double x, y;
  if (start) {
    x = start->x;
    y = start->y;
  } else {
    x = uniform01(eng);
    y = uniform01(eng);
  }
  return {eng, PointPair(x, y)};
}

void require_regime(const SystemParams& sys, LyapRegime want, const char* what) {
  const LyapRegime got = lyap_regime(sys);
  if (got != want) {
    throw PreconditionError(std::string(what) + " needs a " + to_string(want) +
                            " Lyapunov exponent, got lyap = " + std::to_string(sys.lyap));
  }
}

constexpr double kLog10of2 = 0.30102999566398119521;

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw DomainError("no column named " + name);
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& [n, t] : tables)
    if (n == name) return t;
  throw DomainError("no table named " + name);
}

double ExperimentReport::aggregate(const std::string& name) const {
  if (!aggregates.contains(name)) throw DomainError("no aggregate named " + name);
  const auto& v = aggregates.at(name);
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_null()) return NAN;
  return v.get<double>();
}

std::vector<std::uint64_t> decade_checkpoints(std::uint64_t n) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t c = 10; c < n; c *= 10) cps.push_back(c);
  if (n > 0) cps.push_back(n);
  return cps;
}

Json system_json(const SystemParams& sys) {
  return Json{{"M", sys.M}, {"N", sys.N}, {"p0", sys.p0}, {"lyap", sys.lyap},
              {"regime", to_string(lyap_regime(sys))}};
}

ExperimentReport sync_experiment(const SystemParams& sys, std::uint64_t trials, std::uint64_t n,
                                 std::uint64_t seed, std::optional<PairStart> start) {
  require_regime(sys, LyapRegime::negative, "sync_experiment");
  if (trials == 0) throw DomainError("trials must be positive");
  const auto t0 = Clock::now();
  const auto cps = decade_checkpoints(n);
  struct Out {
    double x0, y0, final_log10, hit;
    std::uint64_t crossings;
    std::vector<double> cp_log10;
  };
  std::vector<Out> out(trials);
  for_each_trial(trials, [&](std::uint64_t t) {
    auto [eng, pp] = start_trial(seed, t, start);
    Out o{pp.x(), pp.y(), 0.0, -1.0, 0, {}};
    o.cp_log10.reserve(cps.size());
    if (pp.closer_than(1e-6)) o.hit = 0;
    std::size_t next = 0;
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (pp.step(sys, symbol_from_uniform(sys, uniform01(eng)))) ++o.crossings;
      if (o.hit < 0 && pp.closer_than(1e-6)) o.hit = static_cast<double>(i);
      if (next < cps.size() && i == cps[next]) {
        o.cp_log10.push_back(pp.log2_distance() * kLog10of2);
        ++next;
      }
    }
    o.final_log10 = pp.log2_distance() * kLog10of2;
    out[t] = std::move(o);
  });

  ExperimentReport r;
  r.experiment = "sync";
  r.config = {{"system", system_json(sys)}, {"trials", trials}, {"n", n}, {"seed", seed}};
  if (start) r.config["start"] = {start->x, start->y};
  Table per{{"trial", "x0", "y0", "log10_final_distance", "crossings", "first_time_below_1e-6"}, {}};
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto& o = out[t];
    per.rows.push_back({static_cast<double>(t), o.x0, o.y0, o.final_log10, static_cast<double>(o.crossings), o.hit});
  }
  Table curve{{"n", "median_log10_distance", "fraction_below_1e-6"}, {}};
  for (std::size_t c = 0; c < cps.size(); ++c) {
    std::vector<double> v(trials);
    std::uint64_t below = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      v[t] = out[t].cp_log10[c];
      below += v[t] < -6.0;
    }
    curve.rows.push_back({static_cast<double>(cps[c]), median(v), static_cast<double>(below) / trials});
  }
  for (double th : {-3.0, -6.0, -9.0, -12.0}) {
    std::uint64_t k = 0;
    for (const auto& o : out) k += o.final_log10 < th;
    r.aggregates["fraction_final_below_1e" + std::to_string(static_cast<int>(th))] = static_cast<double>(k) / trials;
  }
  std::uint64_t reached = 0, crossings = 0;
  for (const auto& o : out) {
    reached += o.hit >= 0;
    crossings += o.crossings;
  }
  r.aggregates["fraction_reached_1e-6"] = static_cast<double>(reached) / trials;
  r.aggregates["mean_crossings"] = static_cast<double>(crossings) / trials;
  r.tables.emplace_back("trials", std::move(per));
  r.tables.emplace_back("curve", std::move(curve));
  r.wall_time_s = seconds_since(t0);
  return r;
}

ExperimentReport intermittency_experiment(const SystemParams& sys, double eps, double beta, std::uint64_t n,
                                          std::uint64_t trials, std::uint64_t seed,
                                          std::optional<PairStart> start) {
  require_regime(sys, LyapRegime::zero, "intermittency_experiment");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
  if (n == 0 || trials == 0) throw DomainError("n and trials must be positive");
  const auto t0 = Clock::now();
  const auto cps = decade_checkpoints(n);
  struct Out {
    std::vector<double> F;
    std::uint64_t excursions = 0, excursions_after_close = 0;
    double first_close = -1.0;
    bool merged = false;
  };
  std::vector<Out> out(trials);
  for_each_trial(trials, [&](std::uint64_t t) {
    auto [eng, pp] = start_trial(seed, t, start);
    Out o;
    o.F.reserve(cps.size());
    std::uint64_t close = 0;
    std::size_t next = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (pp.closer_than(eps)) {
        ++close;
        if (o.first_close < 0) o.first_close = static_cast<double>(i);
      } else if (pp.distance() > beta) {
        ++o.excursions;
        if (o.first_close >= 0) ++o.excursions_after_close;
      }
      if (i + 1 == cps[next]) {
        o.F.push_back(static_cast<double>(close) / static_cast<double>(i + 1));
        ++next;
      }
      pp.step(sys, symbol_from_uniform(sys, uniform01(eng)));
    }
    o.merged = pp.merged();
    out[t] = std::move(o);
  });

  ExperimentReport r;
  r.experiment = "intermit";
  r.config = {{"system", system_json(sys)}, {"eps", eps},     {"beta", beta},
              {"n", n},                     {"trials", trials}, {"seed", seed}};
  if (start) r.config["start"] = {start->x, start->y};
  Table per{{"trial", "close_fraction", "excursions", "excursions_after_close", "first_close", "merged"}, {}};
  std::uint64_t merged = 0, with_exc = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto& o = out[t];
    per.rows.push_back({static_cast<double>(t), o.F.back(), static_cast<double>(o.excursions),
                        static_cast<double>(o.excursions_after_close), o.first_close, o.merged ? 1.0 : 0.0});
    if (o.merged) ++merged;
    else if (o.excursions_after_close > 0) ++with_exc;
  }
  Table curve{{"n", "median_close_fraction", "mean_close_fraction", "min_close_fraction", "max_close_fraction"}, {}};
  for (std::size_t c = 0; c < cps.size(); ++c) {
    std::vector<double> v(trials);
    for (std::uint64_t t = 0; t < trials; ++t) v[t] = out[t].F[c];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / trials;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double med = median(v);
    curve.rows.push_back({static_cast<double>(cps[c]), med, mean, *mn, *mx});
    r.aggregates["median_F@" + std::to_string(cps[c])] = med;
  }
  r.aggregates["merged_trials"] = merged;
  r.aggregates["nonmerged_trials"] = trials - merged;
  r.aggregates["fraction_nonmerged_with_excursion"] =
      trials > merged ? static_cast<double>(with_exc) / (trials - merged) : 0.0;
  r.tables.emplace_back("trials", std::move(per));
  r.tables.emplace_back("curve", std::move(curve));
  r.wall_time_s = seconds_since(t0);
  return r;
}

ExperimentReport divergence_experiment(const SystemParams& sys, const std::vector<double>& eps_grid,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed) {
  require_regime(sys, LyapRegime::positive, "divergence_experiment");
  if (eps_grid.empty()) throw DomainError("eps grid must be nonempty");
  for (double e : eps_grid)
    if (!(e > 0x1.0p-1000)) throw DomainError("eps values must be positive (and above 2^-1000)");
  if (n == 0 || trials == 0) throw DomainError("n and trials must be positive");
  const auto t0 = Clock::now();
  const std::size_t G = eps_grid.size();
  std::vector<std::vector<double>> frac(trials, std::vector<double>(G));
  for_each_trial(trials, [&](std::uint64_t t) {
    auto [eng, pp] = start_trial(seed, t, std::nullopt);
    std::vector<std::uint64_t> cnt(G, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      if (pp.scaled()) {
        for (auto& c : cnt) ++c;
      } else {
        const double d = pp.distance();
        for (std::size_t j = 0; j < G; ++j) cnt[j] += d < eps_grid[j];
      }
      pp.step(sys, symbol_from_uniform(sys, uniform01(eng)));
    }
    for (std::size_t j = 0; j < G; ++j) frac[t][j] = static_cast<double>(cnt[j]) / static_cast<double>(n);
  });

  ExperimentReport r;
  r.experiment = "diverge";
  r.config = {{"system", system_json(sys)}, {"eps", eps_grid}, {"n", n}, {"trials", trials}, {"seed", seed}};
  const auto md = mult_dependence(sys.M, sys.N);
  std::optional<CoefficientSequence> cs;
  if (md) cs = solve_b(sys.p0, md->k, md->l);
  Table tab{{"eps", "p_hat", "stderr"}, {}};
  if (cs) tab.columns.push_back("analytic");
  std::vector<double> xs, ys, ya;
  double worst_z = 0.0;
  for (std::size_t j = 0; j < G; ++j) {
    double mean = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) mean += frac[t][j];
    mean /= trials;
    double var = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) var += (frac[t][j] - mean) * (frac[t][j] - mean);
    const double se = trials > 1 ? std::sqrt(var / (trials - 1) / trials) : NAN;
    std::vector<double> row{eps_grid[j], mean, se};
    if (cs) {
      const double a = delta_eps_mass(*cs, md->kappa, std::min(1.0, eps_grid[j]));
      row.push_back(a);
      if (eps_grid[j] < 1.0) {
        ya.push_back(a);
        const double z = se > 0.0 ? std::abs(mean - a) / se : (mean == a ? 0.0 : INFINITY);
        worst_z = std::max(worst_z, z);
      }
    }
    if (eps_grid[j] < 1.0 && mean > 0.0) {
      xs.push_back(eps_grid[j]);
      ys.push_back(mean);
    }
    tab.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) r.aggregates["slope_empirical"] = loglog_slope(xs, ys);
  if (cs) {
    r.aggregates["kappa"] = md->kappa;
    r.aggregates["k"] = md->k;
    r.aggregates["l"] = md->l;
    r.aggregates["nu1"] = cs->tail_ratio;
    r.aggregates["exponent"] = -std::log(cs->tail_ratio) / std::log(static_cast<double>(md->kappa));
    if (ya.size() >= 2 && ya.size() == xs.size()) r.aggregates["slope_analytic"] = loglog_slope(xs, ya);
    r.aggregates["max_z_vs_analytic"] = worst_z;
  }
  r.tables.emplace_back("p_eps", std::move(tab));
  r.wall_time_s = seconds_since(t0);
  return r;
}

ExperimentReport equidistribution_test(const SystemParams& sys, int bins, std::uint64_t n, std::uint64_t seed) {
  if (bins < 2) throw DomainError("bins must be >= 2");
  if (n == 0) throw DomainError("n must be positive");
  const auto t0 = Clock::now();
  Engine eng = make_engine(derive_seed(seed, 0));
  double x = uniform01(eng);
  std::vector<std::uint64_t> cnt(bins, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    ++cnt[std::min(bins - 1, static_cast<int>(x * bins))];
    x = apply_map_unchecked(sys, symbol_from_uniform(sys, uniform01(eng)), x);
  }
  const double w = 1.0 / bins;
  double sup = 0.0;
  Table tab{{"bin", "lower", "count", "frequency", "deviation"}, {}};
  for (int b = 0; b < bins; ++b) {
    const double f = static_cast<double>(cnt[b]) / static_cast<double>(n);
    sup = std::max(sup, std::abs(f - w));
    tab.rows.push_back({static_cast<double>(b), b * w, static_cast<double>(cnt[b]), f, f - w});
  }
  const double gate = 4.0 * std::sqrt(w * (1.0 - w) / static_cast<double>(n)) * std::sqrt(2.0 * std::log(bins));
  ExperimentReport r;
  r.experiment = "equi";
  r.config = {{"system", system_json(sys)}, {"bins", bins}, {"n", n}, {"seed", seed}};
  r.aggregates["sup_deviation"] = sup;
  r.aggregates["gate"] = gate;
  r.aggregates["pass"] = sup < gate;
  r.tables.emplace_back("bins", std::move(tab));
  r.wall_time_s = seconds_since(t0);
  return r;
}

ExperimentReport two_point_histogram(const SystemParams& sys, int grid_res, std::uint64_t n, std::uint64_t seed) {
  require_regime(sys, LyapRegime::positive, "two_point_histogram");
  if (grid_res < 1 || grid_res > 4096) throw DomainError("grid_res must lie in 1..4096");
  if (n == 0) throw DomainError("n must be positive");
  const auto t0 = Clock::now();
  const std::size_t G = static_cast<std::size_t>(grid_res);
  std::vector<std::uint64_t> cnt(G * G, 0);
  auto [eng, pp] = start_trial(seed, 0, std::nullopt);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t a = std::min<std::size_t>(G - 1, static_cast<std::size_t>(pp.x() * grid_res));
    const std::size_t b = std::min<std::size_t>(G - 1, static_cast<std::size_t>(pp.y() * grid_res));
    ++cnt[a * G + b];
    pp.step(sys, symbol_from_uniform(sys, uniform01(eng)));
  }
  ExperimentReport r;
  r.experiment = "hist2d";
  r.config = {{"system", system_json(sys)}, {"grid_res", grid_res}, {"n", n}, {"seed", seed}};
  Table counts{{"i", "j", "count"}, {}};
  counts.rows.reserve(G * G);
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = 0; b < G; ++b)
      counts.rows.push_back({static_cast<double>(a), static_cast<double>(b), static_cast<double>(cnt[a * G + b])});

  std::uint64_t dominant = 0, diag_checked = 0;
  for (std::size_t a = 0; a < G; ++a) {
    const std::uint64_t d = cnt[a * G + a];
    bool ok = true;
    if (a + 1 < G) ok = ok && d > cnt[a * G + a + 1] && d > cnt[(a + 1) * G + a];
    if (a > 0) ok = ok && d > cnt[a * G + a - 1] && d > cnt[(a - 1) * G + a];
    if (G > 1) {
      ++diag_checked;
      dominant += ok;
    }
  }
  r.aggregates["fraction_diagonal_dominant"] = diag_checked ? static_cast<double>(dominant) / diag_checked : 1.0;

  const auto md = mult_dependence(sys.M, sys.N);
  int g = -1;
  if (md) {
    long long p = 1;
    for (int e = 0; p <= grid_res; ++e, p *= md->kappa)
      if (p == grid_res) g = e;
  }
  if (g >= 0) {
    const auto cs = solve_b(sys.p0, md->k, md->l);
    Table cmp{{"i", "j", "count", "empirical", "analytic"}, {}};
    double worst = 0.0;
    std::uint64_t considered = 0;
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t b = 0; b < G; ++b) {
        const double an = diagonal_cell_mass(cs, md->kappa, g, static_cast<long long>(a), static_cast<long long>(b));
        const double em = static_cast<double>(cnt[a * G + b]) / static_cast<double>(n);
        if (an > 1e-3) {
          worst = std::max(worst, std::abs(em - an) / an);
          ++considered;
        }
        if (an > 0.0 || cnt[a * G + b] > 0)
          cmp.rows.push_back({static_cast<double>(a), static_cast<double>(b), static_cast<double>(cnt[a * G + b]), em, an});
      }
    r.aggregates["kappa"] = md->kappa;
    r.aggregates["cells_above_1e-3"] = considered;
    r.aggregates["max_relative_error"] = worst;
    r.tables.emplace_back("counts", std::move(counts));
    r.tables.emplace_back("comparison", std::move(cmp));
  } else {
    r.tables.emplace_back("counts", std::move(counts));
  }
  r.wall_time_s = seconds_since(t0);
  return r;
}

std::vector<double> walk_occupation(double p0, int k, int l, std::uint64_t n, std::size_t max_state,
                                    std::uint64_t seed) {
  if (n == 0) throw DomainError("n must be positive");
  Engine eng = make_engine(seed);
  std::vector<std::uint64_t> cnt(max_state + 1, 0);
  long long x = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    x = uniform01(eng) < p0 ? std::max(0LL, x - k) : x + l;
    ++cnt[std::min<std::size_t>(static_cast<std::size_t>(x), max_state)];
  }
  std::vector<double> f(max_state + 1);
  for (std::size_t i = 0; i <= max_state; ++i) f[i] = static_cast<double>(cnt[i]) / static_cast<double>(n);
  return f;
}

}  // namespace ifslab
