#include <chrono>
#include <cmath>
#include <iostream>
#include <new>
#include <numeric>
#include <sstream>

#include "ifslab/acceptance.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/experiments.hpp"
#include "ifslab/multivalued.hpp"
#include "ifslab/random_walks.hpp"
#include "ifslab/skew_products.hpp"
#include "run_config.hpp"

namespace ifslab::cli {

namespace {

ExperimentReport base_report(const RunConfig& c, const std::string& name) {
  ExperimentReport r;
  r.experiment = name;
  if (c.sys) r.config = system_json(*c.sys);
  r.config["seed"] = c.seed;
  return r;
}

Table summary_table(const ExperimentReport& r, const std::vector<std::string>& keys) {
  Table t;
  t.rows.emplace_back();
  for (const auto& k : keys) {
    t.columns.push_back(k);
    t.rows.back().push_back(r.aggregate(k));
  }
  return t;
}

ExperimentReport system_info(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  ExperimentReport r = base_report(c, "system-info");
  r.aggregates["lyap"] = sys.lyap;
  r.aggregates["regime"] = to_string(lyap_regime(sys));
  r.aggregates["contraction_prob"] = sys.contraction_prob();
  r.aggregates["mult_dependent"] = c.multdep.has_value();
  if (c.multdep) {
    const auto [kappa, k, l] = *c.multdep;
    r.aggregates["kappa"] = kappa;
    r.aggregates["k"] = k;
    r.aggregates["l"] = l;
    if (sys.p0 > static_cast<double>(l) / (k + l) && sys.p0 < 1.0) r.aggregates["nu1"] = nu1(sys.p0, k, l);
  }
  Table probs;
  probs.columns = {"symbol", "prob", "lower", "upper"};
  for (int i = 0; i <= sys.M; ++i)
    probs.rows.push_back({static_cast<double>(i), sys.probs[i], sys.breakpoints[i], sys.breakpoints[i + 1]});
  Table summary;
  summary.columns = {"M", "N", "p0", "lyap"};
  summary.rows.push_back({static_cast<double>(sys.M), static_cast<double>(sys.N), sys.p0, sys.lyap});
  r.tables = {{"summary", summary}, {"probs", probs}};
  return r;
}

ExperimentReport orbit(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  ExperimentReport r = base_report(c, "orbit");
  const Word word = c.word.empty() && c.raw.count("word") == 0 ? sample_word(sys, c.seed, c.n) : c.word;
  const auto recs = iterate_orbit(sys, word, c.starts);
  Table t;
  t.columns = {"t", "symbol"};
  for (std::size_t j = 0; j < recs.size(); ++j) {
    t.columns.push_back("x" + std::to_string(j));
    t.columns.push_back("log_deriv" + std::to_string(j));
    t.columns.push_back("crossing" + std::to_string(j));
  }
  for (std::size_t s = 0; s <= word.size(); ++s) {
    std::vector<double> row{static_cast<double>(s), s == 0 ? -1.0 : static_cast<double>(word[s - 1])};
    for (const auto& rec : recs) {
      row.push_back(rec.points[s]);
      row.push_back(rec.log_deriv[s]);
      row.push_back(s == 0 ? 0.0 : static_cast<double>(rec.crossings[s - 1]));
    }
    t.rows.push_back(std::move(row));
  }
  r.config["starts"] = c.starts;
  r.config["word"] = word;
  r.aggregates["steps"] = word.size();
  r.aggregates["final_log_deriv"] = recs.front().log_deriv.back();
  r.tables = {{"orbit", t}};
  return r;
}

ExperimentReport transfer_check(const RunConfig& c) {
  ExperimentReport r = base_report(c, "transfer-check");
  std::vector<double> xs(c.points);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / xs.size();
  const double dev = transfer_density_check(*c.sys, xs);
  r.config["points"] = c.points;
  r.aggregates["deviation"] = dev;
  r.aggregates["pass"] = dev < 1e-14;
  r.tables = {{"summary", summary_table(r, {"deviation"})}};
  return r;
}

ExperimentReport gamma_check(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  ExperimentReport r = base_report(c, "gamma-check");
  Engine eng = make_engine(c.seed);
  double round = 0.0, factor = 0.0;
  for (std::uint64_t i = 0; i < c.points; ++i) {
    const Point3 p{uniform01(eng), uniform01(eng), uniform01(eng)};
    const Point3 f = gamma(sys, p, Direction::forward);
    const Point3 b = gamma(sys, f, Direction::inverse);
    round = std::max({round, std::abs(b.w - p.w), std::abs(b.x - p.x), std::abs(b.y - p.y)});
    const auto [gw, gx] = G_map(sys, p.w, p.x);
    factor = std::max({factor, std::abs(gw - f.w), std::abs(gx - f.x)});
  }
  r.config["points"] = c.points;
  r.aggregates["max_round_trip"] = round;
  r.aggregates["max_factor_error"] = factor;
  r.aggregates["branch_jacobians"] = gamma_branch_jacobians(sys);
  r.aggregates["pass"] = round <= 1e-12 && factor <= 1e-12;
  r.tables = {{"summary", summary_table(r, {"max_round_trip", "max_factor_error"})}};
  return r;
}

ExperimentReport fiber(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  ExperimentReport r = base_report(c, "fiber");
  const FiberDistribution fd = fiber_distribution(sys, c.eta);
  Table t;
  t.columns = {"numerator", "value", "count"};
  for (const auto& [num, count] : fd.counts)
    t.rows.push_back({num.convert_to<double>(), GridPoint{num, fd.level}.value(sys.M), static_cast<double>(count)});
  r.config["eta"] = c.eta;
  r.aggregates["words"] = fd.words;
  r.aggregates["level"] = fd.level;
  r.aggregates["support"] = fd.counts.size();
  const auto gl = fd.grid_level(sys.M);
  r.aggregates["grid_level"] = gl ? Json(*gl) : Json(nullptr);
  r.aggregates["uniform"] = fd.uniform(sys.M);
  r.tables = {{"fiber", t}};
  return r;
}

ExperimentReport strip(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  ExperimentReport r = base_report(c, "strip");
  const KappaAdicInterval iv = strip_interval(sys, c.word);
  // Image of a fine grid of [0,1) under the word, checked against the strip.
  bool contained = true;
  for (int i = 0; i < 1000 && contained; ++i) {
    double x = i / 1000.0;
    for (Symbol s : c.word) x = apply_map_unchecked(sys, s, x);
    contained = iv.contains(x, 1e-12);
  }
  r.config["word"] = c.word;
  r.aggregates["index"] = iv.index.str();
  r.aggregates["level"] = iv.level;
  r.aggregates["kappa"] = iv.kappa;
  r.aggregates["lower"] = iv.lower();
  r.aggregates["upper"] = iv.upper();
  r.aggregates["image_contained"] = contained;
  r.tables = {{"summary", summary_table(r, {"level", "kappa", "lower", "upper"})}};
  return r;
}

Json walk_json(const WalkParams& wp) {
  return Json{{"step_down", wp.step_down}, {"step_up", wp.step_up}, {"p0", wp.p0}, {"drift", wp.drift()}};
}

ExperimentReport walk(const RunConfig& c) {
  ExperimentReport r = base_report(c, "walk");
  const WalkParams& wp = *c.walk;
  const auto z = simulate_walk(wp, c.z0, c.n, c.seed);
  Table t;
  t.columns = {"n", "z"};
  for (std::size_t i = 0; i < z.size(); ++i) t.rows.push_back({static_cast<double>(i), z[i]});
  r.config["walk"] = walk_json(wp);
  r.config["z0"] = c.z0;
  r.aggregates["drift"] = wp.drift();
  r.aggregates["zero_drift"] = wp.zero_drift();
  r.aggregates["final"] = z.back();
  r.tables = {{"path", t}};
  return r;
}

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  if (v.size() < 2) return {m, NAN};
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  return {m, std::sqrt(q / (v.size() - 1) / v.size())};
}

ExperimentReport stopping(const RunConfig& c) {
  ExperimentReport r = base_report(c, "stopping");
  r.config["kind"] = c.kind;
  r.config["trials"] = c.trials;
  r.config["cap"] = c.cap;
  Table t;
  std::vector<double> times;
  std::uint64_t censored = 0;
  if (c.kind == "T" || c.kind == "TK") {
    const WalkParams& wp = *c.walk;
    r.config["walk"] = walk_json(wp);
    r.config["z0"] = c.z0;
    if (c.K) r.config["K"] = *c.K;
    t.columns = {"trial", "time", "side", "final_position"};
    std::uint64_t below = 0;
    std::vector<double> finals;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
      const auto res = first_passage(wp, c.z0, c.K, derive_seed(c.seed, i), c.cap);
      t.rows.push_back({static_cast<double>(i), static_cast<double>(res.time), static_cast<double>(res.side),
                        res.final_position});
      times.push_back(static_cast<double>(res.time));
      finals.push_back(res.final_position);
      censored += res.censored();
      below += res.side == ExitSide::below_zero;
    }
    if (c.kind == "TK") r.aggregates["fraction_below"] = static_cast<double>(below) / c.trials;
    if (wp.drift() < 0.0) {
      r.aggregates["wald_bound"] = wald_bound(wp);
      if (c.K) {
        const double rs = martingale_exponent(wp);
        const Bracket b = escape_prob_bracket(wp, *c.K, c.z0);
        r.aggregates["martingale_exponent"] = rs;
        r.aggregates["escape_lower"] = b.lower;
        r.aggregates["escape_upper"] = b.upper;
        std::vector<double> e;
        for (double z : finals) e.push_back(std::exp(rs * z));
        r.aggregates["martingale_mean"] = mean_stderr(e).first;
        r.aggregates["martingale_target"] = std::exp(rs * c.z0);
      }
    }
  } else {
    t.columns = {"trial", "time", "censored"};
    for (std::uint64_t i = 0; i < c.trials; ++i) {
      const std::uint64_t s = derive_seed(c.seed, i);
      StopResult res;
      if (c.kind == "S") {
        res = stop_S_timedep(*c.walk, LevelSchedule::from_eps(c.eps), c.z0, s, c.cap);
      } else {
        SymbolStream st(*c.sys, s);
        res = c.kind == "W" ? stop_W(*c.sys, c.eps, c.xJ, st, c.cap) : stop_V(*c.sys, c.word, st, c.cap);
      }
      t.rows.push_back({static_cast<double>(i), static_cast<double>(res.time), static_cast<double>(res.censored)});
      times.push_back(static_cast<double>(res.time));
      censored += res.censored;
    }
    if (c.kind == "S") {
      r.config["walk"] = walk_json(*c.walk);
      r.config["z0"] = c.z0;
    }
    if (c.kind == "S" || c.kind == "W") {
      const LevelSchedule sched = LevelSchedule::from_eps(c.eps);
      r.config["eps"] = c.eps;
      r.config["schedule_p"] = sched.p;
    }
    if (c.kind == "W") r.config["xJ"] = c.xJ;
    if (c.kind == "V") r.config["pattern"] = c.word;
  }
  const auto [m, se] = mean_stderr(times);
  r.aggregates["mean_time"] = m;
  r.aggregates["stderr_time"] = se;
  r.censored = censored;
  r.tables = {{"times", t}};
  return r;
}

ExperimentReport delta_mass(const RunConfig& c) {
  ExperimentReport r;
  r.experiment = "delta-mass";
  r.config = Json{{"p0", c.p0}, {"k", c.k}, {"l", c.l}, {"kappa", c.kappa}};
  const CoefficientSequence cs = solve_b(c.p0, c.k, c.l, c.H);
  Table t;
  t.columns = {"eps", "mass"};
  std::vector<double> masses;
  for (double e : c.eps_grid) {
    masses.push_back(delta_eps_mass(cs, c.kappa, e));
    t.rows.push_back({e, masses.back()});
  }
  const double nu = nu1(c.p0, c.k, c.l);
  r.aggregates["nu1"] = nu;
  r.aggregates["growth"] = nu * c.kappa;
  r.aggregates["H"] = cs.H;
  // Small-eps exponent: -ln nu1 / ln kappa while nu1 kappa > 1, else 1.
  r.aggregates["exponent"] = nu * c.kappa > 1.0 ? -std::log(nu) / std::log(static_cast<double>(c.kappa)) : 1.0;
  if (c.eps_grid.size() >= 2) r.aggregates["slope"] = loglog_slope(c.eps_grid, masses);
  r.tables = {{"delta", t}};
  return r;
}

ExperimentReport experiment(const RunConfig& c) {
  const SystemParams& sys = *c.sys;
  std::optional<PairStart> start;
  if (c.x0) start = PairStart{*c.x0, *c.y0};
  if (c.experiment == "sync") return sync_experiment(sys, c.trials, c.n, c.seed, start);
  if (c.experiment == "intermit") return intermittency_experiment(sys, c.eps, c.beta, c.n, c.trials, c.seed, start);
  if (c.experiment == "diverge") return divergence_experiment(sys, c.eps_grid, c.n, c.trials, c.seed);
  if (c.experiment == "equi") return equidistribution_test(sys, c.bins, c.n, c.seed);
  if (c.experiment == "hist2d") return two_point_histogram(sys, c.grid, c.n, c.seed);
  throw UsageError("unknown experiment '" + c.experiment + "'");
}

int verify_all(const RunConfig& c) {
  const auto results = acceptance::run(c.criteria, &std::cout);
  bool ok = true;
  Json summary = Json::array();
  for (const auto& res : results) {
    ok = ok && res.passed;
    summary.push_back({{"id", res.id},
                       {"name", res.name},
                       {"passed", res.passed},
                       {"seconds", res.seconds},
                       {"budget_s", res.budget_s},
                       {"detail", res.detail}});
  }
  std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << std::endl;
  if (c.out != "-") {
    std::ostringstream os;
    if (c.format == Format::json) {
      os << summary.dump(2) << '\n';
    } else {
      os << "id,passed,seconds,budget_s\n";
      for (const auto& res : results)
        os << res.id << ',' << (res.passed ? 1 : 0) << ',' << format_real(res.seconds) << ','
           << format_real(res.budget_s) << '\n';
    }
    write_text(c.out, os.str());
  }
  return ok ? 0 : 1;
}

}  // namespace

int run(const RunConfig& c) {
  const std::string& cmd = c.command;
  if (cmd == "verify-all") return verify_all(c);
  if (cmd == "stationary") {
    emit_coefficients(solve_b(c.p0, c.k, c.l, c.H), c.out, c.format);
    return 0;
  }
  if (cmd == "roots") {
    emit_roots(char_roots(c.p0, c.k, c.l), c.out, c.format);
    return 0;
  }
  ExperimentReport r;
  const auto t0 = std::chrono::steady_clock::now();
  if (cmd == "system-info") r = system_info(c);
  else if (cmd == "orbit") r = orbit(c);
  else if (cmd == "transfer-check") r = transfer_check(c);
  else if (cmd == "gamma-check") r = gamma_check(c);
  else if (cmd == "fiber") r = fiber(c);
  else if (cmd == "strip") r = strip(c);
  else if (cmd == "walk") r = walk(c);
  else if (cmd == "stopping") r = stopping(c);
  else if (cmd == "delta-mass") r = delta_mass(c);
  else if (cmd == "experiment") r = experiment(c);
  else throw UsageError("unknown command '" + cmd + "'");
  if (r.wall_time_s == 0.0)
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit_report(r, c.out, c.format, c.table);
  return 0;
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  try {
    return run(parse_config(args));
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return 0;
  } catch (const Error& e) {
    std::cerr << "ifslab: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    std::cerr << "ifslab: out of memory\n";
    return exit_code(ErrorKind::resource);
  } catch (const std::exception& e) {
    std::cerr << "ifslab: internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ifslab::cli
