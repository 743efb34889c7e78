#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifslab/ifs_core.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

/// Walk on the line: step_down (< 0) with probability p0, step_up (> 0) otherwise.
struct WalkParams {
  double step_down = -1.0;
  double step_up = 1.0;
  double p0 = 0.5;

  double drift() const { return p0 * step_down + (1.0 - p0) * step_up; }
  /// Drift is zero up to rounding of the step products.
  bool zero_drift() const;
};

WalkParams make_walk(double step_down, double step_up, double p0);
/// Steps -(1-p0) c and p0 c, so the drift cancels algebraically.
WalkParams make_zero_drift_walk(double p0, double c);
/// Walk of z_n = -ln (f^n)' for the system: -ln N with probability p0, +ln M otherwise.
WalkParams derivative_walk(const SystemParams& sys);

/// Levels K_n = 2 ln(n + p) + ln eps with 1/(p+1)^2 < eps < 1/p^2.
struct LevelSchedule {
  int p = 1;
  double eps = 0.5;

  double level(std::uint64_t n) const;
  static LevelSchedule make(int p, double eps);
  static LevelSchedule from_eps(double eps);
};

inline constexpr std::uint64_t kDefaultCap = 1'000'000;

std::vector<double> simulate_walk(const WalkParams& wp, double z0, std::size_t n, std::uint64_t seed);

enum class ExitSide { below_zero, above_level, censored };
const char* to_string(ExitSide s);

struct PassageResult {
  std::uint64_t time = 0;
  ExitSide side = ExitSide::censored;
  double final_position = 0.0;
  bool censored() const { return side == ExitSide::censored; }
};

/// First n > 0 with z_n < 0, or z_n > upper when an upper level is given.
PassageResult first_passage(const WalkParams& wp, double z0, std::optional<double> upper, Engine& eng,
                            std::uint64_t cap = kDefaultCap);
PassageResult first_passage(const WalkParams& wp, double z0, std::optional<double> upper, std::uint64_t seed,
                            std::uint64_t cap = kDefaultCap);

double wald_bound(const WalkParams& wp);

/// Positive root of p0 e^(L r) + (1-p0) e^(R r) = 1 for negative drift.
double martingale_exponent(const WalkParams& wp);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// Range of the exit-below-zero probability formula over the overshoot
/// averages c1 in [L, 0] and c2 in [0, R].
Bracket escape_prob_bracket(const WalkParams& wp, double K, double z0);
/// The formula itself at given overshoot averages.
double escape_prob_formula(double r, double K, double z0, double c1, double c2);

struct StopResult {
  std::uint64_t time = 0;
  bool censored = false;
};

/// First n > 0 with z_n < K_n for a zero-drift walk.
StopResult stop_S_timedep(const WalkParams& wp, const LevelSchedule& sched, double z0, Engine& eng,
                          std::uint64_t cap = kDefaultCap);
StopResult stop_S_timedep(const WalkParams& wp, const LevelSchedule& sched, double z0, std::uint64_t seed,
                          std::uint64_t cap = kDefaultCap);

struct TangentLine {
  double intercept = 0.0;  // alpha_m
  double slope = 0.0;      // beta_m
  double at(double n) const { return intercept + slope * n; }
};

/// Line tangent to n -> K_n at n = m.
TangentLine tangent_levels(const LevelSchedule& sched, std::uint64_t m);

/// First n > 0 with (f^n)' > 1/((p+n)^2 eps), or f^n(xJ) within 1/(p+n)^2 of a
/// discontinuity of f_0 while the next symbol is 0.
StopResult stop_W(const SystemParams& sys, double eps, double xJ, SymbolStream& stream,
                  std::uint64_t cap = kDefaultCap);

/// Smallest n >= D-1 whose trailing D symbols omega_{n-D+1..n} equal the pattern.
StopResult stop_V(const SystemParams& sys, std::span<const Symbol> pattern, SymbolStream& stream,
                  std::uint64_t cap = kDefaultCap);

}  // namespace ifslab
