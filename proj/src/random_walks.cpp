#include "ifslab/random_walks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "ifslab/errors.hpp"

namespace ifslab {

bool WalkParams::zero_drift() const {
  return std::abs(drift()) <= 1e-12 * (std::abs(step_down) + std::abs(step_up));
}

WalkParams make_walk(double step_down, double step_up, double p0) {
  if (!(step_down < 0.0) || !std::isfinite(step_down)) throw DomainError("step_down must be negative");
  if (!(step_up > 0.0) || !std::isfinite(step_up)) throw DomainError("step_up must be positive");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError("p0 must lie in [0,1]");
  return {step_down, step_up, p0};
}

WalkParams make_zero_drift_walk(double p0, double c) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0,1)");
  if (!(c > 0.0)) throw DomainError("step scale must be positive");
  return {-(1.0 - p0) * c, p0 * c, p0};
}

WalkParams derivative_walk(const SystemParams& sys) {
  return {-std::log(static_cast<double>(sys.N)), std::log(static_cast<double>(sys.M)), sys.p0};
}

double LevelSchedule::level(std::uint64_t n) const {
  return 2.0 * std::log(static_cast<double>(n) + p) + std::log(eps);
}

LevelSchedule LevelSchedule::make(int p, double eps) {
  if (p < 1) throw DomainError("schedule offset p must be >= 1");
  const double lo = 1.0 / ((p + 1.0) * (p + 1.0)), hi = 1.0 / (static_cast<double>(p) * p);
  if (!(eps > lo && eps < hi)) {
    std::ostringstream os;
    os << "eps = " << eps << " must satisfy 1/(p+1)^2 < eps < 1/p^2 for p = " << p;
    throw DomainError(os.str());
  }
  return {p, eps};
}

LevelSchedule LevelSchedule::from_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  return make(static_cast<int>(std::floor(1.0 / std::sqrt(eps))), eps);
}

std::vector<double> simulate_walk(const WalkParams& wp, double z0, std::size_t n, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::vector<double> z(n + 1);
  z[0] = z0;
  // One uniform per step, step down iff u < p0: the same draw that selects
  // symbol 0 in SymbolStream, so derivative walks match orbit log-derivatives.
  for (std::size_t i = 0; i < n; ++i) z[i + 1] = z[i] + (uniform01(eng) < wp.p0 ? wp.step_down : wp.step_up);
  return z;
}

const char* to_string(ExitSide s) {
  switch (s) {
    case ExitSide::below_zero: return "below0";
    case ExitSide::above_level: return "aboveK";
    case ExitSide::censored: return "censored";
  }
  return "?";
}

PassageResult first_passage(const WalkParams& wp, double z0, std::optional<double> upper, Engine& eng,
                            std::uint64_t cap) {
  if (!(z0 >= 0.0)) throw DomainError("z0 must be >= 0");
  if (upper && !(z0 <= *upper)) throw DomainError("z0 must not exceed the upper level");
  const double K = upper ? *upper : INFINITY;
  double z = z0;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    z += uniform01(eng) < wp.p0 ? wp.step_down : wp.step_up;
    if (z < 0.0) return {n, ExitSide::below_zero, z};
    if (z > K) return {n, ExitSide::above_level, z};
  }
  return {cap, ExitSide::censored, z};
}

PassageResult first_passage(const WalkParams& wp, double z0, std::optional<double> upper, std::uint64_t seed,
                            std::uint64_t cap) {
  Engine eng = make_engine(seed);
  return first_passage(wp, z0, upper, eng, cap);
}

double wald_bound(const WalkParams& wp) {
  const double a = wp.drift();
  if (!(a < 0.0)) throw PreconditionError("wald_bound needs negative drift");
  return -wp.p0 * wp.step_down / std::abs(a);
}

double martingale_exponent(const WalkParams& wp) {
  if (!(wp.drift() < 0.0)) throw PreconditionError("martingale_exponent needs negative drift");
  const double p0 = wp.p0, L = wp.step_down, R = wp.step_up;
  auto phi = [&](double r) { return p0 * std::expm1(L * r) + (1.0 - p0) * std::expm1(R * r); };
  auto dphi = [&](double r) { return p0 * L * std::exp(L * r) + (1.0 - p0) * R * std::exp(R * r); };
  // phi(0) = 0, phi'(0) = drift < 0 and phi is convex: one sign change on (0, inf).
  double lo = 0.0, hi = 50.0 / R;
  if (!(phi(hi) > 0.0)) throw NumericalError("martingale_exponent: root not bracketed by 50/R");
  int it = 0;
  for (; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int k = 0; k < 3 && it < 200; ++k, ++it) {
    const double d = dphi(r);
    if (d <= 0.0) break;
    const double next = r - phi(r) / d;
    if (!(next > lo * 0.5 && next < hi * 2.0)) break;
    r = next;
  }
  if (!(std::abs(phi(r)) < 1e-13) || !(r > 0.0))
    throw NumericalError("martingale_exponent: residual target not met in 200 iterations");
  return r;
}

double escape_prob_formula(double r, double K, double z0, double c1, double c2) {
  const double eK = std::exp(-K * r);
  return (std::exp(c2 * r) - std::exp(z0 * r) * eK) / (std::exp(c2 * r) - std::exp(c1 * r) * eK);
}

Bracket escape_prob_bracket(const WalkParams& wp, double K, double z0) {
  if (!(z0 >= 0.0 && z0 <= K)) throw DomainError("escape_prob_bracket needs 0 <= z0 <= K");
  const double r = martingale_exponent(wp);
  Bracket b{INFINITY, -INFINITY};
  for (double c1 : {wp.step_down, 0.0})
    for (double c2 : {0.0, wp.step_up}) {
      const double a = escape_prob_formula(r, K, z0, c1, c2);
      b.lower = std::min(b.lower, a);
      b.upper = std::max(b.upper, a);
    }
  return b;
}

StopResult stop_S_timedep(const WalkParams& wp, const LevelSchedule& sched, double z0, Engine& eng,
                          std::uint64_t cap) {
  if (!wp.zero_drift()) throw PreconditionError("stop_S_timedep needs a zero-drift walk");
  if (!(z0 > sched.level(0))) throw PreconditionError("z0 must lie above the level K_0");
  double z = z0;
  const double le = std::log(sched.eps);
  for (std::uint64_t n = 1; n <= cap; ++n) {
    z += uniform01(eng) < wp.p0 ? wp.step_down : wp.step_up;
    if (z < 2.0 * std::log(static_cast<double>(n + sched.p)) + le) return {n, false};
  }
  return {cap, true};
}

StopResult stop_S_timedep(const WalkParams& wp, const LevelSchedule& sched, double z0, std::uint64_t seed,
                          std::uint64_t cap) {
  Engine eng = make_engine(seed);
  return stop_S_timedep(wp, sched, z0, eng, cap);
}

TangentLine tangent_levels(const LevelSchedule& sched, std::uint64_t m) {
  const double mp = static_cast<double>(m) + sched.p;
  return {sched.level(m) - 2.0 * static_cast<double>(m) / mp, 2.0 / mp};
}

namespace {

int log2_exact(int v) {
  if (v <= 0 || (v & (v - 1)) != 0) return -1;
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

// Point of [0,1) held as its full binary expansion, most significant digit at the back.
// Used when M and N are powers of two: there every map is a digit shift, and following
// the orbit in double precision would truncate digits that later move back to the front.
class BinaryPoint {
 public:
  explicit BinaryPoint(double x) {
    std::vector<std::uint8_t> msb_first;
    while (x != 0.0) {
      x *= 2.0;
      const bool one = x >= 1.0;
      msb_first.push_back(one);
      if (one) x -= 1.0;
    }
    digits_.assign(msb_first.rbegin(), msb_first.rend());
  }

  void expand(int shift) {
    for (int k = 0; k < shift && !digits_.empty(); ++k) digits_.pop_back();
  }

  void contract(int shift, unsigned prefix) {
    for (int k = 0; k < shift; ++k) digits_.push_back((prefix >> k) & 1u);
  }

  double value() const {
    double v = 0.0, w = 0.5;
    const std::size_t take = std::min<std::size_t>(digits_.size(), 64);
    for (std::size_t k = 0; k < take; ++k, w *= 0.5) v += digits_[digits_.size() - 1 - k] * w;
    return v;
  }

 private:
  std::vector<std::uint8_t> digits_;
};

}  // namespace

StopResult stop_W(const SystemParams& sys, double eps, double xJ, SymbolStream& stream, std::uint64_t cap) {
  const LevelSchedule sched = LevelSchedule::from_eps(eps);
  if (!(xJ >= 0.0 && xJ < 1.0)) throw DomainError("xJ must lie in [0,1)");
  const double lnN = std::log(static_cast<double>(sys.N)), lnM = std::log(static_cast<double>(sys.M));
  const double le = std::log(eps);
  const int bitsN = log2_exact(sys.N), bitsM = log2_exact(sys.M);
  const bool binary = bitsN > 0 && bitsM > 0;
  BinaryPoint exact(binary ? xJ : 0.0);
  double x = xJ, z = 0.0;
  Symbol s = stream.next();  // omega_0
  for (std::uint64_t n = 1; n <= cap; ++n) {
    if (!binary)
      x = apply_map_unchecked(sys, s, x);
    else if (s == 0)
      exact.expand(bitsN);
    else
      exact.contract(bitsM, static_cast<unsigned>(s - 1));
    z += s == 0 ? -lnN : lnM;
    s = stream.next();  // omega_n
    const double pn = static_cast<double>(n + sched.p);
    if (z < 2.0 * std::log(pn) + le) return {n, false};
    if (s == 0) {
      if (binary) x = exact.value();
      // Distance from x to the nearest of 1/N, ..., (N-1)/N.
      const double r = 1.0 / (pn * pn);
      const double v = x * sys.N;
      long long c = std::llround(v);
      c = std::clamp<long long>(c, 1, sys.N - 1);
      if (std::abs(v - static_cast<double>(c)) <= r * sys.N) return {n, false};
    }
  }
  return {cap, true};
}

StopResult stop_V(const SystemParams& sys, std::span<const Symbol> pattern, SymbolStream& stream,
                  std::uint64_t cap) {
  const std::size_t D = pattern.size();
  if (D == 0) throw DomainError("pattern must be nonempty");
  for (Symbol s : pattern)
    if (s < 1 || s > sys.M) throw DomainError("pattern symbols must lie in 1..M");
  // Knuth-Morris-Pratt prefix function so each symbol is examined once.
  std::vector<std::size_t> fail(D, 0);
  for (std::size_t i = 1, k = 0; i < D; ++i) {
    while (k > 0 && pattern[i] != pattern[k]) k = fail[k - 1];
    if (pattern[i] == pattern[k]) ++k;
    fail[i] = k;
  }
  std::size_t matched = 0;
  for (std::uint64_t n = 0; n < cap; ++n) {
    const Symbol s = stream.next();
    while (matched > 0 && s != pattern[matched]) matched = fail[matched - 1];
    if (s == pattern[matched]) ++matched;
    if (matched == D) return {n, false};
  }
  return {cap, true};
}

}  // namespace ifslab
