#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifslab/rng.hpp"

namespace ifslab {

/// Symbol 0 is the expanding map x -> N x mod 1, symbols 1..M the contractions
/// x -> (x + i - 1) / M.
using Symbol = int;
using Word = std::vector<Symbol>;

struct SystemParams {
  int M = 2;
  int N = 2;
  double p0 = 0.5;
  std::vector<double> probs;        // size M + 1
  std::vector<double> breakpoints;  // size M + 2, r_0 = 0, r_{M+1} = 1
  double lyap = 0.0;                // p0 ln N - (1 - p0) ln M

  double contraction_prob() const { return (1.0 - p0) / M; }
};

SystemParams make_system(int M, int N, double p0);

enum class LyapRegime { negative, zero, positive };

/// Sign of the Lyapunov exponent. `tol` absorbs rounding when p0 ln N and
/// (1 - p0) ln M agree analytically (e.g. M = N, p0 = 1/2).
LyapRegime lyap_regime(const SystemParams& sys, double tol = 1e-12);
const char* to_string(LyapRegime r);

/// Applies f_i. Throws DomainError for x outside [0,1) or i outside 0..M.
double apply_map(const SystemParams& sys, Symbol i, double x);

inline double expand_mod1(int N, double x) {
  const double y = x * N;
  double r = y - static_cast<double>(static_cast<long long>(y));
  return r >= 1.0 ? 0.0 : r;
}

inline double contract(int M, Symbol i, double x) {
  double r = (x + (i - 1)) / M;
  return r < 1.0 ? r : 0x1.fffffffffffffp-1;
}

inline double apply_map_unchecked(const SystemParams& sys, Symbol i, double x) {
  return i == 0 ? expand_mod1(sys.N, x) : contract(sys.M, i, x);
}

/// Index j of the continuity interval [j/N, (j+1)/N) of f_0 containing x.
inline int continuity_interval(int N, double x) {
  int j = static_cast<int>(x * N);
  return j < N ? j : N - 1;
}

/// Inverse-CDF sampling: u in [r_i, r_{i+1}) gives symbol i.
inline Symbol symbol_from_uniform(const SystemParams& sys, double u) {
  if (u < sys.breakpoints[1]) return 0;
  const int M = sys.M;
  for (int i = 2; i <= M; ++i)
    if (u < sys.breakpoints[i]) return i - 1;
  return M;
}

class SymbolStream {
 public:
  SymbolStream(const SystemParams& sys, std::uint64_t seed);

  Symbol next() { return symbol_from_uniform(sys_, uniform01(engine_)); }
  Word take(std::size_t n);
  std::uint64_t seed() const { return seed_; }
  const SystemParams& system() const { return sys_; }

 private:
  SystemParams sys_;
  std::uint64_t seed_;
  Engine engine_;
};

/// Materializes the first n symbols of the stream with the given seed.
Word sample_word(const SystemParams& sys, std::uint64_t seed, std::size_t n);

struct OrbitRecord {
  std::vector<double> points;    // x_0 .. x_n
  std::vector<double> log_deriv; // ln (f^t)' for t = 0 .. n
  std::vector<bool> crossings;   // step t applied f_0 while this point and another were split by a discontinuity
};

std::vector<OrbitRecord> iterate_orbit(const SystemParams& sys, std::span<const Symbol> word,
                                       std::span<const double> starts);
std::vector<OrbitRecord> iterate_orbit(const SystemParams& sys, SymbolStream& stream,
                                       std::span<const double> starts, std::size_t n);

/// max_x |sum_i probs_i * density of (f_i)_* Lebesgue at x - 1|, computed branch by branch.
double transfer_density_check(const SystemParams& sys, std::span<const double> xs);
/// Same check with an explicit (possibly inconsistent) probability vector of size M + 1.
double transfer_density_check(const SystemParams& sys, std::span<const double> probs,
                              std::span<const double> xs);

}  // namespace ifslab
