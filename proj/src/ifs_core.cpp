#include "ifslab/ifs_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifslab/errors.hpp"

namespace ifslab {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x < 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0,1), got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

SystemParams make_system(int M, int N, double p0) {
  if (M < 2) throw DomainError("M must be >= 2");
  if (N < 2) throw DomainError("N must be >= 2");
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0,1)");
  SystemParams s;
  s.M = M;
  s.N = N;
  s.p0 = p0;
  const double q = (1.0 - p0) / M;
  s.probs.assign(M + 1, q);
  s.probs[0] = p0;
  s.breakpoints.resize(M + 2);
  s.breakpoints[0] = 0.0;
  for (int i = 1; i <= M; ++i) s.breakpoints[i] = p0 + (i - 1) * q;
  s.breakpoints[M + 1] = 1.0;
  s.lyap = p0 * std::log(static_cast<double>(N)) - (1.0 - p0) * std::log(static_cast<double>(M));
  return s;
}

LyapRegime lyap_regime(const SystemParams& sys, double tol) {
  if (sys.lyap > tol) return LyapRegime::positive;
  if (sys.lyap < -tol) return LyapRegime::negative;
  return LyapRegime::zero;
}

const char* to_string(LyapRegime r) {
  switch (r) {
    case LyapRegime::negative: return "negative";
    case LyapRegime::zero: return "zero";
    case LyapRegime::positive: return "positive";
  }
  return "?";
}

double apply_map(const SystemParams& sys, Symbol i, double x) {
  check_unit(x, "x");
  if (i < 0 || i > sys.M) throw DomainError("symbol out of range 0..M");
  return apply_map_unchecked(sys, i, x);
}

SymbolStream::SymbolStream(const SystemParams& sys, std::uint64_t seed)
    : sys_(sys), seed_(seed), engine_(make_engine(seed)) {}

Word SymbolStream::take(std::size_t n) {
  Word w(n);
  for (auto& s : w) s = next();
  return w;
}

Word sample_word(const SystemParams& sys, std::uint64_t seed, std::size_t n) {
  SymbolStream st(sys, seed);
  return st.take(n);
}

namespace {

template <class NextSymbol>
std::vector<OrbitRecord> run_orbit(const SystemParams& sys, std::span<const double> starts,
                                   std::size_t n, NextSymbol&& next) {
  for (double x : starts) check_unit(x, "start");
  const double lnN = std::log(static_cast<double>(sys.N));
  const double lnM = std::log(static_cast<double>(sys.M));
  const std::size_t k = starts.size();
  std::vector<OrbitRecord> recs(k);
  std::vector<double> cur(starts.begin(), starts.end());
  for (std::size_t j = 0; j < k; ++j) {
    recs[j].points.reserve(n + 1);
    recs[j].log_deriv.reserve(n + 1);
    recs[j].crossings.reserve(n);
    recs[j].points.push_back(cur[j]);
    recs[j].log_deriv.push_back(0.0);
  }
  std::vector<int> cell(k);
  double ld = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Symbol s = next();
    if (s < 0 || s > sys.M) throw DomainError("symbol out of range 0..M");
    if (s == 0) {
      for (std::size_t j = 0; j < k; ++j) cell[j] = continuity_interval(sys.N, cur[j]);
      for (std::size_t j = 0; j < k; ++j) {
        bool split = false;
        for (std::size_t o = 0; o < k && !split; ++o) split = cell[o] != cell[j];
        recs[j].crossings.push_back(split);
      }
      ld += lnN;
    } else {
      for (std::size_t j = 0; j < k; ++j) recs[j].crossings.push_back(false);
      ld += -lnM;
    }
    for (std::size_t j = 0; j < k; ++j) {
      cur[j] = apply_map_unchecked(sys, s, cur[j]);
      recs[j].points.push_back(cur[j]);
      recs[j].log_deriv.push_back(ld);
    }
  }
  return recs;
}

}  // namespace

std::vector<OrbitRecord> iterate_orbit(const SystemParams& sys, std::span<const Symbol> word,
                                       std::span<const double> starts) {
  std::size_t t = 0;
  return run_orbit(sys, starts, word.size(), [&] { return word[t++]; });
}

std::vector<OrbitRecord> iterate_orbit(const SystemParams& sys, SymbolStream& stream,
                                       std::span<const double> starts, std::size_t n) {
  return run_orbit(sys, starts, n, [&] { return stream.next(); });
}

double transfer_density_check(const SystemParams& sys, std::span<const double> xs) {
  return transfer_density_check(sys, sys.probs, xs);
}

double transfer_density_check(const SystemParams& sys, std::span<const double> probs,
                              std::span<const double> xs) {
  if (static_cast<int>(probs.size()) != sys.M + 1)
    throw DomainError("probability vector must have M + 1 entries");
  const int M = sys.M, N = sys.N;
  double worst = 0.0;
  for (double x : xs) {
    check_unit(x, "x");
    // f_0 has N preimages of x, each with weight 1/|f_0'| = 1/N.
    double sum = probs[0] * N * (1.0 / N);
    // f_i pushes Lebesgue to M * Lebesgue restricted to [(i-1)/M, i/M).
    for (int i = 1; i <= M; ++i) {
      const double lo = static_cast<double>(i - 1) / M, hi = static_cast<double>(i) / M;
      if (x >= lo && x < hi) sum += probs[i] * M;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace ifslab
