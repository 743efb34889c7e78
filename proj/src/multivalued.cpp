#include "ifslab/multivalued.hpp"

#include <cmath>

#include "ifslab/errors.hpp"
#include "ifslab/stationary_measures.hpp"

namespace ifslab {

namespace {

BigInt big_pow(int base, int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// base^e when it stays below 2^62, else nullopt.
std::optional<std::uint64_t> small_pow(int base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(base)) return std::nullopt;
    r *= static_cast<std::uint64_t>(base);
  }
  return r;
}

template <class Int>
struct FiberWalker {
  const SystemParams& sys;
  const BinaryWord& eta;
  std::vector<Int> levels;  // M^g for g = 0..gamma
  std::map<BigInt, std::uint64_t>& counts;

  // a is the numerator of f^t(0) at level g (contractions so far).
  void run(std::size_t t, int g, const Int& a) {
    if (t == eta.size()) {
      ++counts[BigInt(a)];
      return;
    }
    if (eta[t] == 0) {
      run(t + 1, g, Int((a * sys.N) % levels[g]));
      return;
    }
    for (int s = 1; s <= sys.M; ++s) run(t + 1, g + 1, Int(a + (s - 1) * levels[g]));
  }
};

}  // namespace

double GridPoint::value(int M) const {
  return static_cast<double>(numerator) / static_cast<double>(big_pow(M, level));
}

GridPoint GridPoint::reduced(int M) const {
  GridPoint r = *this;
  if (r.numerator == 0) return {0, 0};
  while (r.level > 0 && r.numerator % M == 0) {
    r.numerator /= M;
    --r.level;
  }
  return r;
}

std::uint64_t GridMultiset::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, c] : counts) t += c;
  return t;
}

std::optional<int> GridMultiset::grid_level(int M) const {
  if (counts.empty()) return std::nullopt;
  BigInt size = counts.size();
  int j = 0;
  BigInt pw = 1;
  while (pw < size) {
    pw *= M;
    ++j;
  }
  if (pw != size || j > level) return std::nullopt;
  const BigInt step = big_pow(M, level - j);
  for (const auto& [num, c] : counts)
    if (num % step != 0) return std::nullopt;
  return j;
}

bool GridMultiset::uniform(int M) const {
  if (!grid_level(M)) return false;
  const std::uint64_t first = counts.begin()->second;
  for (const auto& [num, c] : counts)
    if (c != first) return false;
  return true;
}

GridMultiset grid_image(const SystemParams& sys, int level, SymbolClass cls) {
  if (level < 0) throw DomainError("level must be >= 0");
  const auto size = small_pow(sys.M, level + (cls == SymbolClass::contracting ? 1 : 0));
  if (!size || *size > kFiberCap) throw ResourceError("grid_image: grid exceeds the enumeration cap");
  GridMultiset out;
  if (cls == SymbolClass::contracting) {
    out.level = level + 1;
    for (std::uint64_t a = 0; a < *size; ++a) out.counts[BigInt(a)] = 1;
    return out;
  }
  out.level = level;
  for (std::uint64_t a = 0; a < *size; ++a) ++out.counts[BigInt((a * sys.N) % *size)];
  return out;
}

BinaryWord project_word(std::span<const Symbol> word) {
  BinaryWord eta(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) eta[i] = word[i] == 0 ? 0 : 1;
  return eta;
}

FiberDistribution fiber_distribution(const SystemParams& sys, const BinaryWord& eta, std::uint64_t cap) {
  int gamma = 0;
  for (auto e : eta) {
    if (e > 1) throw DomainError("binary word entries must be 0 or 1");
    gamma += e;
  }
  const auto words = small_pow(sys.M, gamma);
  if (!words || *words > cap) throw ResourceError("fiber_distribution: M^gamma exceeds the enumeration cap");
  FiberDistribution fd;
  fd.level = gamma;
  fd.words = *words;
  // Numerators stay below M^gamma * N; use machine words when that fits.
  const auto top = small_pow(sys.M, gamma + 1);
  if (top && *top < (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(sys.N)) {
    FiberWalker<std::uint64_t> w{sys, eta, {}, fd.counts};
    for (int g = 0; g <= gamma; ++g) w.levels.push_back(*small_pow(sys.M, g));
    w.run(0, 0, 0);
  } else {
    FiberWalker<BigInt> w{sys, eta, {}, fd.counts};
    for (int g = 0; g <= gamma; ++g) w.levels.push_back(big_pow(sys.M, g));
    w.run(0, 0, BigInt(0));
  }
  return fd;
}

double KappaAdicInterval::lower() const {
  return static_cast<double>(index) / std::pow(static_cast<double>(kappa), level);
}

double KappaAdicInterval::upper() const {
  return static_cast<double>(index + 1) / std::pow(static_cast<double>(kappa), level);
}

bool KappaAdicInterval::contains(double x, double slack) const {
  return x >= lower() - slack && x < upper() + slack;
}

KappaAdicInterval strip_interval(const SystemParams& sys, std::span<const Symbol> word) {
  const auto md = mult_dependence(sys.M, sys.N);
  if (!md) throw PreconditionError("strip_interval needs multiplicatively dependent M and N");
  KappaAdicInterval iv{0, 0, md->kappa};
  for (Symbol s : word) {
    if (s < 0 || s > sys.M) throw DomainError("symbol out of range 0..M");
    if (s == 0) {
      if (iv.level >= md->k) {
        iv.level -= md->k;
        iv.index %= big_pow(md->kappa, iv.level);
      } else {
        iv.index = 0;
        iv.level = 0;
      }
    } else {
      iv.index += BigInt(s - 1) * big_pow(md->kappa, iv.level);
      iv.level += md->l;
    }
  }
  return iv;
}

}  // namespace ifslab
