#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ifslab/ifs_core.hpp"

namespace ifslab {

using BigInt = boost::multiprecision::cpp_int;

/// The point numerator / M^level of the grid S_level.
struct GridPoint {
  BigInt numerator;
  int level = 0;

  double value(int M) const;
  /// Same point written at the smallest possible level.
  GridPoint reduced(int M) const;
  bool operator==(const GridPoint& o) const = default;
};

/// Points of one grid level with multiplicities, keyed by numerator.
struct GridMultiset {
  int level = 0;
  std::map<BigInt, std::uint64_t> counts;

  std::uint64_t total() const;
  /// Level j such that the support is exactly S_j (written at `level`), if it is.
  std::optional<int> grid_level(int M) const;
  /// Support is a full grid S_j and every point has the same multiplicity.
  bool uniform(int M) const;
};

enum class SymbolClass { expanding = 0, contracting = 1 };

/// Image of S_level under F_0 (class 0, same level, multiplicities kept) or
/// F_1 (class 1, the full grid one level finer).
GridMultiset grid_image(const SystemParams& sys, int level, SymbolClass cls);

using BinaryWord = std::vector<std::uint8_t>;

BinaryWord project_word(std::span<const Symbol> word);

/// Endpoints f^n_omega(0) over the words projecting onto eta, written at the
/// level given by the number of contraction symbols.
struct FiberDistribution : GridMultiset {
  std::uint64_t words = 0;
};

inline constexpr std::uint64_t kFiberCap = std::uint64_t{1} << 24;

/// Counts f^n_omega(0) over all words omega projecting onto eta.
FiberDistribution fiber_distribution(const SystemParams& sys, const BinaryWord& eta,
                                     std::uint64_t cap = kFiberCap);

/// kappa-adic interval [index / kappa^level, (index + 1) / kappa^level).
struct KappaAdicInterval {
  BigInt index;
  int level = 0;
  int kappa = 0;

  double lower() const;
  double upper() const;
  bool contains(double x, double slack = 0.0) const;
};

/// Smallest tracked kappa-adic strip containing f^n_omega([0,1)).
KappaAdicInterval strip_interval(const SystemParams& sys, std::span<const Symbol> word);

}  // namespace ifslab
