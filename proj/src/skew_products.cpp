#include "ifslab/skew_products.hpp"

#include <cmath>

#include "ifslab/errors.hpp"

namespace ifslab {

namespace {

constexpr double kBelowOne = 0x1.fffffffffffffp-1;

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError(std::string(what) + " must lie in [0,1)");
}

double below_one(double v) { return v < 1.0 ? v : kBelowOne; }

}  // namespace

int coding_branch(const SystemParams& sys, double w) {
  check_unit(w, "w");
  if (w < sys.breakpoints[1]) return 0;
  for (int i = 1; i < sys.M; ++i)
    if (w < sys.breakpoints[i + 1]) return i;
  return sys.M;
}

double L_map(const SystemParams& sys, double w) {
  const int i = coding_branch(sys, w);
  if (i == 0) return below_one(w / sys.p0);
  const double v = sys.M * (w - sys.breakpoints[i]) / (1.0 - sys.p0);
  return v < 0.0 ? 0.0 : below_one(v);
}

double L_map_preimage_weight(const SystemParams& sys) {
  double s = sys.p0;  // expanding branch has slope 1/p0
  for (int i = 1; i <= sys.M; ++i) s += (1.0 - sys.p0) / sys.M;
  return s;
}

std::pair<double, double> G_map(const SystemParams& sys, double w, double x) {
  check_unit(x, "x");
  const int i = coding_branch(sys, w);
  return {L_map(sys, w), apply_map_unchecked(sys, i, x)};
}

Point3 gamma(const SystemParams& sys, const Point3& p, Direction dir) {
  check_unit(p.w, "w");
  check_unit(p.x, "x");
  check_unit(p.y, "y");
  const double p0 = sys.p0;
  const int M = sys.M, N = sys.N;
  if (dir == Direction::forward) {
    const int i = coding_branch(sys, p.w);
    if (i == 0) {
      const int j = continuity_interval(N, p.x);
      return {below_one(p.w / p0), expand_mod1(N, p.x), below_one(p0 * (p.y + j) / N)};
    }
    return {L_map(sys, p.w), contract(M, i, p.x), below_one((1.0 - p0) * p.y + p0)};
  }
  if (p.y < p0) {
    int j = static_cast<int>(p.y * N / p0);
    if (j >= N) j = N - 1;
    const double y = N * p.y / p0 - j;
    return {p0 * p.w, below_one((p.x + j) / N), y < 0.0 ? 0.0 : below_one(y)};
  }
  int i = static_cast<int>(p.x * M);
  if (i >= M) i = M - 1;
  const double w = (1.0 - p0) * (p.w + i) / M + p0;
  const double y = (p.y - p0) / (1.0 - p0);
  return {below_one(w), expand_mod1(M, p.x), y < 0.0 ? 0.0 : below_one(y)};
}

std::vector<double> gamma_branch_jacobians(const SystemParams& sys) {
  // Each branch is a product map; the determinant is the product of the
  // coordinate slopes (w, x, y).
  std::vector<double> det(sys.M + 1);
  det[0] = std::abs((1.0 / sys.p0) * sys.N * (sys.p0 / sys.N));
  for (int i = 1; i <= sys.M; ++i)
    det[i] = std::abs((sys.M / (1.0 - sys.p0)) * (1.0 / sys.M) * (1.0 - sys.p0));
  return det;
}

double encode_h(const SystemParams& sys, std::span<const Symbol> word, Symbol tail) {
  if (tail < 0 || tail > sys.M) throw DomainError("tail symbol out of range 0..M");
  double weight = 1.0, sum = 0.0;
  std::size_t t = 0;
  // Each term is weight * r_{omega_t}; stop once weight can no longer move the sum.
  while (weight >= 1e-17) {
    Symbol s = t < word.size() ? word[t] : tail;
    if (s < 0 || s > sys.M) throw DomainError("symbol out of range 0..M");
    sum += weight * sys.breakpoints[s];
    weight *= sys.probs[s];
    ++t;
    if (t >= word.size() && tail == 0) break;  // r_0 = 0: the rest of the series vanishes
  }
  return below_one(sum);
}

}  // namespace ifslab
