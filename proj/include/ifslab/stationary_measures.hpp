#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace ifslab {

/// M = kappa^l and N = kappa^k with gcd(k, l) = 1.
struct MultDepParams {
  int kappa = 0;
  int k = 0;
  int l = 0;
};

std::optional<MultDepParams> mult_dependence(int M, int N);

/// Real root in (0,1) of p0 z^(k+l) - z^l + 1 - p0 for l/(k+l) < p0 < 1.
double nu1(double p0, int k, int l);

struct RootClassification {
  std::vector<std::complex<double>> roots;  // all k + l roots, the root 1 first
  int inside = 0;
  int on_circle = 0;
  int outside = 0;
  double nu1 = 0.0;
};

RootClassification char_roots(double p0, int k, int l);

/// Value of p0 z^(k+l) - z^l + 1 - p0.
std::complex<double> char_poly(double p0, int k, int l, std::complex<double> z);

enum class MeasureRegime { finite, sigma_finite };
const char* to_string(MeasureRegime r);

struct CoefficientSequence {
  std::vector<double> b;  // b_0 .. b_H
  MeasureRegime regime = MeasureRegime::finite;
  int H = 0;
  double p0 = 0.0;
  int k = 0;
  int l = 0;
  double tail_ratio = 0.0;  // b_{h+1} / b_h assumed beyond H

  /// Largest |b_{j+k+l} - b_{j+l}/p0 + (1-p0)/p0 b_j| over j <= H - k - l.
  double recurrence_residual() const;
  /// Largest residual of the boundary equations: the b_k identity and b_{k+h} = b_h / p0 for 1 <= h < l.
  double boundary_residual() const;
  std::vector<double> partial_sums() const;
};

int default_truncation(double nu);

/// Stationary weights of the walk on {0,1,...} that steps down by k (reflected at 0)
/// with probability p0 and up by l otherwise.
CoefficientSequence solve_b(double p0, int k, int l, std::optional<int> H = std::nullopt);

/// Mass of the strip |x - y| < eps under the diagonal-square measure with weights b.
double delta_eps_mass(const CoefficientSequence& b, int kappa, double eps);

struct DensityBound {
  double sup_estimate = 0.0;  // max_h b_h kappa^(h(d-1))
  double growth = 0.0;        // nu1 kappa^(d-1)
  bool bounded = false;
  bool boundary = false;      // |growth - 1| <= 1e-9
};

DensityBound density_sup(const CoefficientSequence& b, int kappa, int d);

/// p0 at which nu1(p0) kappa^(d-1) = 1, by bisection.
double density_threshold_p0(int k, int l, int kappa, int d, double tol = 1e-12);

/// Mass that the diagonal-square measure assigns to cell (i, j) of the uniform
/// kappa^g x kappa^g mesh.
double diagonal_cell_mass(const CoefficientSequence& b, int kappa, int g, long long i, long long j);

/// Least-squares slope of log(mass) against log(eps).
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& mass);

}  // namespace ifslab
