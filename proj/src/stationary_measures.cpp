#include "ifslab/stationary_measures.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ifslab/errors.hpp"

namespace ifslab {

namespace {

// Exponent e with base^e == v, or -1.
int exact_log(long long v, long long base) {
  int e = 0;
  while (v > 1) {
    if (v % base != 0) return -1;
    v /= base;
    ++e;
  }
  return v == 1 ? e : -1;
}

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void require_strip(double p0, int k, int l) {
  if (k < 1 || l < 1) throw PreconditionError("k and l must be positive");
  if (std::gcd(k, l) != 1) throw PreconditionError("k and l must be coprime");
  if (!(p0 > static_cast<double>(l) / (k + l) && p0 < 1.0)) {
    std::ostringstream os;
    os << "p0 = " << p0 << " outside (l/(k+l), 1) = (" << static_cast<double>(l) / (k + l)
       << ", 1); the Lyapunov exponent is not positive";
    throw PreconditionError(os.str());
  }
}

// (p0 z^(k+l) - z^l + 1 - p0) / (z - 1) = p0 sum_{i<k+l} z^i - sum_{i<l} z^i.
template <class T>
T deflated(double p0, int k, int l, T z) {
  T acc = 0, pw = 1;
  for (int i = 0; i < k + l; ++i) {
    acc += (i < l ? p0 - 1.0 : p0) * pw;
    pw *= z;
  }
  return acc;
}

template <class T>
T deflated_derivative(double p0, int k, int l, T z) {
  T acc = 0, pw = 1;
  for (int i = 1; i < k + l; ++i) {
    acc += static_cast<double>(i) * (i < l ? p0 - 1.0 : p0) * pw;
    pw *= z;
  }
  return acc;
}

}  // namespace

std::optional<MultDepParams> mult_dependence(int M, int N) {
  if (M < 2 || N < 2) throw DomainError("M and N must be >= 2");
  const int top = std::min(M, N);
  for (long long base = 2; base <= top; ++base) {
    const int a = exact_log(M, base);
    if (a < 0) continue;
    const int b = exact_log(N, base);
    if (b < 0) continue;
    const int g = std::gcd(a, b);
    return MultDepParams{static_cast<int>(ipow(base, g)), b / g, a / g};
  }
  return std::nullopt;
}

std::complex<double> char_poly(double p0, int k, int l, std::complex<double> z) {
  return p0 * std::pow(z, k + l) - std::pow(z, l) + (1.0 - p0);
}

double nu1(double p0, int k, int l) {
  require_strip(p0, k, l);
  double lo = 0.0, hi = 1.0;  // deflated(lo) < 0 < deflated(hi)
  for (int it = 0; it < 200 && hi - lo > 0x1.0p-60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (deflated(p0, k, l, mid) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = deflated_derivative(p0, k, l, r);
    if (d == 0.0) break;
    const double next = r - deflated(p0, k, l, r) / d;
    if (!(next > 0.0 && next < 1.0)) break;
    r = next;
  }
  const double res = std::abs(p0 * std::pow(r, k + l) - std::pow(r, l) + 1.0 - p0);
  if (res >= 1e-13) throw NumericalError("nu1: residual target not met");
  return r;
}

RootClassification char_roots(double p0, int k, int l) {
  require_strip(p0, k, l);
  const int deg = k + l - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) {
    const double ai = (i < l ? p0 - 1.0 : p0) / p0;
    comp(i, deg - 1) = -ai;
    if (i > 0) comp(i, i - 1) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalError("char_roots: eigenvalue solve failed");

  RootClassification rc;
  rc.roots.push_back({1.0, 0.0});
  rc.on_circle = 1;
  for (int i = 0; i < deg; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    for (int it = 0; it < 4; ++it) {
      const auto d = deflated_derivative(p0, k, l, z);
      if (std::abs(d) == 0.0) break;
      const auto step = deflated(p0, k, l, z) / d;
      z -= step;
      if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(z))) break;
    }
    if (std::abs(z.imag()) < 1e-14 * std::max(1.0, std::abs(z))) z = {z.real(), 0.0};
    const double m = std::abs(z);
    if (std::abs(m - 1.0) <= 1e-8)
      throw NumericalError("char_roots: a root other than 1 lies on the unit circle");
    (m < 1.0 ? rc.inside : rc.outside) += 1;
    rc.roots.push_back(z);
  }
  rc.nu1 = nu1(p0, k, l);
  return rc;
}

const char* to_string(MeasureRegime r) {
  return r == MeasureRegime::finite ? "finite" : "sigma-finite";
}

int default_truncation(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) return 100;
  return std::max(100, static_cast<int>(std::ceil(60.0 / -std::log(nu))));
}

double CoefficientSequence::recurrence_residual() const {
  double worst = 0.0;
  for (int j = 0; j + k + l <= H; ++j) {
    const double r = b[j + k + l] - b[j + l] / p0 + (1.0 - p0) / p0 * b[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double CoefficientSequence::boundary_residual() const {
  double rhs = (1.0 - p0) / p0 * b[0];
  for (int i = 1; i < k; ++i) rhs -= b[i];
  double worst = std::abs(b[k] - rhs);
  for (int h = 1; h < l; ++h) worst = std::max(worst, std::abs(b[k + h] - b[h] / p0));
  return worst;
}

std::vector<double> CoefficientSequence::partial_sums() const {
  std::vector<double> s(b.size());
  std::partial_sum(b.begin(), b.end(), s.begin());
  return s;
}

namespace {

// Stationary law of the walk truncated to 0..S (up steps past S stay at S), by
// GTH elimination on the band -k..l. No subtractions, so tiny tail entries keep
// their relative accuracy.
std::vector<double> gth_truncated_law(double p0, int k, int l, int S) {
  const int width = k + l + 1;
  std::vector<double> band(static_cast<std::size_t>(S + 1) * width, 0.0);
  auto at = [&](int i, int j) -> double& { return band[static_cast<std::size_t>(i) * width + (j - i + k)]; };
  for (int s = 0; s <= S; ++s) {
    at(s, std::max(0, s - k)) += p0;
    at(s, std::min(S, s + l)) += 1.0 - p0;
  }
  std::vector<double> out_rate(S + 1, 0.0);
  for (int n = S; n >= 1; --n) {
    const int jlo = std::max(0, n - k), ilo = std::max(0, n - l);
    double rate = 0.0;
    for (int j = jlo; j < n; ++j) rate += at(n, j);
    out_rate[n] = rate;
    for (int i = ilo; i < n; ++i) {
      const double pin = at(i, n);
      if (pin == 0.0) continue;
      for (int j = jlo; j < n; ++j) at(i, j) += pin * at(n, j) / rate;
    }
  }
  std::vector<double> pi(S + 1, 0.0);
  pi[0] = 1.0;
  for (int n = 1; n <= S; ++n) {
    double acc = 0.0;
    for (int i = std::max(0, n - l); i < n; ++i) acc += pi[i] * at(i, n);
    pi[n] = acc / out_rate[n];
  }
  return pi;
}

}  // namespace

CoefficientSequence solve_b(double p0, int k, int l, std::optional<int> Hopt) {
  if (k < 1 || l < 1) throw PreconditionError("k and l must be positive");
  if (!(p0 > 0.0 && p0 < 1.0)) throw PreconditionError("p0 must lie in (0,1)");
  const double drift = k * p0 - l * (1.0 - p0);
  if (drift < -1e-12)
    throw PreconditionError("negative Lyapunov exponent: only the diagonal measure is stationary");
  CoefficientSequence cs;
  cs.p0 = p0;
  cs.k = k;
  cs.l = l;
  if (drift <= 1e-12) {
    cs.regime = MeasureRegime::sigma_finite;
    cs.tail_ratio = 1.0;
  } else {
    cs.regime = MeasureRegime::finite;
    cs.tail_ratio = nu1(p0, k, l);
  }
  const int H = Hopt ? *Hopt : default_truncation(cs.tail_ratio);
  if (H < k + l) throw PreconditionError("truncation H must be >= k + l");
  cs.H = H;
  const double rho = cs.tail_ratio;

  if (cs.regime == MeasureRegime::finite) {
    // Truncating S - H further states perturbs b_h, h <= H, by about rho^(S-H) relatively.
    const long long S = static_cast<long long>(H) + std::max(H, default_truncation(rho)) + k + l;
    if (S > 50'000'000) throw ResourceError("solve_b: truncation too large");
    const auto pi = gth_truncated_law(p0, k, l, static_cast<int>(S));
    cs.b.assign(pi.begin(), pi.begin() + H + 1);
    double total = cs.b[H] * rho / (1.0 - rho);
    for (int h = H; h >= 0; --h) total += cs.b[h];
    for (double& v : cs.b) v /= total;
    return cs;
  }

  // Zero drift: unknowns b_0..b_H with b_0 = 1; balance equations for states
  // 0..H-1, where a reference to b_m with m > H is replaced by b_H.
  std::vector<Eigen::Triplet<double>> trip;
  auto add = [&](int row, int m, double c) { trip.emplace_back(row, std::min(m, H), c); };
  for (int s = 0; s < H; ++s) {
    add(s, s, 1.0);
    if (s == 0) {
      for (int i = 0; i <= k; ++i) add(s, i, -p0);
    } else {
      add(s, s + k, -p0);
    }
    if (s >= l) add(s, s - l, -(1.0 - p0));
  }
  trip.emplace_back(H, 0, 1.0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(H + 1);
  rhs[H] = 1.0;

  Eigen::SparseMatrix<double> A(H + 1, H + 1);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericalError("solve_b: factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw NumericalError("solve_b: solve failed");
  cs.b.resize(H + 1);
  for (int h = 0; h <= H; ++h) cs.b[h] = std::max(0.0, x[h]);
  return cs;
}

namespace {

void require_finite(const CoefficientSequence& cs) {
  if (cs.regime != MeasureRegime::finite)
    throw PreconditionError("operation needs a finite (normalized) stationary measure");
}

}  // namespace

double delta_eps_mass(const CoefficientSequence& cs, int kappa, double eps) {
  require_finite(cs);
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0,1]");
  if (kappa < 2) throw DomainError("kappa must be >= 2");
  auto frac = [](double t) {  // share of a square of side s covered by |x-y| < eps, t = eps/s
    if (t >= 1.0) return 1.0;
    const double u = 1.0 - t;
    return 1.0 - u * u;
  };
  double sum = 0.0, t = eps;
  for (int h = 0; h <= cs.H; ++h, t *= kappa) sum += cs.b[h] * frac(t);
  double bh = cs.b[cs.H];
  const double rho = cs.tail_ratio;
  for (int h = cs.H + 1;; ++h, t *= kappa) {
    bh *= rho;
    if (t >= 1.0 || bh == 0.0) {
      sum += bh / (1.0 - rho);
      break;
    }
    sum += bh * frac(t);
  }
  return sum;
}

DensityBound density_sup(const CoefficientSequence& cs, int kappa, int d) {
  require_finite(cs);
  if (d < 2) throw DomainError("d must be >= 2");
  DensityBound db;
  const double lk = std::log(static_cast<double>(kappa)) * (d - 1);
  double best = -INFINITY;
  for (int h = 0; h <= cs.H; ++h)
    if (cs.b[h] > 0.0) best = std::max(best, std::log(cs.b[h]) + h * lk);
  db.sup_estimate = std::exp(best);
  db.growth = nu1(cs.p0, cs.k, cs.l) * std::pow(static_cast<double>(kappa), d - 1);
  db.boundary = std::abs(db.growth - 1.0) <= 1e-9;
  db.bounded = !db.boundary && db.growth < 1.0;
  return db;
}

double density_threshold_p0(int k, int l, int kappa, int d, double tol) {
  const double scale = std::pow(static_cast<double>(kappa), d - 1);
  double lo = static_cast<double>(l) / (k + l), hi = 1.0;  // growth > 1 at lo, < 1 at hi
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (nu1(mid, k, l) * scale > 1.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double diagonal_cell_mass(const CoefficientSequence& cs, int kappa, int g, long long i, long long j) {
  require_finite(cs);
  const double G = std::pow(static_cast<double>(kappa), g);
  auto b_at = [&](int h) { return h <= cs.H ? cs.b[h] : cs.b[cs.H] * std::pow(cs.tail_ratio, h - cs.H); };
  double mass = 0.0;
  long long block = static_cast<long long>(G);  // cells per level-h square side, for h = 0
  for (int h = 0; h <= g; ++h, block /= kappa) {
    if (i / block == j / block) mass += b_at(h) * std::pow(static_cast<double>(kappa), h) / (G * G);
  }
  if (i == j) {
    double tail = 0.0;
    if (g < cs.H) {
      for (int h = g + 1; h <= cs.H; ++h) tail += cs.b[h];
      tail += cs.b[cs.H] * cs.tail_ratio / (1.0 - cs.tail_ratio);
    } else {
      tail = b_at(g + 1) / (1.0 - cs.tail_ratio);
    }
    mass += tail / G;
  }
  return mass;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& mass) {
  if (eps.size() != mass.size() || eps.size() < 2) throw DomainError("loglog_slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && mass[i] > 0.0)) throw DomainError("loglog_slope needs positive data");
    const double x = std::log(eps[i]), y = std::log(mass[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace ifslab
