#pragma once

#include <cmath>

#include "ifslab/ifs_core.hpp"

namespace ifslab {

// Two-point motion (x, y) under a common symbol sequence. The gap y - x is
// carried separately from x, scaled by 2^(512 * scale) once it drops below
// 2^-600, so contraction never rounds a distinct pair onto the diagonal and
// pairs stay distinguishable long after |y - x| underflows.
class PointPair {
 public:
  PointPair() = default;
  PointPair(double x, double y);

  double x() const { return x_; }
  double y() const;
  /// |y - x|; returns 0 for merged pairs and may underflow to 0 for deeply scaled gaps.
  double distance() const { return scale_ == 0 ? std::abs(gap_) : std::ldexp(std::abs(gap_), -512 * scale_); }
  /// log2 |y - x| without underflow; -inf for merged pairs.
  double log2_distance() const;
  bool merged() const { return gap_ == 0.0; }
  bool scaled() const { return scale_ != 0; }

  /// True distance is certainly below eps (eps >= 2^-1000).
  bool closer_than(double eps) const { return scale_ != 0 || std::abs(gap_) < eps; }

  /// Applies f_s to both points. Returns true when s = 0 and the two points
  /// lie in different continuity intervals of f_0.
  bool step(const SystemParams& sys, Symbol s) {
    if (s == 0) return expand(sys.N);
    x_ = contract(sys.M, s, x_);
    gap_ /= sys.M;
    if (std::abs(gap_) < kLow && gap_ != 0.0) {
      gap_ = std::ldexp(gap_, 512);
      ++scale_;
    }
    return false;
  }

 private:
  static constexpr double kLow = 0x1.0p-600;
  static constexpr double kHigh = 0x1.0p-88;  // kLow * 2^512

  // y' = N y mod 1 is written as x' + gap' with x' = frac(N x); the jump of
  // floor between the two points is floor(frac(N x) + N gap).
  bool expand(int N) {
    const double nx = x_ * N;
    double nxr = nx - std::floor(nx);
    if (nxr >= 1.0) nxr = 0.0;
    x_ = nxr;
    if (scale_ != 0) {
      if (nxr == 0.0 && gap_ < 0.0) {
        // x sits exactly on a discontinuity and y is just left of it.
        scale_ = 0;
        gap_ = 0x1.fffffffffffffp-1;
        return true;
      }
      gap_ *= N;
      if (std::abs(gap_) >= kHigh) {
        gap_ = std::ldexp(gap_, -512);
        --scale_;
      }
      return false;
    }
    const double t = nxr + gap_ * N;
    const double jump = std::floor(t);
    gap_ = gap_ * N - jump;
    if (x_ + gap_ >= 1.0) gap_ = 0x1.fffffffffffffp-1 - x_;
    return jump != 0.0;
  }

  double x_ = 0.0;
  double gap_ = 0.0;
  int scale_ = 0;
};

}  // namespace ifslab
