#include "ifslab/point_pair.hpp"

#include <limits>

#include "ifslab/errors.hpp"

namespace ifslab {

PointPair::PointPair(double x, double y) : x_(x), gap_(y - x) {
  if (!(x >= 0.0 && x < 1.0) || !(y >= 0.0 && y < 1.0))
    throw DomainError("pair coordinates must lie in [0,1)");
}

double PointPair::y() const {
  if (scale_ != 0) return x_;
  double v = x_ + gap_;
  if (v < 0.0) return 0.0;
  return v < 1.0 ? v : 0x1.fffffffffffffp-1;
}

double PointPair::log2_distance() const {
  if (gap_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(std::abs(gap_)) - 512.0 * scale_;
}

}  // namespace ifslab
