#pragma once

#include <array>
#include <span>
#include <utility>

#include "ifslab/ifs_core.hpp"

namespace ifslab {

struct Point3 {
  double w = 0.0, x = 0.0, y = 0.0;
};

enum class Direction { forward, inverse };

/// Branch index of w: 0 on [0, p0), i on [r_i, r_{i+1}).
int coding_branch(const SystemParams& sys, double w);

/// Piecewise affine expanding map conjugate to the shift.
double L_map(const SystemParams& sys, double w);
/// Sum over branches of 1/|slope| of L_map at its preimages of any point.
double L_map_preimage_weight(const SystemParams& sys);

std::pair<double, double> G_map(const SystemParams& sys, double w, double x);

/// Invertible three-dimensional extension of G_map.
Point3 gamma(const SystemParams& sys, const Point3& p, Direction dir);

/// |det| of the derivative of each branch (index 0 = expanding branch, i = contraction i),
/// assembled from the branch slopes.
std::vector<double> gamma_branch_jacobians(const SystemParams& sys);

/// Code-to-point map for the word followed by tailSymbol repeated forever.
double encode_h(const SystemParams& sys, std::span<const Symbol> word, Symbol tail);

}  // namespace ifslab
