// Test-only reference implementations, independent of the library paths they
// check.
#pragma once

#include <Eigen/Core>

#include "jump/volume.hpp"

namespace oracles {

// Matrix exponential by scaling-and-squaring with a plain Taylor series.
Eigen::Matrix4d expm(const Eigen::Matrix4d& a);

// Rotation of p about unit axis by angle (Rodrigues formula written out).
Eigen::Vector3d rotate_axis_angle(const Eigen::Vector3d& axis, double angle,
                                  const Eigen::Vector3d& p);

// Exact least-absolute-deviations solve via a dense simplex on the standard
// LP reformulation min sum c_i (p_i + q_i), A x + p - q = y. Returns a
// minimizer and the optimal value.
struct LpResult {
  Eigen::VectorXd x;
  double value = 0.0;
};
LpResult lad_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& c);

// Per-label Dice overlap of two parcellations on the same grid.
double dice(const jump::LabelVolume& a, const jump::LabelVolume& b, std::int32_t label);

}  // namespace oracles
