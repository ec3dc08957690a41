#pragma once

#include <Eigen/Core>

#include "jump/error.hpp"

namespace jump {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Twist coordinates in se(3): axis-angle rotation part first, then the
// translation part of the twist (millimeters). Note u is the translation
// parameter of the exponential, not the translation of the resulting matrix
// (they coincide only for zero rotation).
struct TangentVector {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d u = Eigen::Vector3d::Zero();

  TangentVector() = default;
  TangentVector(const Eigen::Vector3d& w, const Eigen::Vector3d& t) : omega(w), u(t) {}

  static TangentVector from_vector(const Vector6d& v) {
    return TangentVector(v.head<3>(), v.tail<3>());
  }
  Vector6d to_vector() const {
    Vector6d v;
    v << omega, u;
    return v;
  }

  // Parameter j in 0..5: rotation x,y,z then translation x,y,z.
  double operator[](int j) const { return j < 3 ? omega[j] : u[j - 3]; }
  double& operator[](int j) { return j < 3 ? omega[j] : u[j - 3]; }

  bool is_finite() const { return omega.allFinite() && u.allFinite(); }

  TangentVector operator-() const { return {-omega, -u}; }
  TangentVector operator+(const TangentVector& o) const { return {omega + o.omega, u + o.u}; }
  TangentVector operator-(const TangentVector& o) const { return {omega - o.omega, u - o.u}; }
  TangentVector operator*(double s) const { return {omega * s, u * s}; }
};

// Rigid transform as a 4x4 homogeneous matrix (proper rotation + translation
// in world millimeters). Invariants are enforced at construction.
class RigidTransform {
public:
  RigidTransform() : m_(Eigen::Matrix4d::Identity()) {}
  explicit RigidTransform(const Eigen::Matrix4d& m);
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return RigidTransform(); }

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.block<3, 3>(0, 0); }
  Eigen::Vector3d translation() const { return m_.block<3, 1>(0, 3); }

private:
  Eigen::Matrix4d m_;
};

// exp: twist -> group element (Rodrigues rotation + V-matrix translation).
RigidTransform exp_map(const TangentVector& v);

// log: group element -> canonical twist with |omega| <= pi. Throws
// IllConditionedRotation when the rotation angle is within 1e-6 of pi,
// where the logarithm branch is not unique.
TangentVector log_map(const RigidTransform& T);

// Group inverse in closed form (R^T block, -R^T t translation).
RigidTransform invert(const RigidTransform& T);

// Exact group composition (matrix product A * B).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

// R * p + t.
Eigen::Vector3d apply_point(const RigidTransform& T, const Eigen::Vector3d& p);

namespace detail {

// Scalar coefficients of the closed-form exp/log:
//   a = sin(t)/t, b = (1-cos(t))/t^2, c = (t-sin(t))/t^3,
//   d = quadratic coefficient of V^{-1} = (1 - a/(2b)) / t^2.
struct RodriguesCoeffs {
  double a, b, c, d;
};

inline constexpr double kSmallAngle = 1e-5;

// Trig branch; valid away from t = 0.
RodriguesCoeffs rodrigues_closed(double theta);
// Taylor branch; used below kSmallAngle to avoid cancellation.
RodriguesCoeffs rodrigues_taylor(double theta);
// Branch dispatch used by exp_map/log_map.
RodriguesCoeffs rodrigues(double theta);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

// exp with an explicit coefficient choice (exposed so tests can compare the
// two branches at the switch threshold).
RigidTransform exp_with_coeffs(const TangentVector& v, const RodriguesCoeffs& k);

}  // namespace detail

}  // namespace jump
