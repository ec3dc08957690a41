#include "jump/se3.hpp"


#include <Eigen/Dense>
#include <cmath>

namespace jump {

namespace detail {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
      -v.y(), v.x(), 0;
  return s;
}

RodriguesCoeffs rodrigues_closed(double theta) {
  const double t2 = theta * theta;
  const double half_sin = std::sin(0.5 * theta);
  RodriguesCoeffs k;
  k.a = std::sin(theta) / theta;
  // 1 - cos via the half angle; the naive difference loses the digits that
  // k.d's second cancellation then amplifies by 1/theta^4
  k.b = 2.0 * half_sin * half_sin / t2;
  k.c = (theta - std::sin(theta)) / (t2 * theta);
  k.d = (1.0 - k.a / (2.0 * k.b)) / t2;
  return k;
}

RodriguesCoeffs rodrigues_taylor(double theta) {
  const double t2 = theta * theta;
  RodriguesCoeffs k;
  k.a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0);
  k.b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
  k.c = (1.0 / 6.0) * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
  k.d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  return k;
}

RodriguesCoeffs rodrigues(double theta) {
  return theta < kSmallAngle ? rodrigues_taylor(theta) : rodrigues_closed(theta);
}

RigidTransform exp_with_coeffs(const TangentVector& v, const RodriguesCoeffs& k) {
  const Eigen::Matrix3d w = skew(v.omega);
  const Eigen::Matrix3d w2 = w * w;
  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + k.a * w + k.b * w2;
  const Eigen::Matrix3d vmat = Eigen::Matrix3d::Identity() + k.b * w + k.c * w2;
  return RigidTransform(r, vmat * v.u);
}

}  // namespace detail

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 3) = translation;
  *this = RigidTransform(m);
}

RigidTransform::RigidTransform(const Eigen::Matrix4d& m) : m_(m) {
  if (!m.allFinite()) throw InvalidArgument("rigid transform has non-finite entries");
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0)
    throw InvalidArgument("rigid transform bottom row must be exactly (0,0,0,1)");
  const Eigen::Matrix3d r = m.block<3, 3>(0, 0);
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9) throw InvalidArgument("rotation block is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > 1e-9)
    throw InvalidArgument("rotation block is not a proper rotation (det != 1)");
}

RigidTransform exp_map(const TangentVector& v) {
  if (!v.is_finite()) throw InvalidArgument("exp_map: non-finite tangent vector");
  const double theta = v.omega.norm();
  return detail::exp_with_coeffs(v, detail::rodrigues(theta));
}

TangentVector log_map(const RigidTransform& T) {
  const Eigen::Matrix3d r = T.rotation();
  // sin(theta) * axis from the skew part, cos(theta) from the trace; atan2 is
  // well conditioned everywhere we accept (theta < pi - 1e-6).
  Eigen::Vector3d svec(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  svec *= 0.5;
  const double s = svec.norm();
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::atan2(s, c);
  if (theta >= M_PI - 1e-6)
    throw IllConditionedRotation("log_map: rotation angle within 1e-6 of pi, logarithm is not unique");

  TangentVector v;
  if (theta < detail::kSmallAngle) {
    const double t2 = theta * theta;
    v.omega = svec * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
  } else {
    v.omega = svec * (theta / s);
  }
  const detail::RodriguesCoeffs k = detail::rodrigues(theta);
  const Eigen::Matrix3d w = detail::skew(v.omega);
  const Eigen::Matrix3d vinv = Eigen::Matrix3d::Identity() - 0.5 * w + k.d * (w * w);
  v.u = vinv * T.translation();
  return v;
}

RigidTransform invert(const RigidTransform& T) {
  const Eigen::Matrix3d rt = T.rotation().transpose();
  return RigidTransform(rt, -(rt * T.translation()));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(Eigen::Matrix4d(a.matrix() * b.matrix()));
}

Eigen::Vector3d apply_point(const RigidTransform& T, const Eigen::Vector3d& p) {
  if (!p.allFinite()) throw InvalidArgument("apply_point: non-finite point");
  return T.rotation() * p + T.translation();
}

}  // namespace jump
