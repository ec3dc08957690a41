#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "jump/rng.hpp"
#include "jump/se3.hpp"
#include "oracles.hpp"

using namespace jump;

namespace {

TangentVector random_twist(SplitMix64& rng, double max_angle, double max_trans) {
  Eigen::Vector3d axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  while (axis.norm() < 1e-3)
    axis = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  axis.normalize();
  const double angle = rng.uniform(0.0, max_angle);
  TangentVector v;
  v.omega = axis * angle;
  v.u = Eigen::Vector3d(rng.uniform(-max_trans, max_trans), rng.uniform(-max_trans, max_trans),
                        rng.uniform(-max_trans, max_trans));
  return v;
}

Eigen::Matrix4d twist_matrix(const TangentVector& v) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.block<3, 3>(0, 0) = detail::skew(v.omega);
  m.block<3, 1>(0, 3) = v.u;
  return m;
}

}  // namespace

TEST_CASE("exp of zero is the identity") {
  const RigidTransform t = exp_map(TangentVector());
  CHECK((t.matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exp of a pure translation keeps R = I, t = u") {
  const TangentVector v(Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 2, 3));
  const RigidTransform t = exp_map(v);
  CHECK((t.rotation() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.translation() - Eigen::Vector3d(1, 2, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exp of a 90 degree z twist matches the matrix-exponential oracle") {
  const TangentVector v(Eigen::Vector3d(0, 0, M_PI / 2), Eigen::Vector3d::Zero());
  const RigidTransform t = exp_map(v);
  Eigen::Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((t.rotation() - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.translation().norm() < 1e-15);

  const Eigen::Matrix4d oracle = oracles::expm(twist_matrix(v));
  CHECK((t.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exp matches the scaling-and-squaring oracle on random twists") {
  SplitMix64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const TangentVector v = random_twist(rng, 3.0, 40.0);
    const Eigen::Matrix4d oracle = oracles::expm(twist_matrix(v));
    worst = std::max(worst, (exp_map(v).matrix() - oracle).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("exp rejects non-finite input") {
  TangentVector v;
  v.u[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(exp_map(v), InvalidArgument);
}

TEST_CASE("log of the identity is zero") {
  const TangentVector v = log_map(RigidTransform::identity());
  CHECK(v.to_vector().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("log of a pure translation is (0, t)") {
  const RigidTransform t(Eigen::Matrix3d::Identity(), Eigen::Vector3d(5, 0, 0));
  const TangentVector v = log_map(t);
  CHECK(v.omega.norm() == 0.0);
  CHECK((v.u - Eigen::Vector3d(5, 0, 0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("log round trip at unit rotation magnitude") {
  SplitMix64 rng(7);
  for (int i = 0; i < 20; ++i) {
    TangentVector v = random_twist(rng, 1.0, 20.0);
    v.omega.normalize();  // |omega| = 1 exactly
    const TangentVector back = log_map(exp_map(v));
    CHECK((back.to_vector() - v.to_vector()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("log rejects rotations at pi") {
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, -1, 0, 0, 0, -1;  // 180 degrees about x
  CHECK_THROWS_AS(log_map(RigidTransform(r, Eigen::Vector3d::Zero())), IllConditionedRotation);
}

TEST_CASE("invert matches negation in log space and the dense inverse oracle") {
  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const TangentVector v = random_twist(rng, 2.5, 30.0);
    const RigidTransform t = exp_map(v);
    const RigidTransform ti = invert(t);
    CHECK((ti.matrix() - exp_map(-v).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((ti.matrix() - t.matrix().inverse()).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((compose(t, ti).matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK((invert(RigidTransform::identity()).matrix() - Eigen::Matrix4d::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("compose is the exact matrix product and is associative") {
  SplitMix64 rng(13);
  const TangentVector v1 = random_twist(rng, 2.0, 10.0);
  const TangentVector v2 = random_twist(rng, 2.0, 10.0);
  const TangentVector v3 = random_twist(rng, 2.0, 10.0);
  const RigidTransform a = exp_map(v1), b = exp_map(v2), c = exp_map(v3);

  Eigen::Matrix4d manual = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) manual(i, j) += a.matrix()(i, k) * b.matrix()(k, j);
  CHECK((compose(a, b).matrix() - manual).cwiseAbs().maxCoeff() < 1e-14);

  CHECK((compose(a, RigidTransform::identity()).matrix() - a.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((compose(compose(a, b), c).matrix() - compose(a, compose(b, c)).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("apply_point transforms points") {
  CHECK((apply_point(RigidTransform::identity(), {1, 2, 3}) - Eigen::Vector3d(1, 2, 3)).norm() ==
        0.0);
  const RigidTransform shift(Eigen::Matrix3d::Identity(), Eigen::Vector3d(1, 0, 0));
  CHECK((apply_point(shift, {0, 0, 0}) - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);

  const TangentVector v(Eigen::Vector3d(0, 0, M_PI / 2), Eigen::Vector3d::Zero());
  const Eigen::Vector3d got = apply_point(exp_map(v), {1, 0, 0});
  CHECK((got - Eigen::Vector3d(0, 1, 0)).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::Vector3d oracle = oracles::rotate_axis_angle({0, 0, 1}, M_PI / 2, {1, 0, 0});
  CHECK((got - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("round trip and inverse-negation over the randomized corpus") {
  SplitMix64 rng(1);
  double worst_rt = 0.0, worst_inv = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const TangentVector v = random_twist(rng, M_PI - 0.01, 50.0);
    const RigidTransform t = exp_map(v);
    worst_rt = std::max(worst_rt, (log_map(t).to_vector() - v.to_vector()).cwiseAbs().maxCoeff());
    worst_inv =
        std::max(worst_inv, (invert(t).matrix() - exp_map(-v).matrix()).cwiseAbs().maxCoeff());
  }
  CHECK(worst_rt < 1e-9);
  CHECK(worst_inv < 1e-9);
}

TEST_CASE("first order BCH error shrinks quadratically") {
  SplitMix64 rng(3);
  for (const double eps : {0.1, 0.05, 0.025}) {
    double worst_ratio = 0.0;
    for (int i = 0; i < 20; ++i) {
      TangentVector v1 = random_twist(rng, 1.0, 1.0);
      TangentVector v2 = random_twist(rng, 1.0, 1.0);
      const double s1 = eps / std::max(v1.to_vector().norm(), 1e-12);
      const double s2 = eps / std::max(v2.to_vector().norm(), 1e-12);
      v1 = v1 * s1;
      v2 = v2 * s2;
      const TangentVector sum = log_map(compose(exp_map(v1), exp_map(v2)));
      const double err = (sum.to_vector() - (v1 + v2).to_vector()).norm();
      worst_ratio = std::max(worst_ratio, err / (eps * eps));
    }
    CHECK(worst_ratio < 1.0);
  }
}

TEST_CASE("small-angle branch agrees with the general branch at the threshold") {
  SplitMix64 rng(5);
  const double theta = detail::kSmallAngle;
  for (int i = 0; i < 20; ++i) {
    TangentVector v = random_twist(rng, 1.0, 10.0);
    v.omega = v.omega.normalized() * theta;
    const RigidTransform closed = detail::exp_with_coeffs(v, detail::rodrigues_closed(theta));
    const RigidTransform taylor = detail::exp_with_coeffs(v, detail::rodrigues_taylor(theta));
    CHECK((closed.matrix() - taylor.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
  const auto kc = detail::rodrigues_closed(theta);
  const auto kt = detail::rodrigues_taylor(theta);
  CHECK(std::abs(kc.a - kt.a) < 1e-10);
  CHECK(std::abs(kc.b - kt.b) < 1e-10);
  CHECK(std::abs(kc.c - kt.c) < 1e-10);
}

TEST_CASE("rigid transform invariants are enforced") {
  Eigen::Matrix4d bad = Eigen::Matrix4d::Identity();
  bad(3, 3) = 2.0;
  CHECK_THROWS_AS(RigidTransform{bad}, InvalidArgument);

  Eigen::Matrix4d refl = Eigen::Matrix4d::Identity();
  refl(0, 0) = -1.0;  // improper rotation
  CHECK_THROWS_AS(RigidTransform{refl}, InvalidArgument);

  Eigen::Matrix4d skewed = Eigen::Matrix4d::Identity();
  skewed(0, 1) = 0.5;
  CHECK_THROWS_AS(RigidTransform{skewed}, InvalidArgument);
}
