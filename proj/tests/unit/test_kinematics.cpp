#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "octoload/kinematics.hpp"
#include "support.hpp"

using namespace octoload;
using octoload::testing::Rng;

TEST_SUITE("kinematics") {
  TEST_CASE("skew matrix reproduces the cross product and is antisymmetric") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
      const Vec3 a = rng.vec3(-3.0, 3.0);
      const Vec3 b = rng.vec3(-3.0, 3.0);
      const Mat3 S = skew(a);
      CHECK((S * b - a.cross(b)).norm() < 1e-15);
      CHECK((S + S.transpose()).norm() == 0.0);
    }
  }

  TEST_CASE("rotation matches an independent axis-angle composition") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
      const Vec3 eta = rng.vec3(-3.0, 3.0);
      const Mat3 R = rotation_zyx(eta);
      const Mat3 R_ref =
          (Eigen::AngleAxisd(eta[2], Vec3::UnitZ()) *
           Eigen::AngleAxisd(eta[1], Vec3::UnitY()) *
           Eigen::AngleAxisd(eta[0], Vec3::UnitX()))
              .toRotationMatrix();
      CHECK((R - R_ref).norm() < 1e-14);
      CHECK((R * R.transpose() - Mat3::Identity()).norm() < 1e-14);
      CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("euler rate matrix satisfies Rdot = R skew(W etadot)") {
    Rng rng(3);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
      Vec3 eta = rng.vec3(-1.2, 1.2);
      const Vec3 etadot = rng.vec3(-2.0, 2.0);
      const Mat3 R_plus = rotation_zyx(eta + h * etadot);
      const Mat3 R_minus = rotation_zyx(eta - h * etadot);
      const Mat3 Rdot_fd = (R_plus - R_minus) / (2.0 * h);
      const Mat3 Rdot_an =
          rotation_zyx(eta) * skew(euler_rate_matrix(eta) * etadot);
      CHECK((Rdot_fd - Rdot_an).norm() < 1e-7);
    }
  }

  TEST_CASE("euler rate matrix inverse round trips away from the singularity") {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      Vec3 eta = rng.vec3(-1.3, 1.3);
      const Mat3 W = euler_rate_matrix(eta);
      const Mat3 Winv = euler_rate_matrix_inverse(eta);
      CHECK((W * Winv - Mat3::Identity()).norm() < 1e-12);
      CHECK((Winv * W - Mat3::Identity()).norm() < 1e-12);
    }
  }

  TEST_CASE("euler rate inversion rejects the cos(theta) = 0 singularity") {
    const Vec3 at_singularity(0.3, M_PI / 2.0, -0.7);
    CHECK_THROWS_AS((void)euler_rate_matrix_inverse(at_singularity),
                    EulerSingularityError);
    const Vec3 near_singularity(0.0, M_PI / 2.0 - 1e-8, 0.0);
    CHECK_THROWS_AS((void)euler_rate_matrix_inverse(near_singularity),
                    EulerSingularityError);
    const Vec3 safe(0.0, M_PI / 2.0 - 0.01, 0.0);
    CHECK_NOTHROW((void)euler_rate_matrix_inverse(safe));
  }

  TEST_CASE("linear point jacobian matches finite differences of the point") {
    Rng rng(5);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
      const Vec3 eta = rng.vec3(-1.2, 1.2);
      const Vec3 r = rng.vec3(-1.5, 1.5);
      const Vec3 xi = rng.vec3(-5.0, 5.0);
      const Vec6 qdot = rng.vec6(-2.0, 2.0);

      // World position of the body-fixed point as a function of q.
      const auto point = [&](const Vec6& q) -> Vec3 {
        return Vec3(q.head<3>()) + rotation_zyx(q.tail<3>()) * r;
      };
      Vec6 q;
      q << xi, eta;
      const Vec3 vel_fd =
          (point(q + h * qdot) - point(q - h * qdot)) / (2.0 * h);
      const Vec3 vel_an = linear_jacobian(eta, r) * qdot;
      CHECK((vel_fd - vel_an).norm() < 1e-7);
    }
  }

  TEST_CASE("angular jacobian maps qdot to the world angular velocity") {
    Rng rng(6);
    for (int i = 0; i < 50; ++i) {
      const Vec3 eta = rng.vec3(-1.2, 1.2);
      const Vec6 qdot = rng.vec6(-2.0, 2.0);
      // World angular velocity = R * omega_body = R W etadot.
      const Vec3 w_ref = rotation_zyx(eta) *
                         (euler_rate_matrix(eta) * Vec3(qdot.tail<3>()));
      const Vec3 w_jac = angular_jacobian(eta) * qdot;
      CHECK((w_ref - w_jac).norm() < 1e-13);
      // Translational block must be zero: translation induces no rotation.
      CHECK(angular_jacobian(eta).leftCols<3>().norm() == 0.0);
    }
  }
}
