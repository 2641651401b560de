#include <doctest.h>

#include <vector>

#include "geomadapt/se2.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace geomadapt;
using support::kPi;

TEST_CASE("compose examples") {
  const auto a = compose({0, 0, 0}, {1, 2, 0.3});
  CHECK(a.x == doctest::Approx(1.0));
  CHECK(a.y == doctest::Approx(2.0));
  CHECK(a.theta == doctest::Approx(0.3));

  const auto b = compose({1, 0, kPi / 2}, {1, 0, 0});
  CHECK(b.x == doctest::Approx(1.0));
  CHECK(b.y == doctest::Approx(1.0));
  CHECK(b.theta == doctest::Approx(kPi / 2));

  const GroupElement g{0.5, 0.2, 0.1};
  const GroupElement h{0.3, -0.1, 0.2};
  const auto expected = oracle::from_homogeneous(oracle::homogeneous(g) * oracle::homogeneous(h));
  CHECK(support::pose_distance(compose(g, h), expected) < 1e-14);
  // Frozen value of the homogeneous-matrix product.
  CHECK(expected.x == doctest::Approx(0.8084845912).epsilon(1e-9));
  CHECK(expected.y == doctest::Approx(0.1304496085).epsilon(1e-9));
  CHECK(expected.theta == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("heading stays in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  std::mt19937_64 rng(11);
  for (int i = 0; i < support::kCases; ++i) {
    const auto g = compose(support::random_pose(rng), support::random_pose(rng));
    CHECK(g.theta > -kPi);
    CHECK(g.theta <= kPi);
  }
}

TEST_CASE("exp examples") {
  const auto z = exp({0, 0, 0}, 1.0);
  CHECK(z.x == 0.0);
  CHECK(z.y == 0.0);
  CHECK(z.theta == 0.0);

  const auto r = exp({0, 0, kPi}, 1.0);
  CHECK(r.x == doctest::Approx(0.0));
  CHECK(r.y == doctest::Approx(0.0));
  CHECK(r.theta == doctest::Approx(kPi));

  const auto arc = exp({1, 0, kPi / 2}, 1.0);
  CHECK(arc.x == doctest::Approx(2 / kPi).epsilon(1e-14));
  CHECK(arc.y == doctest::Approx(2 / kPi).epsilon(1e-14));
  CHECK(arc.theta == doctest::Approx(kPi / 2));
  CHECK(support::pose_distance(arc, oracle::flow_rk4({1, 0, kPi / 2}, 1.0, 2000)) < 1e-12);

  CHECK_THROWS(exp({1, 0, 0}, -1.0));
}

TEST_CASE("exp matches fine-step flow and is continuous across the small-angle branch") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < support::kCases; ++i) {
    const auto xi = support::random_twist(rng);
    const double dt = support::uniform(rng, 0.0, 1.5);
    CHECK(support::pose_distance(exp(xi, dt), oracle::flow_rk4(xi, dt, 400)) < 1e-10);
  }
  for (double w : {0.9e-8, 1.1e-8, 1e-12, -0.9e-8, -1.1e-8}) {
    const BodyVelocity xi{0.7, -0.3, w};
    CHECK(support::pose_distance(exp(xi, 1.0), oracle::flow_rk4(xi, 1.0, 10)) < 1e-14);
  }
}

TEST_CASE("group laws over randomized poses") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < support::kCases; ++i) {
    const auto g = support::random_pose(rng);
    const auto h = support::random_pose(rng);
    const auto k = support::random_pose(rng);
    const auto e = compose(g, inverse(g));
    CHECK(support::pose_distance(e, {0, 0, 0}) < 1e-12);
    CHECK(support::pose_distance(compose(inverse(g), g), {0, 0, 0}) < 1e-12);
    CHECK(support::pose_distance(compose(compose(g, h), k), compose(g, compose(h, k))) < 1e-12);
    CHECK(support::pose_distance(compose(g, {0, 0, 0}), g) < 1e-15);
  }
}

TEST_CASE("exp is a one-parameter subgroup") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < support::kCases; ++i) {
    const auto xi = support::random_twist(rng);
    const double a = support::uniform(rng, 0, 2);
    const double b = support::uniform(rng, 0, 2);
    CHECK(support::pose_distance(compose(exp(xi, a), exp(xi, b)), exp(xi, a + b)) < 1e-10);
  }
}

TEST_CASE("integrate_trajectory") {
  const GroupElement g0{0.3, -0.2, 0.4};
  CHECK(support::pose_distance(integrate_trajectory(g0, std::vector<BodyVelocity>{}, 0.1), g0) == 0.0);

  const BodyVelocity xi{0.8, 0.1, -0.6};
  const std::vector<BodyVelocity> constant(250, xi);
  CHECK(support::pose_distance(integrate_trajectory(g0, constant, 1e-2), compose(g0, exp(xi, 2.5))) < 1e-12);

  CHECK_THROWS(integrate_trajectory(g0, constant, 0.0));
}

TEST_CASE("integrate_trajectory matches an adaptive ODE oracle on a sinusoidal series") {
  const double dt = 1e-3;
  std::vector<BodyVelocity> xi;
  for (int n = 0; n < 3000; ++n) {
    const double t = n * dt;
    xi.push_back({1.0 + 0.5 * std::sin(2 * kPi * t), 0.3 * std::cos(2 * kPi * t), 0.8 * std::sin(2 * kPi * t + 0.4)});
  }
  const GroupElement g0{0.1, 0.2, -0.3};
  const auto got = integrate_trajectory(g0, xi, dt);
  const auto want = oracle::integrate_zoh_dopri(g0, xi, dt);
  const double scale = std::hypot(want.x - g0.x, want.y - g0.y);
  CHECK(std::hypot(got.x - want.x, got.y - want.y) / scale < 1e-6);
  CHECK(support::angle_diff(got.theta, want.theta) < 1e-6);
}

TEST_CASE("integrate_trajectory converges at first order or better under dt halving") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 20; ++i) {
    const double a = support::uniform(rng, 0.5, 1.5);
    const double w = support::uniform(rng, 1.0, 3.0);
    auto series = [&](int n) {
      std::vector<BodyVelocity> xi(n);
      for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        xi[k] = {a, 0.2 * std::sin(w * t), std::cos(w * t)};
      }
      return xi;
    };
    const auto coarse = integrate_trajectory({}, series(100), 1e-2);
    const auto fine = integrate_trajectory({}, series(200), 5e-3);
    const auto finer = integrate_trajectory({}, series(400), 2.5e-3);
    const double e1 = support::pose_distance(coarse, fine);
    const double e2 = support::pose_distance(fine, finer);
    CHECK(e2 <= 0.6 * e1 + 1e-14);
  }
}

TEST_CASE("bracket is antisymmetric and matches the matrix commutator") {
  std::mt19937_64 rng(16);
  auto mat = [](const BodyVelocity& v) {
    Eigen::Matrix3d m;
    m << 0, -v.xi_theta, v.xi_x, v.xi_theta, 0, v.xi_y, 0, 0, 0;
    return m;
  };
  for (int i = 0; i < support::kCases; ++i) {
    const auto a = support::random_twist(rng);
    const auto b = support::random_twist(rng);
    const Eigen::Matrix3d c = mat(a) * mat(b) - mat(b) * mat(a);
    const auto got = bracket(a, b);
    CHECK(support::twist_distance(got, {c(0, 2), c(1, 2), c(1, 0)}) < 1e-12);
    CHECK(support::twist_distance(bracket(b, a), got * -1.0) < 1e-12);
  }
}
