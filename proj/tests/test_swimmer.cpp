#include <doctest.h>

#include "geomadapt/errors.hpp"
#include "geomadapt/swimmer.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace geomadapt;
using support::kPi;

namespace {

SwimmerParams swimmer(int links, double k = 2.0, double ct = 1.0) {
  SwimmerParams p;
  p.n_links = links;
  p.drag_ratio = k;
  p.c_tangential = ct;
  return p;
}

double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(swimmer(2).validate(), DimensionError);
  CHECK_THROWS_AS(swimmer(4).validate(), DimensionError);
  CHECK_THROWS_AS(swimmer(3, 0.5).validate(), DimensionError);
  CHECK_THROWS_AS(swimmer(3, 2.0, 0.0).validate(), DimensionError);
  SwimmerParams p = swimmer(3);
  p.link_length = -1;
  CHECK_THROWS_AS(p.validate(), DimensionError);
  CHECK_THROWS_AS(local_connection(Eigen::VectorXd::Zero(3), swimmer(3)), DimensionError);
  CHECK_NOTHROW(swimmer(9, 1.0).validate());
}

TEST_CASE("connection matches the quadrature force-balance oracle at r = (0.5, -0.5), k = 2") {
  Eigen::VectorXd r(2);
  r << 0.5, -0.5;
  const auto a = local_connection(r, swimmer(3));
  const Eigen::MatrixXd want = oracle::quadrature_connection(r, 3, 1.0, 1.0, 2.0);
  CHECK(relative_error(a, want) < 1e-6);
  // Frozen oracle values.
  Eigen::MatrixXd frozen(3, 2);
  frozen << 0.1038858916, 0.1038858916, 0.1426213868, 0.1426213868, -0.2670033042, 0.2670033042;
  CHECK(relative_error(a, frozen) < 1e-8);

  Eigen::VectorXd rd(2);
  rd << 1.0, 0.0;
  const auto xi = body_velocity(r, rd, swimmer(3));
  CHECK(xi.xi_x == doctest::Approx(-0.1038858916).epsilon(1e-8));
  CHECK(xi.xi_y == doctest::Approx(-0.1426213868).epsilon(1e-8));
  CHECK(xi.xi_theta == doctest::Approx(0.2670033042).epsilon(1e-8));
}

TEST_CASE("connection matches the oracle on random shapes for 3, 5 and 9 links") {
  std::mt19937_64 rng(31);
  for (int links : {3, 5, 9}) {
    for (int i = 0; i < 5; ++i) {
      const double k = support::uniform(rng, 1.0, 5.0);
      const Eigen::VectorXd r = support::random_vector(rng, links - 1, 1.2);
      const Eigen::MatrixXd want = oracle::quadrature_connection(r, links, 1.0, 1.0, k, 2000);
      CHECK(relative_error(local_connection(r, swimmer(links, k)), want) < 1e-6);
    }
  }
}

TEST_CASE("body velocity is zero without shape motion and linear in shape velocity") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < support::kCases; ++i) {
    const int links = (i % 3 == 0) ? 3 : (i % 3 == 1 ? 5 : 9);
    const auto p = swimmer(links, support::uniform(rng, 1.0, 4.0));
    const Eigen::VectorXd r = support::random_vector(rng, links - 1, 1.0);
    const Eigen::VectorXd u = support::random_vector(rng, links - 1, 2.0);
    const Eigen::VectorXd v = support::random_vector(rng, links - 1, 2.0);
    const double a = support::uniform(rng, -3, 3);
    const double b = support::uniform(rng, -3, 3);
    const auto lhs = body_velocity(r, a * u + b * v, p);
    const auto rhs = body_velocity(r, u, p) * a + body_velocity(r, v, p) * b;
    CHECK(support::twist_distance(lhs, rhs) < 1e-10);
    CHECK(norm(body_velocity(r, Eigen::VectorXd::Zero(links - 1), p)) == 0.0);
    const auto twice = body_velocity(r, 2.0 * u, p);
    CHECK(support::twist_distance(twice, body_velocity(r, u, p) * 2.0) < 1e-12);
  }
}

TEST_CASE("connection is invariant to uniform drag scaling") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < support::kCases; ++i) {
    const int links = 3 + 2 * static_cast<int>(rng() % 4);
    const double k = support::uniform(rng, 1.0, 4.0);
    const Eigen::VectorXd r = support::random_vector(rng, links - 1, 1.0);
    const auto a1 = local_connection(r, swimmer(links, k, 1.0));
    const auto a2 = local_connection(r, swimmer(links, k, support::uniform(rng, 0.01, 100.0)));
    CHECK((a1 - a2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cycle displacement examples") {
  const auto p = swimmer(3);
  const auto zero = cycle_displacement(Gait::zero(2, 1, 1.0), p);
  CHECK(std::abs(zero.x) + std::abs(zero.y) + std::abs(zero.theta) == 0.0);

  const Gait seed = Gait::seed(2);
  const auto k2 = cycle_displacement(seed, p);
  CHECK(k2.x > 1e-3);
  const auto k4 = cycle_displacement(seed, swimmer(3, 4.0));
  CHECK(k4.x > k2.x);
}

TEST_CASE("isotropic drag gives no net translation") {
  std::mt19937_64 rng(34);
  for (int links : {3, 5}) {
    for (int i = 0; i < 10; ++i) {
      const Gait g = support::random_gait(rng, links - 1, 2, 0.4);
      CHECK(centroid_cycle_displacement(g, swimmer(links, 1.0)).norm() < 1e-5);
    }
  }
}

TEST_CASE("per-cycle displacement is rate independent") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 20; ++i) {
    const Gait g = support::random_gait(rng, 2, 2, 0.5, 1.0);
    const Gait slow(g.coefficients(), 2.0);
    const auto a = cycle_displacement(g, swimmer(3));
    const auto b = cycle_displacement(slow, swimmer(3));
    CHECK(support::pose_distance(a, b) < 1e-8);
  }
}

TEST_CASE("pose integration converges with step count") {
  const Gait g = Gait::seed(2);
  const auto coarse = cycle_displacement(g, swimmer(3), 100);
  const auto fine = cycle_displacement(g, swimmer(3), 200);
  const auto ref = cycle_displacement(g, swimmer(3), 1600);
  CHECK(support::pose_distance(fine, ref) < support::pose_distance(coarse, ref));
  CHECK(support::pose_distance(fine, ref) < 1e-7);
}

TEST_CASE("perturbed samples are exact reconstructions and continuous") {
  const auto p = swimmer(3);
  const Gait g = Gait::seed(2);
  Simulator sim(p, 200);
  auto pert = PerturbationState::for_period(2, 1.0, 0.1, 8);
  const double dt = g.period() / 200;
  Sample prev;
  bool have_prev = false;
  for (int c = 0; c < 3; ++c) {
    const auto seg = sim.run_cycle(g, &pert);
    for (const auto& s : seg.samples) {
      CHECK(support::twist_distance(s.xi, body_velocity(s.r, s.r_dot, p)) < 1e-15);
      if (have_prev) {
        const Eigen::VectorXd offset_step = (s.r - g.shape(s.phi)) - (prev.r - g.shape(prev.phi));
        const Eigen::VectorXd applied = (prev.r_dot - g.shape_velocity(prev.phi)) * dt;
        CHECK((offset_step - applied).cwiseAbs().maxCoeff() < 1e-12);
      }
      prev = s;
      have_prev = true;
    }
  }
  CHECK(sim.time() == doctest::Approx(3.0));
}
