#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "geomadapt/errors.hpp"
#include "geomadapt/gait.hpp"
#include "geomadapt/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace geomadapt;
using support::kPi;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams are reproducible and distinct") {
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 7);
  Philox4x32 c(42, 8);
  int same_c = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    same_c += x == c.next_u32();
  }
  CHECK(same_c < 5);
}

TEST_CASE("philox uniforms and normals have the right moments") {
  Philox4x32 g(3, 0);
  const int n = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = g.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gait construction and validation") {
  CHECK_THROWS_AS(Gait(Eigen::MatrixXd::Zero(2, 2), 1.0), DimensionError);
  CHECK_THROWS_AS(Gait(Eigen::MatrixXd::Zero(2, 3), 0.0), DimensionError);
  CHECK_THROWS_AS(Gait(Eigen::MatrixXd::Zero(0, 3), 1.0), DimensionError);
  const Gait g = Gait::zero(3, 2, 2.0);
  CHECK(g.joints() == 3);
  CHECK(g.order() == 2);
  CHECK(g.phase_rate() == doctest::Approx(kPi));
  CHECK(g.with_parameters(g.parameters()) == g);
  CHECK_THROWS_AS(g.with_parameters(Eigen::VectorXd::Zero(4)), DimensionError);
}

TEST_CASE("nominal_shape examples") {
  const Gait z = Gait::zero(2, 3, 1.0);
  for (double phi : {0.0, 1.0, 4.0}) {
    const auto n = nominal_shape(z, phi);
    CHECK(n.r.norm() == 0.0);
    CHECK(n.r_dot.norm() == 0.0);
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 3);
  c(0, 1) = 0.7;
  const Gait cosine(c, 2.0);
  const double omega = 2 * kPi / 2.0;
  for (double phi : {0.3, 1.7, 5.0}) {
    CHECK(cosine.shape_velocity(phi)[0] == doctest::Approx(-0.7 * omega * std::sin(phi)));
  }

  const Gait seed = Gait::seed(2);
  const double lag = 2 * kPi / 4;
  const auto n = nominal_shape(seed, kPi / 3);
  for (int j = 0; j < 2; ++j) CHECK(n.r[j] == doctest::Approx(oracle::wave_angle(0.5, lag, j, kPi / 3)).epsilon(1e-14));
  // Frozen series values: 0.5 cos(pi/3) and 0.5 cos(pi/3 + pi/2).
  CHECK(n.r[0] == doctest::Approx(0.25));
  CHECK(n.r[1] == doctest::Approx(-0.4330127019));
}

TEST_CASE("gait periodicity and derivative over random gaits") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < support::kCases; ++i) {
    const Gait g = support::random_gait(rng, 4, 3, 0.5, support::uniform(rng, 0.5, 2.0));
    const double phi = support::uniform(rng, -10, 10);
    CHECK((g.shape(phi) - g.shape(phi + 2 * kPi)).cwiseAbs().maxCoeff() < 1e-12);
    const double h = 1e-6;
    const Eigen::VectorXd fd = (g.shape(phi + h) - g.shape(phi - h)) / (2 * h) * g.phase_rate();
    CHECK((fd - g.shape_velocity(phi)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("gait json roundtrip") {
  std::mt19937_64 rng(22);
  const Gait g = support::random_gait(rng, 3, 2, 0.5, 1.5);
  CHECK(gait_from_json(gait_to_json(g)) == g);
  CHECK_THROWS(gait_from_json(nlohmann::json{{"period", 1.0}}));
}

TEST_CASE("covering_windows examples") {
  const PhaseWindowGrid grid(8, 2 * kPi / 4);
  CHECK(covering_windows(grid, grid.center(3)) == std::vector<int>{2, 3, 4});

  // Window centred at 2 pi - spacing/4 must cover phi = 0 through wraparound.
  const PhaseWindowGrid g4(4, 2 * kPi / 4);
  const double offset = g4.spacing() / 4;
  bool wrapped = false;
  for (int m : covering_windows(g4, offset)) wrapped |= m == 0;
  CHECK(wrapped);
  CHECK(circular_distance(0.0, 2 * kPi - offset) == doctest::Approx(offset));

  CHECK_THROWS_AS(PhaseWindowGrid(8, 0.5 * 2 * kPi / 8), DimensionError);
}

TEST_CASE("covering_windows matches a brute-force scan") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < support::kCases; ++i) {
    const int m = 3 + static_cast<int>(rng() % 30);
    const double overlap = support::uniform(rng, 1.0, 4.0);
    const PhaseWindowGrid grid = PhaseWindowGrid::with_overlap(m, overlap);
    const double phi = support::uniform(rng, 0, 2 * kPi);
    std::vector<int> brute;
    for (int k = 0; k < m; ++k) {
      const double d = std::abs(std::remainder(phi - 2 * kPi * k / m, 2 * kPi));
      if (d <= grid.width() / 2 + 1e-12) brute.push_back(k);
    }
    const auto got = covering_windows(grid, phi);
    CHECK(got == brute);
    CHECK(!got.empty());
  }
}

TEST_CASE("perturbation fixed point and decay") {
  PerturbationState s(3, 2.0, 4.0, 0.0, 1);
  for (int i = 0; i < 10000; ++i) step_perturbation(s, 1e-3);
  CHECK(s.delta.norm() == 0.0);
  CHECK(s.delta_dot.norm() == 0.0);

  s.delta << 0.3, -0.2, 0.1;
  const double start = s.delta.norm();
  for (int i = 0; i < 20000; ++i) step_perturbation(s, 1e-3);
  CHECK(s.delta.norm() < 1e-6 * start);
}

TEST_CASE("perturbation stationary variance matches Monte Carlo") {
  // Independent Monte Carlo with std::normal_distribution: the long-run
  // variance of the same Euler-Maruyama recursion.
  const double alpha = 2.0, beta = 4.0, eta = 0.5, dt = 1e-3;
  std::mt19937_64 rng(24);
  std::normal_distribution<double> z;
  auto monte_carlo = [&](auto&& draw) {
    double x = 0.0, v = 0.0, s2 = 0.0;
    const int burn = 20000, n = 100000;
    for (int i = 0; i < burn + n; ++i) {
      v += -(alpha * v + beta * x) * dt + eta * std::sqrt(dt) * draw();
      x += v * dt;
      if (i >= burn) s2 += x * x;
    }
    return s2 / n;
  };
  double mc = 0.0;
  for (int rep = 0; rep < 8; ++rep) mc += monte_carlo([&] { return z(rng); }) / 8;

  PerturbationState s(8, alpha, beta, eta, 99);
  for (int i = 0; i < 20000; ++i) step_perturbation(s, dt);
  double var = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    step_perturbation(s, dt);
    var += s.delta.squaredNorm() / 8;
  }
  var /= n;
  CHECK(var == doctest::Approx(mc).epsilon(0.10));
  CHECK(std::sqrt(var) == doctest::Approx(stationary_delta_rms(alpha, beta, eta)).epsilon(0.10));

  auto d = PerturbationState::for_period(2, 1.0, 0.1, 5);
  CHECK(stationary_delta_rms(d.alpha, d.beta, d.eta) == doctest::Approx(0.1));
  CHECK(d.alpha == doctest::Approx(2.0));
  CHECK(d.beta == doctest::Approx(4 * kPi * kPi));
}

TEST_CASE("perturbation sequences are bit-reproducible and continuous") {
  auto a = PerturbationState::for_period(4, 1.0, 0.1, 77, 3);
  auto b = PerturbationState::for_period(4, 1.0, 0.1, 77, 3);
  const double dt = 1.0 / 200;
  for (int i = 0; i < 5000; ++i) {
    const Eigen::VectorXd before = a.delta;
    step_perturbation(a, dt);
    step_perturbation(b, dt);
    REQUIRE(a.delta == b.delta);
    REQUIRE(a.delta_dot == b.delta_dot);
    CHECK(((a.delta - before).cwiseAbs() - a.delta_dot.cwiseAbs() * dt).maxCoeff() <= 1e-15);
  }
}
