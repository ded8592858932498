#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "spintrap/error.hpp"
#include "spintrap/spin_model.hpp"

using namespace spintrap;
using spintrap::testing::expm_oracle;
using spintrap::testing::random_simplex;

namespace {

const RateParams kDefault{};

PopulationVector seg1_start() { return {0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 1.0 / 3.0}; }
PopulationVector seg2_start() { return {0.07, 0.0, 0.55, 0.0, 0.05, 0.33}; }

double max_abs(const Vector6& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("spin levels map to the canonical basis order") {
  const std::pair<int, int> order[] = {{0, -1}, {0, 1}, {0, 0}, {-1, -1}, {-1, 1}, {-1, 0}};
  for (std::size_t i = 0; i < 6; ++i) {
    const SpinLevel level(order[i].first, order[i].second);
    CHECK(level.index() == i);
    CHECK(SpinLevel::from_index(i) == level);
  }
  CHECK_THROWS_AS(SpinLevel(1, 0), DomainError);
  CHECK_THROWS_AS(SpinLevel(0, 2), DomainError);
  CHECK_THROWS_AS(SpinLevel::from_index(6), DomainError);
}

TEST_CASE("population vectors enforce the simplex") {
  CHECK_NOTHROW(PopulationVector{0.07, 0.33, 0.55, 0.0, 0.0, 0.05});
  CHECK_THROWS_AS((PopulationVector{0.5, 0.5, 0.5, 0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS((PopulationVector{1.1, -0.1, 0.0, 0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS((PopulationVector{0.5, 0.5}), DomainError);

  SUBCASE("float dust is clamped, real negatives are rejected") {
    Vector6 dust;
    dust << 0.5, 0.5, -5e-13, 0.0, 0.0, 0.0;
    CHECK(PopulationVector::from_propagated(dust)[2] == 0.0);
    Vector6 bad;
    bad << 0.5, 0.5 + 1e-10, -1e-10, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(PopulationVector::from_propagated(bad), DomainError);
  }
}

TEST_CASE("rate_matrix reproduces the reference generator") {
  const Matrix6 m = rate_matrix(kDefault);
  CHECK(m == spintrap::testing::printed_rate_matrix(kDefault.k_s, kDefault.k_i));
  CHECK(m(2, 5) == doctest::Approx(3.7037).epsilon(1e-5));
  CHECK(m(0, 0) == doctest::Approx(-0.42017).epsilon(1e-5));

  SUBCASE("columns sum to zero and off-diagonals are nonnegative") {
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(m.col(j).sum()) < 1e-15);
      for (int i = 0; i < 6; ++i) {
        if (i != j) CHECK(m(i, j) >= 0.0);
      }
    }
  }

  SUBCASE("k_i = 0 leaves only electron decay") {
    const Matrix6 m0 = rate_matrix({3.0, 0.0});
    CHECK(m0.topLeftCorner<3, 3>().isZero());
    CHECK(m0.bottomRightCorner<3, 3>() == -3.0 * Eigen::Matrix3d::Identity());
  }

  SUBCASE("eigenvalues are {0, -3k_i x2, -k_s x3}") {
    Eigen::EigenSolver<Matrix6> solver(m);
    std::vector<double> ev;
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(solver.eigenvalues()[i].imag()) < 1e-12);
      ev.push_back(solver.eigenvalues()[i].real());
    }
    std::sort(ev.begin(), ev.end());
    const double ks = kDefault.k_s;
    const double ki = kDefault.k_i;
    const std::vector<double> expected{-ks, -ks, -ks, -3 * ki, -3 * ki, 0.0};
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(ev[i] - expected[i]) < 1e-9);
  }

  CHECK_THROWS_AS(rate_matrix({0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(rate_matrix({std::nan(""), 1.0}), ParameterError);
  CHECK_THROWS_AS(rate_matrix({1.0, -0.1}), ParameterError);
}

TEST_CASE("propagator matches an independent matrix exponential") {
  CHECK(propagator(0.0, kDefault) == Matrix6::Identity());
  for (double t : {0.01, 0.3, 1.0, 4.0, 10.0}) {
    CHECK((propagator(t, kDefault) - expm_oracle(t, kDefault)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("long times converge to the pumped, depolarized steady state") {
    const Matrix6 u = propagator(40.0, kDefault);
    for (int j = 0; j < 6; ++j) {
      Vector6 expected;
      expected << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0, 0;
      CHECK(max_abs(u.col(j) - expected) < 1e-6);
    }
  }

  SUBCASE("semigroup") {
    const Matrix6 lhs = propagator(1.0, kDefault);
    const Matrix6 rhs = propagator(0.7, kDefault) * propagator(0.3, kDefault);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("propagator columns are probability distributions") {
    const Matrix6 u = propagator(0.77, kDefault);
    CHECK(u.minCoeff() >= 0.0);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(u.col(j).sum() - 1.0) < 1e-12);
  }

  CHECK_THROWS_AS(propagator(-0.1, kDefault), DomainError);
}

TEST_CASE("degenerate rates switch to the numeric path without a seam") {
  const double ks = 3.0;
  const RateParams exact{ks, 1.0};
  const Matrix6 u = propagator(1.3, exact);
  CHECK(u.allFinite());
  CHECK((u - expm_oracle(1.3, exact)).cwiseAbs().maxCoeff() < 1e-9);

  // Just outside the fallback band the closed form is used; both paths agree.
  for (double gap : {1.5e-6, 5e-6, -2e-6}) {
    const RateParams near{ks, (ks + gap) / 3.0};
    for (double t : {0.2, 1.0, 5.0}) {
      const Matrix6 closed = propagator_closed_form(t, near);
      const Matrix6 numeric = propagator_numeric(t, near);
      CHECK((closed - numeric).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  CHECK_THROWS_AS(propagator_closed_form(1.0, exact), DomainError);
}

TEST_CASE("propagate reproduces the reference seg1 and seg2 laser dynamics") {
  SUBCASE("seg1 laser of 0.5 us") {
    const PopulationVector p = propagate(seg1_start(), 0.5, kDefault);
    const double expected[] = {0.077, 0.320, 0.550, 0.0, 0.0, 0.052};
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(p[i] - expected[i]) <= 0.002);
    // Frozen from a Pade matrix exponential.
    CHECK(p[2] == doctest::Approx(0.550350240244).epsilon(1e-10));
    // Cross-check against the reference state (0.07, 0.33, 0.55, 0, 0, 0.05).
    const double reference[] = {0.07, 0.33, 0.55, 0.0, 0.0, 0.05};
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(p[i] - reference[i]) <= 0.015);
  }

  SUBCASE("seg2 laser of 0.46 us") {
    const PopulationVector p = propagate(seg2_start(), 0.46, kDefault);
    CHECK(std::abs(p[2] - 0.706) <= 0.004);
    CHECK(p[2] == doctest::Approx(0.705969085).epsilon(1e-8));
  }

  SUBCASE("t = 0 leaves the state unchanged") {
    const PopulationVector p{0.1, 0.2, 0.3, 0.1, 0.2, 0.1};
    CHECK(propagate(p, 0.0, kDefault) == p);
  }
}

TEST_CASE("numeric integrator agrees with the closed form") {
  for (double t : {0.1, 0.5, 1.0, 4.0}) {
    const Vector6 a = propagate(seg1_start(), t, kDefault).values();
    const Vector6 b = propagate_numeric(seg1_start(), t, kDefault).values();
    CHECK(max_abs(a - b) <= 1e-6);
  }
  CHECK(propagate_numeric(seg1_start(), 0.0, kDefault) == seg1_start());

  const PopulationVector degenerate = propagate_numeric(seg1_start(), 2.0, {3.0, 1.0});
  CHECK(degenerate.values().allFinite());
  CHECK(std::abs(degenerate.values().sum() - 1.0) < 1e-9);

  CHECK_THROWS_AS(propagate_numeric(seg1_start(), 1.0, kDefault, 0.0), ParameterError);
  CHECK_THROWS_AS(propagate_numeric(seg1_start(), 1.0, kDefault, 0.02), ParameterError);
}

TEST_CASE("steady state is the normalized kernel of the generator") {
  const PopulationVector ss = steady_state(kDefault);
  CHECK(ss == PopulationVector::electron_polarized());
  CHECK(max_abs(rate_matrix(kDefault) * ss.values()) < 1e-12);
  CHECK_THROWS_AS(steady_state({3.0, 0.0}), DomainError);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const PopulationVector p(random_simplex(rng));
    CHECK(max_abs(propagate(p, 40.0, kDefault).values() - ss.values()) < 1e-6);
  }
}

TEST_CASE("properties over random states") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> time(0.0, 10.0);

  SUBCASE("simplex preservation") {
    for (int i = 0; i < 1000; ++i) {
      const PopulationVector p(random_simplex(rng));
      const Vector6 out = propagator(time(rng), kDefault) * p.values();
      CHECK(out.minCoeff() >= -1e-12);
      CHECK(std::abs(out.sum() - 1.0) <= 1e-9);
    }
  }

  SUBCASE("semigroup on states") {
    for (int i = 0; i < 100; ++i) {
      const PopulationVector p(random_simplex(rng));
      const double t1 = time(rng) / 2;
      const double t2 = time(rng) / 2;
      const Vector6 twice = propagate(propagate(p, t1, kDefault), t2, kDefault).values();
      const Vector6 once = propagate(p, t1 + t2, kDefault).values();
      CHECK(max_abs(twice - once) <= 1e-9);
    }
  }

  SUBCASE("nuclear-label permutation commutes with propagation") {
    using spintrap::testing::permute_nuclear_labels;
    for (int i = 0; i < 100; ++i) {
      const Vector6 p = random_simplex(rng);
      const double t = time(rng);
      const Vector6 a = propagate(PopulationVector(permute_nuclear_labels(p)), t, kDefault).values();
      const Vector6 b = permute_nuclear_labels(propagate(PopulationVector(p), t, kDefault).values());
      CHECK(max_abs(a - b) <= 1e-14);
    }
  }

  SUBCASE("oracle equivalence on 50 random cases") {
    for (int i = 0; i < 50; ++i) {
      const PopulationVector p(random_simplex(rng));
      const double t = time(rng);
      const Vector6 a = propagate(p, t, kDefault).values();
      const Vector6 b = propagate_numeric(p, t, kDefault).values();
      CHECK(max_abs(a - b) <= 1e-6);
    }
  }
}

TEST_CASE("printed seg1 solution equals the propagator after a 0<->1 exchange") {
  const Vector6 at0 = seg1_appendix_solution(0.0, kDefault);
  Vector6 expected0;
  expected0 << 1.0 / 3, 0.0, 1.0 / 3, 0.0, 0.0, 1.0 / 3;
  CHECK(max_abs(at0 - expected0) < 1e-15);

  Vector6 asymptote;
  asymptote << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0, 0.0, 0.0;
  CHECK(max_abs(seg1_appendix_solution(200.0, kDefault) - asymptote) < 1e-12);

  for (int k = 0; k <= 500; ++k) {
    const double t = 5.0 * k / 500.0;
    Vector6 printed = seg1_appendix_solution(t, kDefault);
    std::swap(printed[0], printed[1]);
    CHECK(max_abs(printed - propagate(seg1_start(), t, kDefault).values()) <= 1e-9);
  }
  CHECK_THROWS_AS(seg1_appendix_solution(1.0, {3.0, 1.0}), DomainError);
}

TEST_CASE("printed seg2 solution agrees with the propagator except component 1") {
  const Vector6 at_046 = seg2_appendix_solution(0.46, kDefault);
  const Vector6 exact_046 = propagate(seg2_start(), 0.46, kDefault).values();
  CHECK(std::abs(at_046[0] - exact_046[0]) <= 0.015);
  CHECK(exact_046[0] == doctest::Approx(0.1216).epsilon(1e-3));
  CHECK(std::abs(seg2_appendix_solution(0.0, kDefault)[2] - 0.561) < 5e-4);
  CHECK(std::abs(seg2_appendix_solution(0.0, kDefault)[2] - 0.55) <= 0.015);
  CHECK(at_046[5] == doctest::Approx(0.33 * std::exp(-0.46 * kDefault.k_s)));
  CHECK(at_046[5] == doctest::Approx(0.0601).epsilon(1e-3));

  for (int k = 0; k <= 400; ++k) {
    const double t = 4.0 * k / 400.0;
    const Vector6 printed = seg2_appendix_solution(t, kDefault);
    const Vector6 exact = propagate(seg2_start(), t, kDefault).values();
    for (int i : {0, 2, 3, 4, 5}) CHECK(std::abs(printed[i] - exact[i]) <= 0.015);
  }
  // Component 1 starts near 0.61 although the initial population is 0.
  CHECK(std::abs(seg2_appendix_solution(0.0, kDefault)[1]) > 0.5);

  SUBCASE("exact asymptote tightens the early-time agreement") {
    const Vector6 printed = seg2_appendix_solution(0.0, kDefault, 1.0 / 3.0);
    CHECK(std::abs(printed[0] - 0.07) < 0.005);
  }
}
