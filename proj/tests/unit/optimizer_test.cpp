#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spintrap/error.hpp"
#include "spintrap/golden_section.hpp"
#include "spintrap/optimizer.hpp"

using namespace spintrap;

namespace {

const RateParams kDefault{};
const PopulationVector kPolarized = PopulationVector::electron_polarized();

// Dense scan of the objective with an independent propagator. Returns the
// best grid point on [0, t_max] with the given spacing.
LaserOptimum brute_force(const PopulationVector& p, Objective obj, double t_max, double spacing) {
  LaserOptimum best{0.0, -1.0};
  for (double t = 0.0; t <= t_max; t += spacing) {
    const Vector6 q = spintrap::testing::propagate_oracle(p.values(), t, kDefault);
    const double v = obj == Objective::P00 ? q[2] : q[2] - q[5];
    if (v > best.value) best = {t, v};
  }
  return best;
}

}  // namespace

TEST_CASE("golden-section search") {
  const auto quad = golden_section_maximize([](double x) { return -(x - 0.37) * (x - 0.37); }, 0.0, 1.0, 1e-8);
  CHECK(quad.x == doctest::Approx(0.37).epsilon(1e-7));

  const auto edge = golden_section_maximize([](double x) { return -x; }, 0.0, 2.0, 1e-6);
  CHECK(edge.x == 0.0);

  const auto sine = golden_section_maximize([](double x) { return std::sin(x); }, 0.0, 3.0, 1e-9);
  CHECK(sine.x == doctest::Approx(M_PI / 2).epsilon(1e-7));
  CHECK(sine.value == doctest::Approx(1.0));
}

TEST_CASE("objective values") {
  const PopulationVector p{0.07, 0.33, 0.55, 0.0, 0.0, 0.05};
  CHECK(objective_value(p, Objective::P00) == 0.55);
  CHECK(objective_value(p, Objective::A0) == doctest::Approx(0.50));
  CHECK(objective_value(steady_state(kDefault), Objective::P00) == doctest::Approx(1.0 / 3));
  CHECK(parse_objective("A0") == Objective::A0);
  CHECK(parse_strategy("blocked") == Strategy::Blocked);
  CHECK_THROWS_AS(parse_objective("purity"), ParameterError);
}

TEST_CASE("optimize_laser") {
  SUBCASE("cycle-2 seg1 state seeded from the reference post-seg2 state") {
    // Rounded reference values, renormalized.
    Vector6 raw;
    raw << 0.0, 0.10329, 0.70598, 0.060073, 0.009102, 0.12155;
    const PopulationVector p(Vector6(raw / raw.sum()));
    const auto opt = optimize_laser(p, kDefault, Objective::P00);
    CHECK(opt.t >= 0.12);
    CHECK(opt.t <= 0.19);
    CHECK(std::abs(opt.value - 0.717) <= 0.005);
    const auto scan = brute_force(p, Objective::P00, 1.0, 1e-4);
    CHECK(opt.value >= scan.value - 1e-9);
    CHECK(opt.t == doctest::Approx(scan.t).epsilon(2e-3));
  }

  SUBCASE("reference seg2 start") {
    const PopulationVector p{0.07, 0.0, 0.55, 0.0, 0.05, 0.33};
    const auto opt = optimize_laser(p, kDefault, Objective::P00);
    CHECK(opt.t >= 0.38);
    CHECK(opt.t <= 0.50);
    CHECK(std::abs(opt.value - 0.706) <= 0.004);
  }

  SUBCASE("A0 objective peaks later than P00 for seg1") {
    const PopulationVector p{0.0, 1.0 / 3, 1.0 / 3, 0.0, 0.0, 1.0 / 3};
    const auto p00 = optimize_laser(p, kDefault, Objective::P00);
    const auto a0 = optimize_laser(p, kDefault, Objective::A0);
    CHECK(p00.t == doctest::Approx(0.576).epsilon(0.01));
    CHECK(a0.t == doctest::Approx(0.782).epsilon(0.01));
    CHECK(a0.t > p00.t);
  }

  SUBCASE("a pumped state cannot be improved") {
    for (Objective obj : {Objective::P00, Objective::A0}) {
      const auto opt = optimize_laser(kPolarized, kDefault, obj);
      CHECK(opt.t == 0.0);
      CHECK(opt.value == objective_value(kPolarized, obj));
    }
  }

  SUBCASE("never worse than no laser, on random states") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 20; ++i) {
      const PopulationVector p(spintrap::testing::random_simplex(rng));
      for (Objective obj : {Objective::P00, Objective::A0}) {
        CHECK(optimize_laser(p, kDefault, obj).value >= objective_value(p, obj));
      }
    }
  }

  SUBCASE("reflection symmetry between seg1 and seg2") {
    using spintrap::testing::permute_nuclear_labels;
    std::mt19937_64 rng(43);
    for (int i = 0; i < 10; ++i) {
      const Vector6 p = spintrap::testing::random_simplex(rng);
      const auto a = optimize_laser(apply_swaps(PopulationVector(p), SegmentLabel::Seg1), kDefault, Objective::P00);
      const auto b = optimize_laser(apply_swaps(PopulationVector(permute_nuclear_labels(p)), SegmentLabel::Seg2),
                                    kDefault, Objective::P00);
      CHECK(a.t == doctest::Approx(b.t).epsilon(1e-9));
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(optimize_laser(kPolarized, kDefault, Objective::P00, 0.0), ParameterError);
}

TEST_CASE("run_cycle") {
  SUBCASE("cycle 1 with the experimental durations") {
    const auto c = run_cycle(kPolarized, kDefault, Objective::P00, DurationOverrides{0.5, 0.46});
    CHECK(c.t1 == 0.5);
    CHECK(c.t2 == 0.46);
    CHECK(std::abs(c.purity_after_seg1 - 0.550) <= 0.002);
    // From the model-propagated seg1 output, seg2 reaches 0.69989 (Pade
    // exponential oracle); 0.706 needs the rounded reference intermediate state.
    CHECK(c.purity_after_seg2 == doctest::Approx(0.699886541).epsilon(1e-8));
    const auto from_reference =
        run_segment_pass({0.07, 0.33, 0.55, 0.0, 0.0, 0.05}, SegmentLabel::Seg2, kDefault, Objective::P00, 0.46);
    CHECK(std::abs(from_reference.state[2] - 0.706) <= 0.004);
  }

  SUBCASE("cycle 2 optimizes both durations") {
    const auto c1 = run_cycle(kPolarized, kDefault, Objective::P00, DurationOverrides{0.5, 0.46});
    const auto c2 = run_cycle(c1.end_state, kDefault, Objective::P00, std::nullopt, kDefaultSearchMaxUs, 2);
    CHECK(c2.cycle == 2);
    CHECK(c2.t1 >= 0.12);
    CHECK(c2.t1 <= 0.19);
    CHECK(c2.t2 >= 0.09);
    CHECK(c2.t2 <= 0.19);
    CHECK(c2.purity_after_seg2 >= 0.725);
  }

  SUBCASE("steady-state start cannot lose purity") {
    const auto c = run_cycle(steady_state(kDefault), kDefault, Objective::P00);
    CHECK(c.purity_after_seg2 >= 1.0 / 3 - 1e-15);
    CHECK(c.purity_after_seg1 >= 1.0 / 3 - 1e-15);
  }
}

TEST_CASE("optimize_schedule") {
  const DurationOverrides experimental{0.5, 0.46};

  SUBCASE("interleaved three cycles") {
    const auto s = optimize_schedule(kPolarized, kDefault, Objective::P00, 3, Strategy::Interleaved, experimental);
    REQUIRE(s.cycles.size() == 3);
    CHECK(s.final_purity >= 0.72);
    CHECK(s.final_purity <= 0.75);
    CHECK(s.cycles[2].t1 <= 0.05);
    CHECK(s.cycles[2].t2 <= 0.05);
    for (std::size_t i = 1; i < s.cycles.size(); ++i) {
      CHECK(s.cycles[i].purity_after_seg2 >= s.cycles[i - 1].purity_after_seg2);
    }
    // Frozen from an independent scan with a Pade exponential.
    CHECK(s.cycles[1].t1 == doctest::Approx(0.15758).epsilon(2e-3));
    CHECK(s.cycles[1].t2 == doctest::Approx(0.14250).epsilon(2e-3));
    CHECK(s.final_purity == doctest::Approx(0.725526).epsilon(1e-5));
  }

  SUBCASE("blocked never beats interleaved") {
    const auto inter = optimize_schedule(kPolarized, kDefault, Objective::P00, 3, Strategy::Interleaved, experimental);
    const auto blocked = optimize_schedule(kPolarized, kDefault, Objective::P00, 3, Strategy::Blocked, experimental);
    CHECK(blocked.final_purity <= inter.final_purity + 1e-9);
    CHECK(blocked.final_purity == doctest::Approx(0.708301).epsilon(1e-5));
    CHECK(blocked.cycles[0].t1 == 0.5);
    CHECK(blocked.cycles[0].t2 == 0.46);
    CHECK(blocked.cycles.back().end_state == blocked.final_state);
  }

  SUBCASE("a single cycle reduces to run_cycle") {
    const auto s = optimize_schedule(kPolarized, kDefault, Objective::P00, 1, Strategy::Interleaved, experimental);
    const auto c = run_cycle(kPolarized, kDefault, Objective::P00, experimental);
    REQUIRE(s.cycles.size() == 1);
    CHECK(s.cycles[0].purity_after_seg1 == c.purity_after_seg1);
    CHECK(s.cycles[0].purity_after_seg2 == c.purity_after_seg2);
  }

  SUBCASE("monotone over many cycles without overrides") {
    const auto s = optimize_schedule(kPolarized, kDefault, Objective::P00, 6, Strategy::Interleaved);
    for (std::size_t i = 1; i < s.cycles.size(); ++i) {
      CHECK(s.cycles[i].purity_after_seg2 >= s.cycles[i - 1].purity_after_seg2);
    }
  }

  SUBCASE("deterministic") {
    const auto a = optimize_schedule(kPolarized, kDefault, Objective::A0, 3, Strategy::Interleaved, experimental);
    const auto b = optimize_schedule(kPolarized, kDefault, Objective::A0, 3, Strategy::Interleaved, experimental);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.cycles[i].t1 == b.cycles[i].t1);
      CHECK(a.cycles[i].t2 == b.cycles[i].t2);
      CHECK(a.cycles[i].end_state == b.cycles[i].end_state);
    }
  }

  CHECK_THROWS_AS(optimize_schedule(kPolarized, kDefault, Objective::P00, 0, Strategy::Interleaved), ParameterError);
  CHECK_THROWS_AS(optimize_schedule(kPolarized, kDefault, Objective::P00, 21, Strategy::Blocked), ParameterError);
}
