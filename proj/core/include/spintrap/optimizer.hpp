#pragma once

// Laser-duration optimization for the seg1/seg2 population-trapping cycle.

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "spintrap/pulse_sequence.hpp"
#include "spintrap/spin_model.hpp"

namespace spintrap {

enum class Objective {
  P00,  // population of |0,0>
  A0,   // P|0,0> - P|-1,0>
};

enum class Strategy {
  Interleaved,  // [seg1 + seg2] x N
  Blocked,      // [seg1 x N + seg2 x N]
};

std::string_view to_string(Objective obj);
std::string_view to_string(Strategy s);
Objective parse_objective(std::string_view text);
Strategy parse_strategy(std::string_view text);

inline constexpr double kDefaultSearchMaxUs = 10.0;
inline constexpr int kCoarseGridPoints = 1000;
inline constexpr double kRefineTolUs = 1e-4;
inline constexpr double kTieTolerance = 1e-6;
inline constexpr int kMaxCycles = 20;

double objective_value(const PopulationVector& p, Objective obj);

struct LaserOptimum {
  double t;      // us
  double value;  // objective at t
};

/// Global maximum of t -> objective(propagate(p, t)) over [0, t_max]: a
/// 1000-point grid, then golden-section refinement around the best grid
/// point. Candidates within kTieTolerance of the best value resolve to the
/// smallest t.
LaserOptimum optimize_laser(const PopulationVector& p_post_swaps, const RateParams& rates, Objective obj,
                            double t_max = kDefaultSearchMaxUs);

struct CycleResult {
  int cycle = 0;
  double t1 = 0.0;
  double purity_after_seg1 = 0.0;
  double t2 = 0.0;
  double purity_after_seg2 = 0.0;
  PopulationVector end_state = PopulationVector::electron_polarized();
};

using DurationOverrides = std::pair<double, double>;

struct SegmentPass {
  double t;
  PopulationVector state;
};

/// Swaps of one segment followed by a laser pulse of the given (or optimized)
/// duration.
SegmentPass run_segment_pass(const PopulationVector& p, SegmentLabel label, const RateParams& rates,
                             Objective obj, std::optional<double> duration = std::nullopt,
                             double t_max = kDefaultSearchMaxUs);

CycleResult run_cycle(const PopulationVector& p, const RateParams& rates, Objective obj,
                      std::optional<DurationOverrides> overrides = std::nullopt, double t_max = kDefaultSearchMaxUs,
                      int cycle_index = 1);

struct Schedule {
  Strategy strategy = Strategy::Interleaved;
  Objective objective = Objective::P00;
  std::vector<CycleResult> cycles;
  double final_purity = 0.0;
  PopulationVector final_state = PopulationVector::electron_polarized();
};

/// Interleaved folds run_cycle n times. Blocked runs n seg1 passes and then n
/// seg2 passes; row i of the result holds seg1 pass i and seg2 pass i, and its
/// end_state is the state after seg2 pass i. Overrides apply to the first pass
/// of each segment only.
Schedule optimize_schedule(const PopulationVector& p0, const RateParams& rates, Objective obj, int n_cycles,
                           Strategy strategy, std::optional<DurationOverrides> cycle1_overrides = std::nullopt,
                           double t_max = kDefaultSearchMaxUs);

}  // namespace spintrap
