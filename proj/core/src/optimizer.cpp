#include "spintrap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spintrap/error.hpp"
#include "spintrap/golden_section.hpp"

namespace spintrap {

namespace {

double objective_of(const Vector6& p, Objective obj) { return obj == Objective::P00 ? p[2] : p[2] - p[5]; }

double purity(const PopulationVector& p) { return p[2]; }

}  // namespace

std::string_view to_string(Objective obj) { return obj == Objective::P00 ? "P00" : "A0"; }

std::string_view to_string(Strategy s) { return s == Strategy::Interleaved ? "interleaved" : "blocked"; }

Objective parse_objective(std::string_view text) {
  if (text == "P00") return Objective::P00;
  if (text == "A0") return Objective::A0;
  throw ParameterError(fmt::format("unknown objective '{}' (expected P00 or A0)", text));
}

Strategy parse_strategy(std::string_view text) {
  if (text == "interleaved") return Strategy::Interleaved;
  if (text == "blocked") return Strategy::Blocked;
  throw ParameterError(fmt::format("unknown strategy '{}' (expected interleaved or blocked)", text));
}

double objective_value(const PopulationVector& p, Objective obj) { return objective_of(p.values(), obj); }

LaserOptimum optimize_laser(const PopulationVector& p, const RateParams& rates, Objective obj, double t_max) {
  rates.validate();
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ParameterError(fmt::format("search limit t_max must be finite and > 0 us, got {}", t_max));
  }
  auto f = [&](double t) { return objective_of(propagator(t, rates) * p.values(), obj); };

  std::vector<LaserOptimum> candidates;
  candidates.reserve(kCoarseGridPoints + 1);
  const double spacing = t_max / (kCoarseGridPoints - 1);
  for (int k = 0; k < kCoarseGridPoints; ++k) {
    const double t = k == kCoarseGridPoints - 1 ? t_max : k * spacing;
    candidates.push_back({t, k == 0 ? objective_value(p, obj) : f(t)});
  }
  const auto grid_best = std::max_element(candidates.begin(), candidates.end(),
                                          [](const auto& a, const auto& b) { return a.value < b.value; });
  const auto k = static_cast<double>(std::distance(candidates.begin(), grid_best));
  const double lo = std::max(0.0, (k - 1.0) * spacing);
  const double hi = std::min(t_max, (k + 1.0) * spacing);
  const ScalarOptimum refined = golden_section_maximize(f, lo, hi, kRefineTolUs);
  candidates.push_back({refined.x, refined.value});

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::max(best, c.value);
  LaserOptimum chosen{std::numeric_limits<double>::infinity(), best};
  for (const auto& c : candidates) {
    if (c.value >= best - kTieTolerance && c.t < chosen.t) chosen = c;
  }
  return chosen;
}

SegmentPass run_segment_pass(const PopulationVector& p, SegmentLabel label, const RateParams& rates, Objective obj,
                             std::optional<double> duration, double t_max) {
  const PopulationVector swapped = apply_swaps(p, label);
  const double t = duration ? *duration : optimize_laser(swapped, rates, obj, t_max).t;
  return {t, apply_pulse(swapped, Pulse::laser(t), rates)};
}

CycleResult run_cycle(const PopulationVector& p, const RateParams& rates, Objective obj,
                      std::optional<DurationOverrides> overrides, double t_max, int cycle_index) {
  const auto first = run_segment_pass(p, SegmentLabel::Seg1, rates, obj,
                                      overrides ? std::optional(overrides->first) : std::nullopt, t_max);
  const auto second = run_segment_pass(first.state, SegmentLabel::Seg2, rates, obj,
                                       overrides ? std::optional(overrides->second) : std::nullopt, t_max);
  return {cycle_index, first.t, purity(first.state), second.t, purity(second.state), second.state};
}

Schedule optimize_schedule(const PopulationVector& p0, const RateParams& rates, Objective obj, int n_cycles,
                           Strategy strategy, std::optional<DurationOverrides> cycle1_overrides, double t_max) {
  if (n_cycles < 1 || n_cycles > kMaxCycles) {
    throw ParameterError(fmt::format("n_cycles must lie in [1, {}], got {}", kMaxCycles, n_cycles));
  }
  Schedule schedule{strategy, obj, {}, 0.0, p0};
  schedule.cycles.reserve(static_cast<std::size_t>(n_cycles));

  if (strategy == Strategy::Interleaved) {
    PopulationVector state = p0;
    for (int c = 1; c <= n_cycles; ++c) {
      auto result = run_cycle(state, rates, obj, c == 1 ? cycle1_overrides : std::nullopt, t_max, c);
      state = result.end_state;
      schedule.cycles.push_back(std::move(result));
    }
    schedule.final_state = state;
  } else {
    auto override_for = [&](int pass, bool seg1) -> std::optional<double> {
      if (pass != 1 || !cycle1_overrides) return std::nullopt;
      return seg1 ? cycle1_overrides->first : cycle1_overrides->second;
    };
    PopulationVector state = p0;
    for (int c = 1; c <= n_cycles; ++c) {
      const auto pass = run_segment_pass(state, SegmentLabel::Seg1, rates, obj, override_for(c, true), t_max);
      state = pass.state;
      CycleResult row;
      row.cycle = c;
      row.t1 = pass.t;
      row.purity_after_seg1 = purity(state);
      schedule.cycles.push_back(row);
    }
    for (int c = 1; c <= n_cycles; ++c) {
      const auto pass = run_segment_pass(state, SegmentLabel::Seg2, rates, obj, override_for(c, false), t_max);
      state = pass.state;
      auto& row = schedule.cycles[static_cast<std::size_t>(c - 1)];
      row.t2 = pass.t;
      row.purity_after_seg2 = purity(state);
      row.end_state = state;
    }
    schedule.final_state = state;
  }
  schedule.final_purity = purity(schedule.final_state);
  return schedule;
}

}  // namespace spintrap
