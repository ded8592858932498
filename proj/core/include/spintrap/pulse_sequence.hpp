#pragma once

// MW/RF pi pulses (instantaneous population swaps) and laser pulses (rate
// equation propagation), grouped into the seg1/seg2 segments of the
// initialization sequence.

#include <span>
#include <string_view>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spintrap/spin_model.hpp"

namespace spintrap {

using LevelPair = std::pair<SpinLevel, SpinLevel>;

struct MwPi {
  LevelPair pair;
  double fidelity = 1.0;
};

struct RfPi {
  LevelPair pair;
  double fidelity = 1.0;
};

struct Laser {
  double duration;  // us
};

/// A validated pulse. Pi pulses may only address the four measured transitions.
class Pulse {
 public:
  using Variant = std::variant<MwPi, RfPi, Laser>;

  static Pulse mw_pi(SpinLevel a, SpinLevel b, double fidelity = 1.0);
  static Pulse rf_pi(SpinLevel a, SpinLevel b, double fidelity = 1.0);
  static Pulse laser(double duration_us);

  [[nodiscard]] const Variant& variant() const noexcept { return v_; }
  [[nodiscard]] std::string describe() const;

 private:
  explicit Pulse(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

enum class SegmentLabel { Seg1, Seg2, Custom };

std::string_view to_string(SegmentLabel label);

struct Segment {
  SegmentLabel label = SegmentLabel::Custom;
  std::vector<Pulse> pulses;

  /// MW (0,-1)<->(-1,-1), RF (-1,-1)<->(-1,0), laser.
  static Segment seg1(double laser_us);
  /// MW (0,+1)<->(-1,+1), RF (-1,+1)<->(-1,0), laser.
  static Segment seg2(double laser_us);
};

/// The MW and RF pulses of seg1 or seg2, without the laser.
std::vector<Pulse> swap_pulses(SegmentLabel label);

struct TraceRecord {
  std::size_t index;
  std::string description;
  PopulationVector state;
};

struct SequenceRun {
  PopulationVector final_state;
  std::vector<TraceRecord> trace;
};

PopulationVector apply_pulse(const PopulationVector& p, const Pulse& pulse, const RateParams& rates);

SequenceRun run_sequence(const PopulationVector& p, std::span<const Pulse> pulses, const RateParams& rates);

inline SequenceRun run_segment(const PopulationVector& p, const Segment& seg, const RateParams& rates) {
  return run_sequence(p, seg.pulses, rates);
}

/// Applies only the pi pulses of seg1/seg2.
PopulationVector apply_swaps(const PopulationVector& p, SegmentLabel label);

inline constexpr double kDefaultInitLaserUs = 5.0;

/// State after an initializing laser pulse, starting from the fully mixed state.
PopulationVector initial_state(const RateParams& rates, double init_laser_us = kDefaultInitLaserUs);

}  // namespace spintrap
