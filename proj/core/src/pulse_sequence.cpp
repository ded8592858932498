#include "spintrap/pulse_sequence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "spintrap/error.hpp"
#include "spintrap/hamiltonian.hpp"

namespace spintrap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool same_pair(const LevelPair& a, const LevelPair& b) {
  return (a.first == b.first && a.second == b.second) || (a.first == b.second && a.second == b.first);
}

void check_pair(const LevelPair& pair, TransitionKind kind, double fidelity) {
  const auto& refs = reference_transitions();
  const bool known = std::any_of(refs.begin(), refs.end(), [&](const TransitionRef& r) {
    return r.kind == kind && same_pair(r.pair, pair);
  });
  if (!known) {
    throw DomainError(fmt::format("invalid transition pair {}<->{} for {} pulse", pair.first.to_string(),
                                  pair.second.to_string(), to_string(kind)));
  }
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    throw ParameterError(fmt::format("swap fidelity must lie in [0, 1], got {}", fidelity));
  }
}

std::string pair_string(const LevelPair& pair) {
  return fmt::format("{}<->{}", pair.first.to_string(), pair.second.to_string());
}

}  // namespace

Pulse Pulse::mw_pi(SpinLevel a, SpinLevel b, double fidelity) {
  LevelPair pair{a, b};
  check_pair(pair, TransitionKind::Mw, fidelity);
  return Pulse(MwPi{pair, fidelity});
}

Pulse Pulse::rf_pi(SpinLevel a, SpinLevel b, double fidelity) {
  LevelPair pair{a, b};
  check_pair(pair, TransitionKind::Rf, fidelity);
  return Pulse(RfPi{pair, fidelity});
}

Pulse Pulse::laser(double duration_us) {
  if (!(duration_us >= 0.0) || !std::isfinite(duration_us)) {
    throw DomainError(fmt::format("laser duration must be finite and >= 0 us, got {}", duration_us));
  }
  return Pulse(Laser{duration_us});
}

std::string Pulse::describe() const {
  return std::visit(Overloaded{
                        [](const MwPi& p) { return fmt::format("MW pi {}", pair_string(p.pair)); },
                        [](const RfPi& p) { return fmt::format("RF pi {}", pair_string(p.pair)); },
                        [](const Laser& p) { return fmt::format("laser {} us", p.duration); },
                    },
                    v_);
}

std::string_view to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Seg1: return "seg1";
    case SegmentLabel::Seg2: return "seg2";
    case SegmentLabel::Custom: break;
  }
  return "custom";
}

std::vector<Pulse> swap_pulses(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Seg1:
      return {Pulse::mw_pi({0, -1}, {-1, -1}), Pulse::rf_pi({-1, -1}, {-1, 0})};
    case SegmentLabel::Seg2:
      return {Pulse::mw_pi({0, +1}, {-1, +1}), Pulse::rf_pi({-1, +1}, {-1, 0})};
    case SegmentLabel::Custom: break;
  }
  throw DomainError("custom segments have no predefined swap pulses");
}

Segment Segment::seg1(double laser_us) {
  Segment s{SegmentLabel::Seg1, swap_pulses(SegmentLabel::Seg1)};
  s.pulses.push_back(Pulse::laser(laser_us));
  return s;
}

Segment Segment::seg2(double laser_us) {
  Segment s{SegmentLabel::Seg2, swap_pulses(SegmentLabel::Seg2)};
  s.pulses.push_back(Pulse::laser(laser_us));
  return s;
}

PopulationVector apply_pulse(const PopulationVector& p, const Pulse& pulse, const RateParams& rates) {
  return std::visit(Overloaded{
                        [&](const MwPi& mw) {
                          return p.swapped(mw.pair.first.index(), mw.pair.second.index(), mw.fidelity);
                        },
                        [&](const RfPi& rf) {
                          return p.swapped(rf.pair.first.index(), rf.pair.second.index(), rf.fidelity);
                        },
                        [&](const Laser& l) { return propagate(p, l.duration, rates); },
                    },
                    pulse.variant());
}

SequenceRun run_sequence(const PopulationVector& p, std::span<const Pulse> pulses, const RateParams& rates) {
  SequenceRun run{p, {}};
  run.trace.reserve(pulses.size());
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    run.final_state = apply_pulse(run.final_state, pulses[i], rates);
    run.trace.push_back({i, pulses[i].describe(), run.final_state});
  }
  return run;
}

PopulationVector apply_swaps(const PopulationVector& p, SegmentLabel label) {
  PopulationVector out = p;
  for (const auto& pulse : swap_pulses(label)) out = apply_pulse(out, pulse, RateParams{});
  return out;
}

PopulationVector initial_state(const RateParams& rates, double init_laser_us) {
  if (!(init_laser_us > 0.0)) {
    throw ParameterError(fmt::format("initializing laser must be > 0 us, got {}", init_laser_us));
  }
  return propagate(PopulationVector::fully_mixed(), init_laser_us, rates);
}

}  // namespace spintrap
