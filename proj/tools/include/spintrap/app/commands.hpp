#pragma once

// Commands behind the spintrap tool. Each command computes its result as a
// value; the emit_* functions serialize it (CSV with a header row and 9
// significant digits, or JSON documents).

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spintrap/app/config.hpp"

namespace spintrap::app {

/// Decimal representation with 9 significant digits.
std::string format_number(double v);

// transitions ---------------------------------------------------------------

inline constexpr std::string_view kTransitionsHeader = "pair,kind,computed_mhz,reference_mhz,deviation_mhz";

std::vector<TransitionRow> cmd_transitions(const Config& config);
void emit_transitions_csv(std::ostream& out, const std::vector<TransitionRow>& rows);

// sweep ---------------------------------------------------------------------

inline constexpr std::string_view kSweepHeader =
    "duration_us,p0,p1,p2,p3,p4,p5,a_minus1,a_plus1,a_zero,total_ms0";

/// Post-seg1 state used as the seg2 sweep start.
PopulationVector reference_seg2_start();

struct SweepRow {
  double duration;
  PopulationVector state;
  SpectralAmplitudes amps;
  double total_ms0;
};

/// Laser-duration sweep of one segment over steps equally spaced points in
/// [0, t_max]. seg1 starts from the initialized state, seg2 from
/// reference_seg2_start(). Rows are computed by `workers` threads and
/// returned in duration order.
std::vector<SweepRow> cmd_sweep(SegmentLabel segment, double t_max, int steps, const Config& config,
                                int workers = 1);
void emit_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// spectrum ------------------------------------------------------------------

struct SpectrumResult {
  PopulationVector state;
  SpectralAmplitudes direct;
  SpectralAmplitudes extracted;
  Fid fid;
  Spectrum spectrum;
};

SpectrumResult cmd_spectrum(const PopulationVector& state, const Config& config);
void emit_fid_csv(std::ostream& out, const Fid& fid);
void emit_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
nlohmann::json spectrum_summary(const SpectrumResult& result, const FidParams& fp);

// optimize ------------------------------------------------------------------

inline constexpr std::string_view kScheduleHeader =
    "cycle,t1_ns,purity_after_seg1,t2_ns,purity_after_seg2";

Schedule cmd_optimize(const Config& config);
nlohmann::json schedule_to_json(const Schedule& schedule);
void emit_schedule_csv(std::ostream& out, const Schedule& schedule);

// simulate ------------------------------------------------------------------

struct SequenceDocument {
  std::optional<PopulationVector> initial_state;
  Segment segment;
};

/// Parses {"initial_state"?: [6 numbers], "label"?: "seg1"|"seg2"|"custom",
/// "pulses": [...]}. Throws ConfigError or DomainError with a diagnostic.
SequenceDocument parse_sequence(std::string_view document);
nlohmann::json segment_to_json(const Segment& segment);

struct SimulationResult {
  PopulationVector initial_state;
  SequenceRun run;
};

/// Runs the sequence from its initial_state, or from the initialized state
/// (config.init_laser_us) when none is given.
SimulationResult cmd_simulate(const SequenceDocument& sequence, const Config& config);
nlohmann::json simulation_to_json(const SimulationResult& result);

// shared --------------------------------------------------------------------

nlohmann::json to_json(const PopulationVector& p);
PopulationVector population_from_json(const nlohmann::json& node, std::string_view key);
/// Parses "p0,p1,p2,p3,p4,p5".
PopulationVector parse_population_list(std::string_view text);

}  // namespace spintrap::app
