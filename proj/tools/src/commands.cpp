#include "spintrap/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "spintrap/error.hpp"

namespace spintrap::app {

using nlohmann::json;

namespace {

std::string pair_label(const LevelPair& pair) {
  // Semicolons keep the field free of CSV separators.
  return fmt::format("({};{})<->({};{})", pair.first.ms(), pair.first.mi(), pair.second.ms(), pair.second.mi());
}

SpinLevel level_from_json(const json& node) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number_integer() || !node[1].is_number_integer()) {
    throw ConfigError("pulse pair levels must be [m_s, m_I] integer pairs");
  }
  return {node[0].get<int>(), node[1].get<int>()};
}

json level_to_json(const SpinLevel& level) { return json::array({level.ms(), level.mi()}); }

Pulse pulse_from_json(const json& node, std::size_t index) {
  const std::string where = fmt::format("pulses[{}]", index);
  if (!node.is_object() || !node.contains("kind") || !node["kind"].is_string()) {
    throw ConfigError(fmt::format("{}: expected an object with a string 'kind'", where));
  }
  const auto kind = node["kind"].get<std::string>();
  auto reject_extra = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : node.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ConfigError(fmt::format("{}.{}: unknown key", where, key));
      }
    }
  };
  if (kind == "laser") {
    reject_extra({"kind", "duration_us"});
    if (!node.contains("duration_us") || !node["duration_us"].is_number()) {
      throw ConfigError(fmt::format("{}.duration_us: expected a number", where));
    }
    return Pulse::laser(node["duration_us"].get<double>());
  }
  if (kind == "mw_pi" || kind == "rf_pi") {
    reject_extra({"kind", "pair", "fidelity"});
    if (!node.contains("pair") || !node["pair"].is_array() || node["pair"].size() != 2) {
      throw ConfigError(fmt::format("{}.pair: expected [[m_s, m_I], [m_s, m_I]]", where));
    }
    const SpinLevel a = level_from_json(node["pair"][0]);
    const SpinLevel b = level_from_json(node["pair"][1]);
    double fidelity = 1.0;
    if (node.contains("fidelity")) {
      if (!node["fidelity"].is_number()) throw ConfigError(fmt::format("{}.fidelity: expected a number", where));
      fidelity = node["fidelity"].get<double>();
    }
    return kind == "mw_pi" ? Pulse::mw_pi(a, b, fidelity) : Pulse::rf_pi(a, b, fidelity);
  }
  throw ConfigError(fmt::format("{}: unknown pulse kind '{}'", where, kind));
}

json pulse_to_json(const Pulse& pulse) {
  const auto& v = pulse.variant();
  if (const auto* l = std::get_if<Laser>(&v)) return {{"kind", "laser"}, {"duration_us", l->duration}};
  const bool mw = std::holds_alternative<MwPi>(v);
  const auto& pair = mw ? std::get<MwPi>(v).pair : std::get<RfPi>(v).pair;
  const double fidelity = mw ? std::get<MwPi>(v).fidelity : std::get<RfPi>(v).fidelity;
  return {{"kind", mw ? "mw_pi" : "rf_pi"},
          {"pair", json::array({level_to_json(pair.first), level_to_json(pair.second)})},
          {"fidelity", fidelity}};
}

SegmentLabel parse_label(const std::string& text) {
  if (text == "seg1") return SegmentLabel::Seg1;
  if (text == "seg2") return SegmentLabel::Seg2;
  if (text == "custom") return SegmentLabel::Custom;
  throw ConfigError(fmt::format("label: unknown segment label '{}'", text));
}

json amplitudes_to_json(const SpectralAmplitudes& a) {
  return {{"a_minus1", a.a_minus1}, {"a_plus1", a.a_plus1}, {"a_zero", a.a_zero}};
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.9g}", v); }

json to_json(const PopulationVector& p) {
  json out = json::array();
  for (double v : p.to_array()) out.push_back(v);
  return out;
}

PopulationVector population_from_json(const json& node, std::string_view key) {
  if (!node.is_array() || node.size() != kNumLevels) {
    throw ConfigError(fmt::format("{}: expected an array of {} populations", key, kNumLevels));
  }
  Vector6 v;
  for (std::size_t i = 0; i < kNumLevels; ++i) {
    if (!node[i].is_number()) throw ConfigError(fmt::format("{}[{}]: expected a number", key, i));
    v[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  return PopulationVector(v);
}

PopulationVector parse_population_list(std::string_view text) {
  Vector6 v;
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string field(text.substr(start, end - start));
    if (count >= kNumLevels) throw ConfigError(fmt::format("state: expected {} populations", kNumLevels));
    try {
      std::size_t used = 0;
      v[static_cast<Eigen::Index>(count)] = std::stod(field, &used);
      if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("state: '{}' is not a number", field));
    }
    ++count;
    start = end + 1;
  }
  if (count != kNumLevels) throw ConfigError(fmt::format("state: expected {} populations, got {}", kNumLevels, count));
  return PopulationVector(v);
}

// transitions ---------------------------------------------------------------

std::vector<TransitionRow> cmd_transitions(const Config& config) { return transition_table(config.hamiltonian); }

void emit_transitions_csv(std::ostream& out, const std::vector<TransitionRow>& rows) {
  out << kTransitionsHeader << '\n';
  for (const auto& r : rows) {
    out << pair_label(r.ref.pair) << ',' << to_string(r.ref.kind) << ',' << format_number(r.computed) << ','
        << format_number(r.ref.reference_freq) << ',' << format_number(r.deviation) << '\n';
  }
}

// sweep ---------------------------------------------------------------------

PopulationVector reference_seg2_start() { return {0.07, 0.33, 0.55, 0.0, 0.0, 0.05}; }

std::vector<SweepRow> cmd_sweep(SegmentLabel segment, double t_max, int steps, const Config& config, int workers) {
  if (steps < 2) throw ParameterError(fmt::format("sweep needs at least 2 steps, got {}", steps));
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ParameterError(fmt::format("sweep t_max must be finite and > 0 us, got {}", t_max));
  }
  if (workers < 1) throw ParameterError(fmt::format("workers must be >= 1, got {}", workers));
  if (segment == SegmentLabel::Custom) throw ParameterError("sweep supports seg1 and seg2 only");

  const PopulationVector start =
      segment == SegmentLabel::Seg1 ? initial_state(config.rates, config.init_laser_us) : reference_seg2_start();
  const PopulationVector swapped = apply_swaps(start, segment);

  const auto n = static_cast<std::size_t>(steps);
  std::vector<std::optional<SweepRow>> slots(n);
  auto fill = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      const double t = i + 1 == n ? t_max : t_max * static_cast<double>(i) / static_cast<double>(n - 1);
      const PopulationVector p = propagate(swapped, t, config.rates);
      slots[i] = SweepRow{t, p, amplitudes(p), p[0] + p[1] + p[2]};
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (threads == 1) {
    fill(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(fill, w, threads);
  }
  std::vector<SweepRow> rows;
  rows.reserve(n);
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rows;
}

void emit_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.duration);
    for (double v : r.state.to_array()) out << ',' << format_number(v);
    out << ',' << format_number(r.amps.a_minus1) << ',' << format_number(r.amps.a_plus1) << ','
        << format_number(r.amps.a_zero) << ',' << format_number(r.total_ms0) << '\n';
  }
}

// spectrum ------------------------------------------------------------------

SpectrumResult cmd_spectrum(const PopulationVector& state, const Config& config) {
  const FidParams& fp = config.fid;
  const SpectralAmplitudes direct = amplitudes(state);
  Fid fid = synthesize_fid(direct, fp);
  Spectrum spec = spectrum(fid, fp);
  const SpectralAmplitudes extracted = extract_amplitudes(spec, fp, calibration_spectrum(fp));
  return {state, direct, extracted, std::move(fid), std::move(spec)};
}

void emit_fid_csv(std::ostream& out, const Fid& fid) {
  out << "tau_us,re,im\n";
  for (std::size_t k = 0; k < fid.samples.size(); ++k) {
    out << format_number(fid.tau[k]) << ',' << format_number(fid.samples[k].real()) << ','
        << format_number(fid.samples[k].imag()) << '\n';
  }
}

void emit_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "freq_mhz,magnitude\n";
  for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
    out << format_number(spectrum.freq[k]) << ',' << format_number(std::abs(spectrum.values[k])) << '\n';
  }
}

json spectrum_summary(const SpectrumResult& result, const FidParams& fp) {
  return {
      {"state", to_json(result.state)},
      {"direct", amplitudes_to_json(result.direct)},
      {"extracted", amplitudes_to_json(result.extracted)},
      {"metadata",
       {{"detuning_mhz", fp.detuning},
        {"hyperfine_split_mhz", fp.hyperfine_split},
        {"t2star_us", fp.t2star},
        {"dt_us", fp.dt},
        {"n_samples", fp.n_samples},
        {"padded_size", fp.padded_size},
        {"first_point_scale", fp.first_point_scale},
        {"normalization", Spectrum::kNormalization},
        {"extraction", "absorption-mode parabolic peak / equal-amplitude calibration x 1/3"}}},
  };
}

// optimize ------------------------------------------------------------------

Schedule cmd_optimize(const Config& config) {
  const auto& o = config.optimizer;
  return optimize_schedule(initial_state(config.rates, config.init_laser_us), config.rates, o.objective, o.n_cycles,
                           o.strategy, o.cycle1_overrides, o.t_max);
}

json schedule_to_json(const Schedule& schedule) {
  json cycles = json::array();
  for (const auto& c : schedule.cycles) {
    cycles.push_back({{"cycle", c.cycle},
                      {"t1_ns", c.t1 * 1e3},
                      {"purity_after_seg1", c.purity_after_seg1},
                      {"t2_ns", c.t2 * 1e3},
                      {"purity_after_seg2", c.purity_after_seg2},
                      {"end_state", to_json(c.end_state)}});
  }
  return {{"strategy", to_string(schedule.strategy)},
          {"objective", to_string(schedule.objective)},
          {"cycles", cycles},
          {"final_purity", schedule.final_purity},
          {"final_state", to_json(schedule.final_state)}};
}

void emit_schedule_csv(std::ostream& out, const Schedule& schedule) {
  out << kScheduleHeader << '\n';
  for (const auto& c : schedule.cycles) {
    out << c.cycle << ',' << format_number(c.t1 * 1e3) << ',' << format_number(c.purity_after_seg1) << ','
        << format_number(c.t2 * 1e3) << ',' << format_number(c.purity_after_seg2) << '\n';
  }
}

// simulate ------------------------------------------------------------------

SequenceDocument parse_sequence(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("sequence: malformed document at byte {}", e.byte));
  }
  if (!root.is_object()) throw ConfigError("sequence: expected an object");
  for (const auto& [key, value] : root.items()) {
    if (key != "initial_state" && key != "label" && key != "pulses") {
      throw ConfigError(fmt::format("{}: unknown key", key));
    }
  }
  SequenceDocument doc;
  if (root.contains("initial_state")) doc.initial_state = population_from_json(root["initial_state"], "initial_state");
  if (root.contains("label")) {
    if (!root["label"].is_string()) throw ConfigError("label: expected a string");
    doc.segment.label = parse_label(root["label"].get<std::string>());
  }
  if (!root.contains("pulses") || !root["pulses"].is_array()) throw ConfigError("pulses: expected an array");
  const json& pulses = root["pulses"];
  for (std::size_t i = 0; i < pulses.size(); ++i) doc.segment.pulses.push_back(pulse_from_json(pulses[i], i));
  return doc;
}

json segment_to_json(const Segment& segment) {
  json pulses = json::array();
  for (const auto& p : segment.pulses) pulses.push_back(pulse_to_json(p));
  return {{"label", to_string(segment.label)}, {"pulses", pulses}};
}

SimulationResult cmd_simulate(const SequenceDocument& sequence, const Config& config) {
  const PopulationVector start =
      sequence.initial_state ? *sequence.initial_state : initial_state(config.rates, config.init_laser_us);
  return {start, run_segment(start, sequence.segment, config.rates)};
}

json simulation_to_json(const SimulationResult& result) {
  json trace = json::array();
  for (const auto& t : result.run.trace) {
    trace.push_back({{"index", t.index}, {"pulse", t.description}, {"state", to_json(t.state)}});
  }
  return {{"initial_state", to_json(result.initial_state)},
          {"trace", trace},
          {"final_state", to_json(result.run.final_state)}};
}

}  // namespace spintrap::app
