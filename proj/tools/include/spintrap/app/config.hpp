#pragma once

// Run configuration for the spintrap tool. Documents are JSON objects; every
// field is optional and unknown keys are rejected. See README.md for the
// full key list.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "spintrap/hamiltonian.hpp"
#include "spintrap/optimizer.hpp"
#include "spintrap/pulse_sequence.hpp"
#include "spintrap/spin_model.hpp"
#include "spintrap/tomography.hpp"

namespace spintrap::app {

struct OptimizerSettings {
  double t_max = kDefaultSearchMaxUs;
  Objective objective = Objective::P00;
  int n_cycles = 3;
  Strategy strategy = Strategy::Interleaved;
  /// Cycle-1 laser durations (us). Defaults to the experimentally chosen 500/460 ns.
  std::optional<DurationOverrides> cycle1_overrides = DurationOverrides{0.5, 0.46};
};

struct Config {
  RateParams rates;
  HamiltonianParams hamiltonian;
  FidParams fid;
  OptimizerSettings optimizer;
  double init_laser_us = kDefaultInitLaserUs;
  std::filesystem::path output_dir = ".";
};

/// Parses a configuration document. Empty (or whitespace-only) text yields
/// the defaults. Throws ConfigError naming the offending key.
Config parse_config(std::string_view document);

Config load_config(const std::filesystem::path& path);

}  // namespace spintrap::app
