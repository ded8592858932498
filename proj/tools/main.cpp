// spintrap: simulate and optimize the population-trapping initialization of
// the NV electron-nuclear spin register.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spintrap/app/commands.hpp"
#include "spintrap/app/config.hpp"
#include "spintrap/error.hpp"

namespace fs = std::filesystem;
using namespace spintrap;

namespace {

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

SegmentLabel parse_segment(const std::string& text) {
  if (text == "seg1") return SegmentLabel::Seg1;
  if (text == "seg2") return SegmentLabel::Seg2;
  throw ParameterError(fmt::format("unknown segment '{}' (expected seg1 or seg2)", text));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Population-trapping initialization simulator for a six-level NV spin register"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long seed = 0;
  cli.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cli.add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
  cli.add_option("--seed", seed, "Reserved; the model is deterministic");

  auto* transitions = cli.add_subcommand("transitions", "Transition frequencies vs measured references");

  auto* sweep = cli.add_subcommand("sweep", "Laser-duration sweep of seg1 or seg2");
  std::string segment = "seg1";
  double sweep_t_max = 4.0;
  int steps = 201;
  int workers = 1;
  sweep->add_option("--segment", segment, "seg1 or seg2")->capture_default_str();
  sweep->add_option("--t-max", sweep_t_max, "Longest laser duration (us)")->capture_default_str();
  sweep->add_option("--steps", steps, "Number of sweep points")->capture_default_str();
  sweep->add_option("--workers", workers, "Worker threads")->capture_default_str();

  auto* spectrum = cli.add_subcommand("spectrum", "Synthesize FID and spectrum, then recover the line amplitudes");
  std::string state_text;
  spectrum->add_option("--state", state_text, "Populations p0,...,p5 (default: initialized state)");

  auto* optimize = cli.add_subcommand("optimize", "Optimize laser durations over several cycles");
  std::string strategy;
  std::optional<int> cycles;
  optimize->add_option("--strategy", strategy, "interleaved or blocked (overrides config)");
  optimize->add_option("--cycles", cycles, "Number of cycles (overrides config)");

  auto* simulate = cli.add_subcommand("simulate", "Run a pulse sequence document");
  std::string sequence_path;
  simulate->add_option("--sequence", sequence_path, "Sequence JSON document")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "spintrap: error: " << e.what() << '\n';
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    app::Config config = config_path.empty() ? app::Config{} : app::load_config(config_path);
    const fs::path dir = out_dir.empty() ? config.output_dir : fs::path(out_dir);

    if (*transitions) {
      const auto rows = app::cmd_transitions(config);
      auto out = open_output(dir, "transitions.csv");
      app::emit_transitions_csv(out, rows);
      app::emit_transitions_csv(std::cout, rows);
    } else if (*sweep) {
      const SegmentLabel label = parse_segment(segment);
      const auto rows = app::cmd_sweep(label, sweep_t_max, steps, config, workers);
      auto out = open_output(dir, fmt::format("sweep_{}.csv", segment));
      app::emit_sweep_csv(out, rows);
      std::cout << fmt::format("wrote {} rows to {}\n", rows.size(), (dir / fmt::format("sweep_{}.csv", segment)).string());
    } else if (*spectrum) {
      const PopulationVector state = state_text.empty() ? initial_state(config.rates, config.init_laser_us)
                                                        : app::parse_population_list(state_text);
      const auto result = app::cmd_spectrum(state, config);
      auto fid_out = open_output(dir, "fid.csv");
      app::emit_fid_csv(fid_out, result.fid);
      auto spec_out = open_output(dir, "spectrum.csv");
      app::emit_spectrum_csv(spec_out, result.spectrum);
      const auto summary = app::spectrum_summary(result, config.fid);
      open_output(dir, "spectrum.json") << summary.dump(2) << '\n';
      std::cout << summary.dump(2) << '\n';
    } else if (*optimize) {
      if (!strategy.empty()) config.optimizer.strategy = parse_strategy(strategy);
      if (cycles) config.optimizer.n_cycles = *cycles;
      const Schedule schedule = app::cmd_optimize(config);
      open_output(dir, "schedule.json") << app::schedule_to_json(schedule).dump(2) << '\n';
      auto csv = open_output(dir, "schedule.csv");
      app::emit_schedule_csv(csv, schedule);
      app::emit_schedule_csv(std::cout, schedule);
    } else if (*simulate) {
      const auto sequence = app::parse_sequence(read_file(sequence_path));
      const auto doc = app::simulation_to_json(app::cmd_simulate(sequence, config));
      open_output(dir, "simulation.json") << doc.dump(2) << '\n';
      std::cout << doc.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << "spintrap: error: " << message << '\n';
    return 1;
  }
  return 0;
}
