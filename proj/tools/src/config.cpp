#include "spintrap/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "spintrap/error.hpp"

namespace spintrap::app {

namespace {

using nlohmann::json;

// Reads one JSON object section, rejecting keys that were never asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  [[nodiscard]] bool has(const std::string& key) {
    known_.insert(key);
    return node_.contains(key);
  }

  [[nodiscard]] std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(fmt::format("{}: expected a number", key_path(key)));
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", key_path(key)));
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", key_path(key)));
    return v.get<std::string>();
  }

  const json& child(const std::string& key) {
    known_.insert(key);
    return node_.at(key);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : node_.items()) {
      if (!known_.contains(key)) throw ConfigError(fmt::format("{}: unknown key", key_path(key)));
    }
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& key, const std::string& what, double got) {
  if (!ok) throw ConfigError(fmt::format("{}: {} (got {})", key, what, got));
}

RateParams parse_rates(const json& node) {
  Section s(node, "rates");
  RateParams r;
  auto one_rate = [&](const std::string& rate_key, const std::string& inv_key, double fallback) {
    const bool has_rate = s.has(rate_key);
    const bool has_inv = s.has(inv_key);
    if (has_rate && has_inv) {
      throw ConfigError(fmt::format("{}: conflicts with {}; give a rate or a lifetime, not both",
                                    s.key_path(inv_key), s.key_path(rate_key)));
    }
    if (has_inv) {
      const double inv = s.number(inv_key, 0.0);
      require(inv > 0.0 && std::isfinite(inv), s.key_path(inv_key), "must be finite and > 0 us", inv);
      return 1.0 / inv;
    }
    return s.number(rate_key, fallback);
  };
  r.k_s = one_rate("k_s_per_us", "inv_k_s_us", r.k_s);
  r.k_i = one_rate("k_i_per_us", "inv_k_i_us", r.k_i);
  s.reject_unknown();
  require(std::isfinite(r.k_s) && r.k_s > 0.0, "rates.k_s_per_us", "must be finite and > 0 1/us", r.k_s);
  require(std::isfinite(r.k_i) && r.k_i >= 0.0, "rates.k_i_per_us", "must be finite and >= 0 1/us", r.k_i);
  return r;
}

HamiltonianParams parse_hamiltonian(const json& node) {
  Section s(node, "hamiltonian");
  HamiltonianParams h;
  h.d_zfs = s.number("d_zfs_mhz", h.d_zfs);
  h.gamma_e = s.number("gamma_e_mhz_per_mt", h.gamma_e);
  h.gamma_n = s.number("gamma_n_mhz_per_mt", h.gamma_n);
  h.quadrupole = s.number("quadrupole_mhz", h.quadrupole);
  h.hyperfine = s.number("hyperfine_mhz", h.hyperfine);
  h.b_field = s.number("b_field_mt", h.b_field);
  s.reject_unknown();
  require(h.d_zfs > 0.0, "hamiltonian.d_zfs_mhz", "must be > 0 MHz", h.d_zfs);
  require(h.b_field >= 0.0, "hamiltonian.b_field_mt", "must be >= 0 mT", h.b_field);
  return h;
}

FidParams parse_fid(const json& node) {
  Section s(node, "fid");
  FidParams f;
  f.detuning = s.number("detuning_mhz", f.detuning);
  f.hyperfine_split = s.number("hyperfine_split_mhz", f.hyperfine_split);
  f.t2star = s.number("t2star_us", f.t2star);
  f.dt = s.number("dt_us", f.dt);
  f.n_samples = s.integer("n_samples", f.n_samples);
  f.padded_size = s.integer("padded_size", f.padded_size);
  f.first_point_scale = s.number("first_point_scale", f.first_point_scale);
  s.reject_unknown();
  require(f.t2star > 0.0, "fid.t2star_us", "must be > 0 us", f.t2star);
  require(f.dt > 0.0, "fid.dt_us", "must be > 0 us", f.dt);
  require(f.n_samples >= 256, "fid.n_samples", "must be >= 256", f.n_samples);
  require(f.padded_size >= f.n_samples, "fid.padded_size", "must be >= fid.n_samples", f.padded_size);
  require(std::abs(f.detuning) + std::abs(f.hyperfine_split) < 1.0 / (2.0 * f.dt), "fid.detuning_mhz",
          "lines exceed the Nyquist frequency 1/(2 dt)", f.detuning);
  require(f.first_point_scale >= 0.0 && f.first_point_scale <= 1.0, "fid.first_point_scale", "must lie in [0, 1]",
          f.first_point_scale);
  return f;
}

OptimizerSettings parse_optimizer(const json& node) {
  Section s(node, "optimizer");
  OptimizerSettings o;
  o.t_max = s.number("t_max_us", o.t_max);
  try {
    o.objective = parse_objective(s.string("objective", std::string(to_string(o.objective))));
  } catch (const ParameterError& e) {
    throw ConfigError(fmt::format("optimizer.objective: {}", e.what()));
  }
  o.n_cycles = s.integer("n_cycles", o.n_cycles);
  try {
    o.strategy = parse_strategy(s.string("strategy", std::string(to_string(o.strategy))));
  } catch (const ParameterError& e) {
    throw ConfigError(fmt::format("optimizer.strategy: {}", e.what()));
  }
  if (s.has("cycle1_overrides_us")) {
    const json& v = s.child("cycle1_overrides_us");
    if (v.is_null()) {
      o.cycle1_overrides.reset();
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      const double t1 = v[0].get<double>();
      const double t2 = v[1].get<double>();
      require(t1 >= 0.0 && t2 >= 0.0, "optimizer.cycle1_overrides_us", "durations must be >= 0 us",
              std::min(t1, t2));
      o.cycle1_overrides = DurationOverrides{t1, t2};
    } else {
      throw ConfigError("optimizer.cycle1_overrides_us: expected null or [t1_us, t2_us]");
    }
  }
  s.reject_unknown();
  require(o.t_max > 0.0 && std::isfinite(o.t_max), "optimizer.t_max_us", "must be finite and > 0 us", o.t_max);
  require(o.n_cycles >= 1 && o.n_cycles <= kMaxCycles, "optimizer.n_cycles", "must lie in [1, 20]", o.n_cycles);
  return o;
}

}  // namespace

Config parse_config(std::string_view document) {
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config: malformed document at byte {}", e.byte));
  }
  Section s(root, "");
  Config c;
  if (s.has("rates")) c.rates = parse_rates(s.child("rates"));
  if (s.has("hamiltonian")) c.hamiltonian = parse_hamiltonian(s.child("hamiltonian"));
  if (s.has("fid")) c.fid = parse_fid(s.child("fid"));
  if (s.has("optimizer")) c.optimizer = parse_optimizer(s.child("optimizer"));
  c.init_laser_us = s.number("init_laser_us", c.init_laser_us);
  c.output_dir = s.string("output_dir", c.output_dir.string());
  s.reject_unknown();
  require(c.init_laser_us > 0.0 && std::isfinite(c.init_laser_us), "init_laser_us", "must be finite and > 0 us",
          c.init_laser_us);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace spintrap::app
