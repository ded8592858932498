#include "spintrap/hamiltonian.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spintrap/error.hpp"

namespace spintrap {

void HamiltonianParams::validate() const {
  for (double v : {d_zfs, gamma_e, gamma_n, quadrupole, hyperfine, b_field}) {
    if (!std::isfinite(v)) throw ParameterError("Hamiltonian parameters must be finite");
  }
  if (!(d_zfs > 0.0)) {
    throw ParameterError(fmt::format("zero-field splitting must be > 0 MHz, got {}", d_zfs));
  }
  if (!(b_field >= 0.0)) {
    throw ParameterError(fmt::format("magnetic field must be >= 0 mT, got {}", b_field));
  }
}

std::string_view to_string(TransitionKind kind) { return kind == TransitionKind::Mw ? "MW" : "RF"; }

const std::array<TransitionRef, 4>& reference_transitions() {
  static const std::array<TransitionRef, 4> table{{
      {{SpinLevel(0, -1), SpinLevel(-1, -1)}, 2696.0, 8.3, TransitionKind::Mw},
      {{SpinLevel(0, +1), SpinLevel(-1, +1)}, 2694.0, 8.3, TransitionKind::Mw},
      {{SpinLevel(-1, -1), SpinLevel(-1, 0)}, 2.801, 3.87e-3, TransitionKind::Rf},
      {{SpinLevel(-1, +1), SpinLevel(-1, 0)}, 7.095, 3.55e-3, TransitionKind::Rf},
  }};
  return table;
}

double energy(const SpinLevel& level, const HamiltonianParams& p) {
  const double ms = level.ms();
  const double mi = level.mi();
  return p.d_zfs * ms * ms - p.gamma_e * p.b_field * ms + p.quadrupole * mi * mi -
         p.gamma_n * p.b_field * mi + p.hyperfine * ms * mi;
}

double transition_frequency(const SpinLevel& a, const SpinLevel& b, const HamiltonianParams& params) {
  if (a == b) {
    throw DomainError(fmt::format("transition needs two distinct levels, got {} twice", a.to_string()));
  }
  return std::abs(energy(a, params) - energy(b, params));
}

std::vector<TransitionRow> transition_table(const HamiltonianParams& params) {
  params.validate();
  std::vector<TransitionRow> rows;
  rows.reserve(reference_transitions().size());
  for (const auto& ref : reference_transitions()) {
    const double f = transition_frequency(ref.pair.first, ref.pair.second, params);
    rows.push_back({ref, f, f - ref.reference_freq});
  }
  return rows;
}

}  // namespace spintrap
