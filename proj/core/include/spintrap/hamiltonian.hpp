#pragma once

// Static spin Hamiltonian of the NV electron spin coupled to the 14N nucleus:
//   H = D Sz^2 - gamma_e B Sz + Q Iz^2 - gamma_n B Iz + A Sz Iz
// evaluated on the diagonal (m_s, m_I) basis. Frequencies in MHz.

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "spintrap/spin_model.hpp"

namespace spintrap {

struct HamiltonianParams {
  double d_zfs = 2870.0;       // MHz
  double gamma_e = -28.0;      // MHz/mT
  double gamma_n = -3.1e-3;    // MHz/mT
  double quadrupole = 4.5;     // MHz
  double hyperfine = -2.16;    // MHz
  double b_field = 6.1;        // mT

  void validate() const;
};

enum class TransitionKind { Mw, Rf };

std::string_view to_string(TransitionKind kind);

/// Measured transition used by the initialization sequence.
struct TransitionRef {
  std::pair<SpinLevel, SpinLevel> pair;
  double reference_freq;  // MHz
  double rabi_freq;       // MHz, metadata only
  TransitionKind kind;
};

/// The four measured MW/RF transitions addressed by seg1 and seg2.
const std::array<TransitionRef, 4>& reference_transitions();

double energy(const SpinLevel& level, const HamiltonianParams& params);

/// |E(a) - E(b)|. Throws DomainError when a == b.
double transition_frequency(const SpinLevel& a, const SpinLevel& b, const HamiltonianParams& params);

struct TransitionRow {
  TransitionRef ref;
  double computed;   // MHz
  double deviation;  // computed - reference, MHz
};

std::vector<TransitionRow> transition_table(const HamiltonianParams& params);

}  // namespace spintrap
