#pragma once

// Reference probe states.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "probe_state.hpp"

namespace fisherspec {

/// (|n,0> + |0,n>)/sqrt2.
inline ProbeState noon_state(int n) {
  if (n < 1) throw std::invalid_argument("noon_state: n must be >= 1");
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1, 0.0);
  c.front() = c.back() = 1.0 / std::sqrt(2.0);
  return ProbeState(std::move(c));
}

/// |n,0>: every photon passes through the ensemble arm. With n = 1 this is
/// the single-photon probe whose copies form the standard-quantum-limit
/// baseline.
inline ProbeState all_in_ensemble_arm(int n) {
  if (n < 1) throw std::invalid_argument("all_in_ensemble_arm: n must be >= 1");
  return ProbeState::fock(n, 0);
}

inline ProbeState vacuum_state() { return ProbeState::fock(0, 0); }

}  // namespace fisherspec
