#pragma once

// Search for the probe state with the largest peak Fisher information.
//
// Coordinates are the real coefficients psi_0..psi_N (or interleaved real and
// imaginary parts with complex_coeffs) and every candidate is projected onto
// the unit sphere, so each evaluated state is normalized.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "fisher.hpp"
#include "interferometer.hpp"
#include "medium.hpp"
#include "probe_state.hpp"
#include "swarm.hpp"

namespace fisherspec {

struct PsoConfig {
  SwarmParams swarm;
  int n_total = 2;
  DetuningGrid objective_grid;
  int refine_points = kRefinePoints;
  bool complex_coeffs = false;

  /// Defaults with the standard +-100 gamma_s, 2001-point objective grid.
  static PsoConfig defaults(const Medium& medium, int n_total, std::uint64_t seed = 0) {
    PsoConfig c;
    c.n_total = n_total;
    c.swarm.seed = seed;
    c.objective_grid = DetuningGrid::around_resonance(medium);
    return c;
  }

  void validate() const {
    swarm.validate();
    if (n_total < 0 || n_total > kMaxPhotons) throw std::invalid_argument("photon number out of range");
    objective_grid.validate();
  }

  [[nodiscard]] std::size_t dimension() const {
    const auto n = static_cast<std::size_t>(n_total) + 1;
    return complex_coeffs ? 2 * n : n;
  }
};

struct PsoResult {
  ProbeState best_state = ProbeState::fock(0, 0);
  double best_objective = 0.0;  ///< peak F [s^2]
  double best_peak_delta = 0.0; ///< rad/s
  std::vector<double> objective_trace;
  long evaluations = 0;
  std::uint64_t seed = 0;
};

/// Coordinates -> state. The coordinates must already lie on the unit sphere.
inline ProbeState state_from_coordinates(std::span<const double> x, bool complex_coeffs) {
  std::vector<Complex> c;
  if (complex_coeffs) {
    if (x.size() % 2 != 0) throw std::invalid_argument("complex coordinates need an even dimension");
    for (std::size_t i = 0; i < x.size(); i += 2) c.emplace_back(x[i], x[i + 1]);
  } else {
    c.assign(x.begin(), x.end());
  }
  return ProbeState(std::move(c));
}

/// Rescales onto the unit sphere; a zero or non-finite vector is replaced by
/// the first basis vector.
inline void project_to_sphere(std::span<double> x) {
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  const double n = std::sqrt(n2);
  if (!(n > 0.0) || !std::isfinite(n)) {
    std::fill(x.begin(), x.end(), 0.0);
    if (!x.empty()) x[0] = 1.0;
    return;
  }
  for (double& v : x) v /= n;
}

/// Uniform on the sphere: normalized isotropic Gaussian.
inline void random_on_sphere(SwarmRng& rng, std::span<double> x) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : x) v = gauss(rng);
  project_to_sphere(x);
}

inline PsoResult optimize_state(const Medium& medium, const PsoConfig& config) {
  medium.validate();
  config.validate();

  PsoResult result;
  result.seed = config.swarm.seed;
  if (config.n_total == 0) {
    result.best_state = ProbeState::fock(0, 0);
    result.objective_trace = {0.0};
    return result;
  }

  const DetectionModel model(config.n_total);
  auto objective = [&](std::span<const double> x) {
    const StateDetection detection(state_from_coordinates(x, config.complex_coeffs), model);
    return peak_fisher(detection, medium, config.objective_grid, config.refine_points).value;
  };
  const SwarmResult swarm =
      swarm_maximize(objective, config.dimension(), config.swarm, random_on_sphere, project_to_sphere);

  result.best_state = state_from_coordinates(swarm.best_position, config.complex_coeffs);
  const FisherPeak peak = peak_fisher(StateDetection(result.best_state, model), medium, config.objective_grid, config.refine_points);
  result.best_objective = peak.value;
  result.best_peak_delta = peak.delta;
  result.objective_trace = swarm.trace;
  result.evaluations = swarm.evaluations;
  return result;
}

/// Runs one optimization per seed; returns all results in seed order.
inline std::vector<PsoResult> optimize_state_seeds(const Medium& medium, PsoConfig config, std::span<const std::uint64_t> seeds) {
  std::vector<PsoResult> out;
  out.reserve(seeds.size());
  for (auto seed : seeds) {
    config.swarm.seed = seed;
    out.push_back(optimize_state(medium, config));
  }
  return out;
}

/// Index of the result with the largest objective (first wins on ties).
inline std::size_t best_result(std::span<const PsoResult> results) {
  if (results.empty()) throw std::invalid_argument("no optimization results");
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].best_objective > results[best].best_objective) best = i;
  }
  return best;
}

}  // namespace fisherspec
