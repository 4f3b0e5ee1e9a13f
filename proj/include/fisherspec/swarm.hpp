#pragma once

// Constriction-coefficient particle swarm (maximization).
//
//   v' = chi [ v + c_g r_g (x_g - x) + c_l r_l (x_l - x) ]
//   x' = project(x + v')
//
// r_g, r_l ~ U[0, 1], drawn once per particle per step, or once per
// coordinate when per_dimension_rng is set. The swarm is synchronous: every
// particle of an iteration sees the global best of the previous iteration,
// so objective calls within an iteration are independent and may run in
// parallel. Each particle/iteration pair gets its own RNG stream derived from
// the master seed, which keeps results independent of thread scheduling.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"

namespace fisherspec {

struct SwarmParams {
  double constriction = 0.729;
  double c_global = 2.05;
  double c_local = 2.05;
  int n_particles = 10;
  int n_iterations = 100;
  std::uint64_t seed = 0;
  bool per_dimension_rng = false;
  int threads = 1;

  void validate() const {
    if (!(constriction > 0.0) || !(c_global >= 0.0) || !(c_local >= 0.0)) {
      throw std::invalid_argument("swarm coefficients must be positive");
    }
    if (n_particles < 1 || n_iterations < 0) throw std::invalid_argument("swarm needs >= 1 particle and >= 0 iterations");
  }
};

using SwarmRng = std::mt19937_64;

/// RNG stream for one particle at one iteration (iteration 0 is the
/// initialization).
inline SwarmRng swarm_stream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t particle) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration), static_cast<std::uint32_t>(particle), 0x5eedu};
  return SwarmRng(seq);
}

/// One velocity/position update of a single particle, in place. Projection
/// is left to the caller.
inline void pso_step(std::span<double> position, std::span<double> velocity, std::span<const double> local_best,
                     std::span<const double> global_best, const SwarmParams& params, SwarmRng& rng) {
  const std::size_t dim = position.size();
  if (velocity.size() != dim || local_best.size() != dim || global_best.size() != dim) {
    throw std::invalid_argument("pso_step: dimension mismatch");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r_g = 0.0;
  double r_l = 0.0;
  if (!params.per_dimension_rng) {
    r_g = unit(rng);
    r_l = unit(rng);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (params.per_dimension_rng) {
      r_g = unit(rng);
      r_l = unit(rng);
    }
    velocity[i] = params.constriction * (velocity[i] + params.c_global * r_g * (global_best[i] - position[i]) +
                                         params.c_local * r_l * (local_best[i] - position[i]));
    position[i] += velocity[i];
  }
}

struct SwarmResult {
  std::vector<double> best_position;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;  ///< global best after init, then after each iteration
  long evaluations = 0;
};

/// Maximizes `objective` over R^dim.
///
/// `init(rng, position)` fills a starting position; `project(position)`
/// maps an updated position back onto the feasible set (and may be a no-op).
/// Velocities start at zero. `objective` must be safe to call concurrently
/// when params.threads > 1.
template <class Objective, class Init, class Project>
SwarmResult swarm_maximize(Objective&& objective, std::size_t dim, const SwarmParams& params, Init&& init, Project&& project) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.n_particles);

  std::vector<std::vector<double>> x(n, std::vector<double>(dim));
  std::vector<std::vector<double>> v(n, std::vector<double>(dim, 0.0));
  std::vector<double> value(n);

  for (std::size_t p = 0; p < n; ++p) {
    auto rng = swarm_stream(params.seed, 0, p);
    init(rng, std::span<double>(x[p]));
    project(std::span<double>(x[p]));
  }
  parallel_for(n, params.threads, [&](std::size_t p) { value[p] = objective(std::span<const double>(x[p])); });

  std::vector<std::vector<double>> local_best = x;
  std::vector<double> local_value = value;

  SwarmResult result;
  result.evaluations = static_cast<long>(n);
  auto update_global = [&] {
    for (std::size_t p = 0; p < n; ++p) {
      if (local_value[p] > result.best_value) {
        result.best_value = local_value[p];
        result.best_position = local_best[p];
      }
    }
    result.trace.push_back(result.best_value);
  };
  update_global();

  for (int it = 1; it <= params.n_iterations; ++it) {
    const std::vector<double> global_best = result.best_position;
    for (std::size_t p = 0; p < n; ++p) {
      auto rng = swarm_stream(params.seed, static_cast<std::uint64_t>(it), p);
      pso_step(x[p], v[p], local_best[p], global_best, params, rng);
      project(std::span<double>(x[p]));
    }
    parallel_for(n, params.threads, [&](std::size_t p) { value[p] = objective(std::span<const double>(x[p])); });
    result.evaluations += static_cast<long>(n);
    for (std::size_t p = 0; p < n; ++p) {
      if (value[p] > local_value[p]) {
        local_value[p] = value[p];
        local_best[p] = x[p];
      }
    }
    update_global();
  }
  return result;
}

}  // namespace fisherspec
