#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "interferometer.hpp"
#include "medium.hpp"
#include "probe_state.hpp"

namespace fisherspec {

/// Outcomes with P below this threshold are left out of the Fisher sum.
inline constexpr double kFisherSkipBelow = 1e-14;

/// F = sum (dP/d delta)^2 / P over outcomes with P >= kFisherSkipBelow.
inline double fisher_information(std::span<const double> probs, std::span<const double> dprobs) {
  if (probs.size() != dprobs.size()) throw std::invalid_argument("fisher_information: size mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] >= kFisherSkipBelow) f += dprobs[i] * dprobs[i] / probs[i];
  }
  return f;
}

inline double fisher_information(const OutcomeDistribution& dist) {
  double f = 0.0;
  for (const auto& o : dist.outcomes()) {
    if (o.prob >= kFisherSkipBelow) f += o.dprob * o.dprob / o.prob;
  }
  return f;
}

/// Lower bound 1/F on the variance of an unbiased detuning estimator.
/// Throws std::domain_error when F <= 0 (the variance is unbounded).
inline double cramer_rao_bound(double fisher) {
  if (!(fisher > 0.0)) throw std::domain_error("unbounded: Fisher information must be positive for a finite variance bound");
  return 1.0 / fisher;
}

/// Uniform detuning grid [min, max] with `points` samples, in rad/s.
struct DetuningGrid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  void validate() const {
    if (!std::isfinite(min) || !std::isfinite(max)) throw std::invalid_argument("grid range must be finite");
    if (points < 1) throw std::invalid_argument("grid needs at least one point");
    if (points > 1 && !(max > min)) throw std::invalid_argument("grid max must exceed min");
  }

  [[nodiscard]] double step() const { return points > 1 ? (max - min) / (points - 1) : 0.0; }

  [[nodiscard]] std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(points));
    if (points == 1) {
      v[0] = min;
      return v;
    }
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (points - 1);
    v.back() = max;
    return v;
  }

  /// Default scan: 2001 points over [-100, 100] gamma_s.
  static DetuningGrid around_resonance(const Medium& medium, double half_width = 100.0, int points = 2001) {
    return {-half_width * medium.gamma_s, half_width * medium.gamma_s, points};
  }
};

struct FisherCurve {
  std::vector<double> deltas;  ///< rad/s
  std::vector<double> values;  ///< s^2
  double peak_value = 0.0;
  double peak_delta = 0.0;

  /// Recomputes the peak; ties go to the smallest |delta|.
  void update_peak() {
    if (values.empty()) throw std::invalid_argument("empty Fisher curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] > values[best] || (values[i] == values[best] && std::abs(deltas[i]) < std::abs(deltas[best]))) best = i;
    }
    peak_value = values[best];
    peak_delta = deltas[best];
  }
};

namespace detail {

inline void require_increasing(std::span<const double> deltas) {
  if (deltas.empty()) throw std::invalid_argument("detuning grid is empty");
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] > deltas[i - 1])) throw std::invalid_argument("detuning grid must be strictly increasing");
  }
}

}  // namespace detail

/// F(delta) for a bound state over an explicit strictly increasing grid.
inline FisherCurve fisher_curve(const StateDetection& detection, const Medium& medium, std::span<const double> deltas) {
  detail::require_increasing(deltas);
  FisherCurve curve;
  curve.deltas.assign(deltas.begin(), deltas.end());
  curve.values.reserve(deltas.size());
  for (double delta : deltas) {
    curve.values.push_back(fisher_information(detection.evaluate(arm_response(medium, delta))));
  }
  curve.update_peak();
  return curve;
}

inline FisherCurve fisher_curve(const ProbeState& state, const Medium& medium, std::span<const double> deltas) {
  return fisher_curve(StateDetection(state), medium, deltas);
}

inline FisherCurve fisher_curve(const ProbeState& state, const Medium& medium, const DetuningGrid& grid) {
  const auto deltas = grid.values();
  return fisher_curve(state, medium, deltas);
}

/// Independent repetitions add their Fisher information.
inline FisherCurve copies_fisher(const FisherCurve& single_copy, int copies) {
  if (copies < 1) throw std::invalid_argument("copies must be >= 1");
  FisherCurve out = single_copy;
  for (auto& v : out.values) v *= copies;
  out.peak_value = single_copy.peak_value * copies;
  return out;
}

struct FisherPeak {
  double value = 0.0;  ///< s^2
  double delta = 0.0;  ///< rad/s
};

inline constexpr int kRefinePoints = 501;
inline constexpr int kRefineHalfWidthSteps = 5;

/// Two-stage peak search: the coarse grid, then `refine_points` uniform
/// samples over +-5 coarse steps around the coarse maximum (clipped to the
/// grid range). Returns the larger of the two maxima.
inline FisherPeak peak_fisher(const StateDetection& detection, const Medium& medium, const DetuningGrid& grid,
                              int refine_points = kRefinePoints) {
  const auto deltas = grid.values();
  const FisherCurve coarse = fisher_curve(detection, medium, deltas);
  FisherPeak peak{coarse.peak_value, coarse.peak_delta};
  if (refine_points < 2 || grid.points < 2) return peak;

  const double h = grid.step();
  const DetuningGrid window{std::max(grid.min, coarse.peak_delta - kRefineHalfWidthSteps * h),
                            std::min(grid.max, coarse.peak_delta + kRefineHalfWidthSteps * h), refine_points};
  const auto fine_deltas = window.values();
  const FisherCurve fine = fisher_curve(detection, medium, fine_deltas);
  if (fine.peak_value > peak.value) peak = {fine.peak_value, fine.peak_delta};
  return peak;
}

inline FisherPeak peak_fisher(const ProbeState& state, const Medium& medium, const DetuningGrid& grid,
                              int refine_points = kRefinePoints) {
  return peak_fisher(StateDetection(state), medium, grid, refine_points);
}

}  // namespace fisherspec
