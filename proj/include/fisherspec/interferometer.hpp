#pragma once

// Photon-counting statistics at the two output detectors of a Mach-Zehnder
// interferometer whose first arm (mode a) contains a lossy, dispersive
// medium.
//
// Conventions shared with the Fock-space oracle (oracle.hpp):
//  * each photon in mode a survives the medium with amplitude sqrt(T) e^{i phi}
//    and is otherwise scattered into a single effective loss mode;
//  * the output splitter maps a^+ -> (c^+ + d^+)/sqrt2, b^+ -> (c^+ - d^+)/sqrt2,
//    with n1 counted on c and n2 on d.
//
// For an outcome (n1, n2) with M = n1 + n2 detected and l = N - M lost photons
//
//   P(n1, n2) = (1 - T)^l |A|^2,
//   A = sum_k psi_k w_k T^{(M-k)/2} e^{-i phi k},
//   w_k = 2^{-M/2} sqrt(C(N-k, l) C(M, k) / C(M, n1)) sum_u (-1)^{n2-u} C(M-k, u) C(k, n2-u).
//
// Expanding |A|^2 gives the familiar double sum over (k, k'); keeping the
// factored form costs O(N) per outcome instead of O(N^2). A global phase
// e^{i phi M} has been dropped from A.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"
#include "medium.hpp"
#include "probe_state.hpp"

namespace fisherspec {

/// One detection event (n1 photons at D_a, n2 at D_b) and its probability.
struct Outcome {
  int n1 = 0;
  int n2 = 0;
  double prob = 0.0;
  double dprob = 0.0;        ///< dP/d delta [s]
  double dprob_dlogt = 0.0;  ///< dP/d ln T
  double dprob_dphase = 0.0; ///< dP/d phi
};

/// Complete outcome distribution, including outcomes with lost photons.
class OutcomeDistribution {
 public:
  static constexpr double kNormTolerance = 1e-10;
  static constexpr double kRangeTolerance = 1e-12;
  static constexpr double kClampBelow = 1e-15;

  OutcomeDistribution() = default;
  explicit OutcomeDistribution(int n_total) : n_total_(n_total) {
    if (n_total < 0) throw std::invalid_argument("photon number must be non-negative");
    outcomes_.reserve(count(n_total));
    for (int n1 = 0; n1 <= n_total; ++n1) {
      for (int n2 = 0; n1 + n2 <= n_total; ++n2) outcomes_.push_back(Outcome{n1, n2});
    }
  }

  /// Number of outcomes with n1 + n2 <= N.
  static std::size_t count(int n_total) {
    const auto n = static_cast<std::size_t>(n_total);
    return (n + 1) * (n + 2) / 2;
  }

  [[nodiscard]] std::size_t index(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 + n2 > n_total_) throw std::out_of_range("outcome outside n1 + n2 <= N");
    // rows n1' < n1 hold N - n1' + 1 outcomes each
    const int before = n1 * (n_total_ + 1) - n1 * (n1 - 1) / 2;
    return static_cast<std::size_t>(before + n2);
  }

  [[nodiscard]] int n_total() const { return n_total_; }
  [[nodiscard]] double prob(int n1, int n2) const { return outcomes_[index(n1, n2)].prob; }
  [[nodiscard]] double dprob(int n1, int n2) const { return outcomes_[index(n1, n2)].dprob; }
  [[nodiscard]] const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::vector<Outcome>& outcomes() { return outcomes_; }

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (const auto& o : outcomes_) s += o.prob;
    return s;
  }

  [[nodiscard]] double total_derivative() const {
    double s = 0.0;
    for (const auto& o : outcomes_) s += o.dprob;
    return s;
  }

  /// Checks range and normalization, then clamps. Throws
  /// NumericInvariantError on violation. The derivative sums are checked in
  /// the dimensionless (ln T, phi) coordinates; sum dP/d delta then vanishes
  /// to the same relative accuracy.
  void check_and_clamp() {
    double sum = 0.0;
    double sum_dlogt = 0.0;
    double sum_dphase = 0.0;
    for (auto& o : outcomes_) {
      if (!(o.prob >= -kRangeTolerance && o.prob <= 1.0 + kRangeTolerance)) {
        fail("probability out of range", o.prob);
      }
      sum += o.prob;
      sum_dlogt += o.dprob_dlogt;
      sum_dphase += o.dprob_dphase;
    }
    if (!(std::abs(sum - 1.0) <= kNormTolerance)) fail("probabilities do not sum to one", sum);
    if (!(std::abs(sum_dlogt) <= kNormTolerance)) fail("dP/dlnT does not sum to zero", sum_dlogt);
    if (!(std::abs(sum_dphase) <= kNormTolerance)) fail("dP/dphi does not sum to zero", sum_dphase);
    for (auto& o : outcomes_) {
      o.prob = std::clamp(o.prob, 0.0, 1.0);
      if (o.prob < kClampBelow) o.prob = 0.0;
    }
  }

 private:
  [[noreturn]] static void fail(const char* what, double value) {
    std::ostringstream os;
    os.precision(17);
    os << "outcome distribution: " << what << " (" << value << ")";
    throw NumericInvariantError(os.str());
  }

  int n_total_ = 0;
  std::vector<Outcome> outcomes_;
};

/// State-independent part of the closed form for a fixed photon number:
/// the splitter/loss weights w_k of every outcome.
class DetectionModel {
 public:
  explicit DetectionModel(int n_total) : n_total_(n_total), layout_(check(n_total)) {
    weights_.assign(layout_.outcomes().size() * stride(), 0.0);
    for (std::size_t o = 0; o < layout_.outcomes().size(); ++o) {
      const auto& oc = layout_.outcomes()[o];
      const int m = oc.n1 + oc.n2;
      const int lost = n_total - m;
      for (int k = 0; k <= m; ++k) {
        double split = 0.0;
        for (int u = std::max(0, oc.n2 - k); u <= std::min(oc.n2, m - k); ++u) {
          const double sign = ((oc.n2 - u) % 2 == 0) ? 1.0 : -1.0;
          split += sign * kBinomial(m - k, u) * kBinomial(k, oc.n2 - u);
        }
        const double mag = std::sqrt(kBinomial(n_total - k, lost) * kBinomial(m, k) / kBinomial(m, oc.n1));
        weights_[o * stride() + static_cast<std::size_t>(k)] = mag * split * std::pow(2.0, -0.5 * m);
      }
    }
  }

  [[nodiscard]] int n_total() const { return n_total_; }
  [[nodiscard]] const OutcomeDistribution& layout() const { return layout_; }
  [[nodiscard]] std::size_t stride() const { return static_cast<std::size_t>(n_total_) + 1; }
  [[nodiscard]] double weight(std::size_t outcome, int k) const { return weights_[outcome * stride() + static_cast<std::size_t>(k)]; }

 private:
  static OutcomeDistribution check(int n_total) {
    if (n_total < 0) throw std::invalid_argument("photon number must be non-negative");
    if (n_total > kMaxPhotons) {
      throw std::invalid_argument("photon number " + std::to_string(n_total) + " exceeds the supported maximum of " +
                                  std::to_string(kMaxPhotons));
    }
    return OutcomeDistribution(n_total);
  }

  int n_total_;
  OutcomeDistribution layout_;
  std::vector<double> weights_;
};

/// A probe state bound to its detection model; evaluating it at many
/// detunings reuses psi_k w_k.
class StateDetection {
 public:
  explicit StateDetection(const ProbeState& state) : StateDetection(state, DetectionModel(state.n_total())) {}

  StateDetection(const ProbeState& state, const DetectionModel& model) : layout_(model.layout()) {
    if (state.n_total() != model.n_total()) throw std::invalid_argument("state and detection model disagree on N");
    n_total_ = model.n_total();
    amps_.assign(layout_.outcomes().size() * model.stride(), Complex{});
    for (std::size_t o = 0; o < layout_.outcomes().size(); ++o) {
      for (int k = 0; k <= n_total_; ++k) amps_[o * model.stride() + static_cast<std::size_t>(k)] = state[static_cast<std::size_t>(k)] * model.weight(o, k);
    }
  }

  [[nodiscard]] int n_total() const { return n_total_; }

  /// Distribution and derivatives at the given arm response. Throws
  /// NumericInvariantError if the result is not a normalized distribution.
  [[nodiscard]] OutcomeDistribution evaluate(const ArmResponse& arm) const {
    const auto stride = static_cast<std::size_t>(n_total_) + 1;
    const double log_t = arm.log_transmissivity;
    const double loss = -std::expm1(log_t);  // 1 - T
    const double t = std::exp(log_t);

    // sqrt(T)^j, e^{-i phi j}, (1 - T)^j and d(1 - T)^j / d ln T for j = 0..N
    std::vector<double> root_t(stride);
    std::vector<Complex> rot(stride);
    std::vector<double> loss_pow(stride);
    std::vector<double> dloss_pow(stride);
    for (std::size_t j = 0; j < stride; ++j) {
      const auto jd = static_cast<double>(j);
      root_t[j] = std::exp(0.5 * jd * log_t);
      rot[j] = std::polar(1.0, -arm.phase * jd);
      loss_pow[j] = j == 0 ? 1.0 : loss_pow[j - 1] * loss;
      dloss_pow[j] = j == 0 ? 0.0 : -jd * loss_pow[j - 1] * t;
    }

    OutcomeDistribution dist = layout_;
    for (std::size_t o = 0; o < dist.outcomes().size(); ++o) {
      Outcome& oc = dist.outcomes()[o];
      const int m = oc.n1 + oc.n2;
      const int lost = n_total_ - m;
      Complex a{};
      Complex da_dlogt{};
      Complex da_dphase{};
      for (int k = 0; k <= m; ++k) {
        const Complex term = amps_[o * stride + static_cast<std::size_t>(k)] * root_t[static_cast<std::size_t>(m - k)] * rot[static_cast<std::size_t>(k)];
        a += term;
        da_dlogt += 0.5 * static_cast<double>(m - k) * term;
        da_dphase += Complex(0.0, -static_cast<double>(k)) * term;
      }
      const double amp2 = std::norm(a);
      const double lp = loss_pow[static_cast<std::size_t>(lost)];
      oc.prob = lp * amp2;
      oc.dprob_dlogt = dloss_pow[static_cast<std::size_t>(lost)] * amp2 + lp * 2.0 * std::real(std::conj(a) * da_dlogt);
      oc.dprob_dphase = lp * 2.0 * std::real(std::conj(a) * da_dphase);
      oc.dprob = oc.dprob_dlogt * arm.d_log_transmissivity + oc.dprob_dphase * arm.d_phase;
    }
    dist.check_and_clamp();
    return dist;
  }

 private:
  int n_total_ = 0;
  OutcomeDistribution layout_;
  std::vector<Complex> amps_;
};

/// P(n1, n2) and dP/d delta for a pure state through the interferometer.
inline OutcomeDistribution detection_distribution(const ProbeState& state, const ArmResponse& arm) {
  return StateDetection(state).evaluate(arm);
}

}  // namespace fisherspec
