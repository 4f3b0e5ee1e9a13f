#pragma once

// Brute-force reference for detection_distribution.
//
// Each input ket |N-k, k> is written as (a^+)^{N-k} (b^+)^k |0> / sqrt((N-k)! k!)
// and every creation operator is replaced by its image on the output modes
// (c, d, loss):
//
//   a^+ -> sqrt(T) e^{i phi} (c^+ + d^+)/sqrt2 + sqrt(1-T) l^+
//   b^+ -> (c^+ - d^+)/sqrt2
//
// The resulting polynomial is expanded term by term, converted to Fock
// amplitudes, and the loss-mode occupation is traced out. Coefficients carry
// their detuning derivative alongside (forward-mode dual numbers), so dP/d
// delta is exact as well. Cost grows as N^3 per input ket; intended for
// N <= 8.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "interferometer.hpp"
#include "medium.hpp"
#include "probe_state.hpp"

namespace fisherspec {

inline constexpr int kOracleMaxPhotons = 8;

namespace oracle_detail {

/// Value and derivative with respect to the detuning.
struct Dual {
  Complex v{};
  Complex d{};
};

inline Dual operator*(const Dual& x, const Dual& y) { return {x.v * y.v, x.d * y.v + x.v * y.d}; }
inline Dual& operator+=(Dual& x, const Dual& y) {
  x.v += y.v;
  x.d += y.d;
  return x;
}

/// Homogeneous polynomial in (c^+, d^+, l^+), dense in the exponents.
class FockPolynomial {
 public:
  explicit FockPolynomial(int max_degree) : dim_(max_degree + 1), terms_(static_cast<std::size_t>(dim_ * dim_ * dim_)) {}

  Dual& at(int p, int q, int r) { return terms_[static_cast<std::size_t>((p * dim_ + q) * dim_ + r)]; }
  [[nodiscard]] const Dual& at(int p, int q, int r) const { return terms_[static_cast<std::size_t>((p * dim_ + q) * dim_ + r)]; }
  [[nodiscard]] int dim() const { return dim_; }

  /// this *= (lc c^+ + ld d^+ + ll l^+)
  void multiply_linear(const Dual& lc, const Dual& ld, const Dual& ll) {
    FockPolynomial out(dim_ - 1);
    for (int p = 0; p < dim_; ++p) {
      for (int q = 0; p + q < dim_; ++q) {
        for (int r = 0; p + q + r < dim_; ++r) {
          const Dual& x = at(p, q, r);
          if (x.v == Complex{} && x.d == Complex{}) continue;
          if (p + 1 < dim_) out.at(p + 1, q, r) += x * lc;
          if (q + 1 < dim_) out.at(p, q + 1, r) += x * ld;
          if (r + 1 < dim_) out.at(p, q, r + 1) += x * ll;
        }
      }
    }
    *this = std::move(out);
  }

  FockPolynomial& operator+=(const FockPolynomial& o) {
    for (std::size_t i = 0; i < terms_.size(); ++i) terms_[i] += o.terms_[i];
    return *this;
  }

 private:
  int dim_;
  std::vector<Dual> terms_;
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace oracle_detail

/// Same contract as detection_distribution, computed by explicit Fock-space
/// evolution. Throws std::invalid_argument for N > kOracleMaxPhotons.
inline OutcomeDistribution distribution_oracle(const ProbeState& state, const ArmResponse& arm) {
  using oracle_detail::Dual;
  using oracle_detail::factorial;
  using oracle_detail::FockPolynomial;

  const int n = state.n_total();
  if (n > kOracleMaxPhotons) {
    throw std::invalid_argument("distribution_oracle supports at most " + std::to_string(kOracleMaxPhotons) + " photons");
  }

  const double t = arm.transmissivity;
  const double dt = arm.d_transmissivity;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // transmitted amplitude sqrt(T) e^{i phi}
  const Complex trans = std::sqrt(t) * std::polar(1.0, arm.phase);
  const Complex dtrans = trans * Complex(dt / (2.0 * t), arm.d_phase);
  // scattered amplitude sqrt(1 - T)
  const double scat = std::sqrt(1.0 - t);
  const double dscat = scat > 0.0 ? -dt / (2.0 * scat) : 0.0;

  const Dual a_c{trans * inv_sqrt2, dtrans * inv_sqrt2};
  const Dual a_d = a_c;
  const Dual a_l{scat, dscat};
  const Dual b_c{inv_sqrt2, 0.0};
  const Dual b_d{-inv_sqrt2, 0.0};
  const Dual b_l{0.0, 0.0};

  FockPolynomial total(n);
  for (int k = 0; k <= n; ++k) {
    const Complex psi = state[static_cast<std::size_t>(k)];
    if (psi == Complex{}) continue;
    FockPolynomial poly(n);
    poly.at(0, 0, 0) = Dual{psi / std::sqrt(factorial(n - k) * factorial(k)), 0.0};
    for (int i = 0; i < n - k; ++i) poly.multiply_linear(a_c, a_d, a_l);
    for (int i = 0; i < k; ++i) poly.multiply_linear(b_c, b_d, b_l);
    total += poly;
  }

  OutcomeDistribution dist(n);
  for (auto& oc : dist.outcomes()) {
    const int lost = n - oc.n1 - oc.n2;
    const Dual& coeff = total.at(oc.n1, oc.n2, lost);
    const double norm = std::sqrt(factorial(oc.n1) * factorial(oc.n2) * factorial(lost));
    const Complex amp = coeff.v * norm;
    const Complex damp = coeff.d * norm;
    oc.prob = std::norm(amp);
    oc.dprob = 2.0 * std::real(std::conj(amp) * damp);
  }
  return dist;
}

}  // namespace fisherspec
