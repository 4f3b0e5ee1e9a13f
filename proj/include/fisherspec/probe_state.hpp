#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fisherspec {

using Complex = std::complex<double>;

/// Pure N-photon two-mode state  sum_k psi_k |N-k, k>.
/// Mode a (the first slot) is the arm holding the atomic ensemble.
class ProbeState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws std::invalid_argument if the coefficients are empty or not
  /// normalized to within kNormTolerance.
  explicit ProbeState(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("probe state needs at least one coefficient");
    const double n = norm_squared(coeffs_);
    if (!(std::abs(n - 1.0) <= kNormTolerance)) {
      std::ostringstream os;
      os.precision(17);
      os << "probe state is not normalized: sum |psi_k|^2 = " << n;
      throw std::invalid_argument(os.str());
    }
  }

  /// Real coefficients; same validation as the complex constructor.
  static ProbeState from_real(std::span<const double> re) {
    return ProbeState(std::vector<Complex>(re.begin(), re.end()));
  }

  /// Rescales to unit norm first. Throws if the vector is zero.
  static ProbeState normalized(std::vector<Complex> coeffs) {
    const double n = std::sqrt(norm_squared(coeffs));
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    for (auto& c : coeffs) c /= n;
    return ProbeState(std::move(coeffs));
  }

  /// |n_a, n_b> with n_a + n_b = N.
  static ProbeState fock(int n_a, int n_b) {
    if (n_a < 0 || n_b < 0) throw std::invalid_argument("photon numbers must be non-negative");
    std::vector<Complex> c(static_cast<std::size_t>(n_a + n_b) + 1, 0.0);
    c[static_cast<std::size_t>(n_b)] = 1.0;
    return ProbeState(std::move(c));
  }

  [[nodiscard]] int n_total() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  [[nodiscard]] const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

  [[nodiscard]] bool is_real() const {
    for (const auto& c : coeffs_) {
      if (c.imag() != 0.0) return false;
    }
    return true;
  }

 private:
  static double norm_squared(const std::vector<Complex>& c) {
    double s = 0.0;
    for (const auto& z : c) s += std::norm(z);
    return s;
  }

  std::vector<Complex> coeffs_;
};

}  // namespace fisherspec
