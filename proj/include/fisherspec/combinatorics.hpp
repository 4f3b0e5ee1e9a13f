#pragma once

#include <array>
#include <cstddef>

namespace fisherspec {

/// Largest photon number accepted by the closed-form detection model.
inline constexpr int kMaxPhotons = 20;

/// Pascal triangle up to kMaxPhotons. Entries are exact in double precision
/// (C(20, 10) = 184756).
class BinomialTable {
 public:
  constexpr BinomialTable() : rows_{} {
    for (int n = 0; n <= kMaxPhotons; ++n) {
      rows_[n][0] = 1.0;
      for (int k = 1; k <= n; ++k) rows_[n][k] = rows_[n - 1][k - 1] + (k <= n - 1 ? rows_[n - 1][k] : 0.0);
    }
  }

  /// C(n, k); zero when k < 0, k > n or n < 0.
  [[nodiscard]] constexpr double operator()(int n, int k) const {
    if (n < 0 || k < 0 || k > n) return 0.0;
    return rows_[n][k];
  }

 private:
  std::array<std::array<double, kMaxPhotons + 1>, kMaxPhotons + 1> rows_;
};

inline constexpr BinomialTable kBinomial{};

}  // namespace fisherspec
