// Peak Fisher information of the reference two-photon probes in a 1 cm
// sodium cell, in units of gamma_s^-2.

#include <cstdio>

#include <fisherspec/fisherspec.hpp>

int main() {
  using namespace fisherspec;
  for (double density : {2.5e16, 2.5e17}) {
    const Medium cell = sodium_d1(density);
    const DetuningGrid grid = DetuningGrid::around_resonance(cell);
    const double g2 = cell.gamma_s * cell.gamma_s;

    const double single = 2.0 * peak_fisher(all_in_ensemble_arm(1), cell, grid).value;
    const double noon = peak_fisher(noon_state(2), cell, grid).value;
    const double noon_copies = 2.0 * peak_fisher(noon_state(1), cell, grid).value;
    const PsoResult best = optimize_state(cell, PsoConfig::defaults(cell, 2, /*seed=*/0));

    std::printf("density %.2e m^-3\n", density);
    std::printf("  2 single photons      %.6f\n", single * g2);
    std::printf("  2-photon NOON         %.6f\n", noon * g2);
    std::printf("  2 single-photon NOONs %.6f\n", noon_copies * g2);
    std::printf("  optimized (seed 0)    %.6f  psi = (%.4f, %.4f, %.4f)\n", best.best_objective * g2,
                best.best_state[0].real(), best.best_state[1].real(), best.best_state[2].real());
  }
}
