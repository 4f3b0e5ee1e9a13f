#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <fisherspec/fisher.hpp>
#include <fisherspec/states.hpp>

#include "test_support.hpp"

using namespace fisherspec;
using fisherspec::testing::random_arm;
using fisherspec::testing::random_state;
using fisherspec::testing::relative_error;

namespace {

// (dT/d delta)^2 / (T (1 - T)) for the sodium cell at N = 2.5e16, in units of
// gamma_s^-2, from an independent 30-digit evaluation (mpmath numerical
// differentiation of T = exp(-chi'' omega L / c)).
constexpr double kSinglePhotonFisherAtGamma = 0.588865856214990088;
constexpr double kSinglePhotonFisherAtMinus2p5Gamma = 0.216353588355741125;

double single_photon_closed_form(const ArmResponse& a) {
  const double t = a.transmissivity;
  return a.d_transmissivity * a.d_transmissivity / (t * (1.0 - t));
}

/// Joint distribution of two independent experiments.
double product_fisher(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  std::vector<double> probs;
  std::vector<double> dprobs;
  for (const auto& a : p.outcomes()) {
    for (const auto& b : q.outcomes()) {
      probs.push_back(a.prob * b.prob);
      dprobs.push_back(a.dprob * b.prob + a.prob * b.dprob);
    }
  }
  return fisher_information(probs, dprobs);
}

}  // namespace

TEST(FisherInformation, SinglePhotonClosedForm) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const ArmResponse arm = random_arm(rng);
    if (arm.transmissivity == 1.0) continue;
    const double f = fisher_information(detection_distribution(all_in_ensemble_arm(1), arm));
    EXPECT_LT(relative_error(f, single_photon_closed_form(arm)), 1e-12);
  }
}

TEST(FisherInformation, SinglePhotonReferenceValues) {
  const Medium m = sodium_d1(2.5e16);
  const double g2 = m.gamma_s * m.gamma_s;
  const auto f = [&](double x) {
    return fisher_information(detection_distribution(all_in_ensemble_arm(1), arm_response(m, x * m.gamma_s))) * g2;
  };
  EXPECT_LT(relative_error(f(1.0), kSinglePhotonFisherAtGamma), 1e-10);
  EXPECT_LT(relative_error(f(-2.5), kSinglePhotonFisherAtMinus2p5Gamma), 1e-10);
}

TEST(FisherInformation, NoInformationWithoutTransmissionSlope) {
  for (int n = 1; n <= 6; ++n) {
    const auto d = detection_distribution(all_in_ensemble_arm(n), ArmResponse::from_values(0.4, 0.6, 0.0, 3.0));
    EXPECT_NEAR(fisher_information(d), 0.0, 1e-14);
  }
}

TEST(FisherInformation, NonNegative) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto d = detection_distribution(random_state(rng, 1 + i % 6), random_arm(rng));
    EXPECT_GE(fisher_information(d), 0.0);
  }
}

TEST(FisherInformation, SkipsNegligibleOutcomes) {
  const std::vector<double> p{0.5, 0.5, 1e-15};
  const std::vector<double> dp{1.0, -2.0, 1.0};
  EXPECT_DOUBLE_EQ(fisher_information(p, dp), 2.0 + 8.0);
  EXPECT_THROW(fisher_information(p, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(FisherInformation, AdditiveOverIndependentCopies) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const ArmResponse arm = random_arm(rng);
    const auto single = detection_distribution(random_state(rng, 1), arm);
    EXPECT_LT(relative_error(product_fisher(single, single), 2.0 * fisher_information(single)), 1e-10);
  }
}

TEST(FisherInformation, InvariantUnderOutputSplitterConvention) {
  // Flipping the sign of the b -> d amplitude is equivalent to psi_k -> (-1)^k psi_k;
  // it swaps the roles of the output ports but leaves F unchanged.
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 6; ++n) {
    const ProbeState s = random_state(rng, n);
    std::vector<Complex> flipped(s.coeffs().begin(), s.coeffs().end());
    for (std::size_t k = 1; k < flipped.size(); k += 2) flipped[k] = -flipped[k];
    const ArmResponse arm = random_arm(rng);
    const auto a = detection_distribution(s, arm);
    const auto b = detection_distribution(ProbeState(flipped), arm);
    for (const auto& o : a.outcomes()) EXPECT_NEAR(o.prob, b.prob(o.n2, o.n1), 1e-12);
    EXPECT_LT(relative_error(fisher_information(a), fisher_information(b)), 1e-10);
  }
}

TEST(FisherInformation, LossOnlyProbeIgnoresPhase) {
  const Medium m = sodium_d1(2.5e16);
  for (int n = 1; n <= 5; ++n) {
    for (double x : {-3.0, -1.0, 0.5, 2.0}) {
      ArmResponse arm = arm_response(m, x * m.gamma_s);
      const double f = fisher_information(detection_distribution(all_in_ensemble_arm(n), arm));
      arm.phase = 0.0;
      arm.d_phase = 0.0;
      const double f0 = fisher_information(detection_distribution(all_in_ensemble_arm(n), arm));
      EXPECT_LT(relative_error(f, f0), 1e-12);
    }
  }
}

TEST(FisherInformation, AnalyticDerivativesAgreeWithFiniteDifferences) {
  // Near resonance the cell absorbs almost everything (F ~ 1e-14 gamma_s^-2)
  // and steps below ~1e-5 gamma_s are dominated by round-off.
  const Medium m = sodium_d1(2.5e17);
  const double h = 1e-4 * m.gamma_s;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> x(-15.0, 15.0);
  for (int n = 1; n <= 4; ++n) {
    const StateDetection det(random_state(rng, n, false));
    for (int i = 0; i < 10; ++i) {
      const double d = x(rng) * m.gamma_s;
      const auto dist = det.evaluate(arm_response(m, d));
      const auto plus = fisherspec::testing::probs_at(det, m, d + h);
      const auto minus = fisherspec::testing::probs_at(det, m, d - h);
      std::vector<double> probs;
      std::vector<double> fd;
      for (std::size_t o = 0; o < dist.outcomes().size(); ++o) {
        if (dist.outcomes()[o].prob < 1e-8) continue;  // away from P ~ 0
        probs.push_back(dist.outcomes()[o].prob);
        fd.push_back((plus[o] - minus[o]) / (2 * h));
      }
      std::vector<double> analytic_probs;
      std::vector<double> analytic;
      for (const auto& o : dist.outcomes()) {
        if (o.prob < 1e-8) continue;
        analytic_probs.push_back(o.prob);
        analytic.push_back(o.dprob);
      }
      EXPECT_LT(relative_error(fisher_information(analytic_probs, analytic), fisher_information(probs, fd)), 1e-4)
          << "N=" << n << " delta/gamma=" << d / m.gamma_s;
    }
  }
}

TEST(FisherCurve, SinglePhotonCurveHasTwoPeaksAndClosedFormCentre) {
  const Medium m = sodium_d1(2.5e16);
  const FisherCurve c = fisher_curve(all_in_ensemble_arm(1), m, DetuningGrid::around_resonance(m));
  ASSERT_EQ(c.values.size(), 2001u);
  const ArmResponse centre = arm_response(m, 0.0);
  EXPECT_LT(relative_error(c.values[1000], single_photon_closed_form(centre)), 1e-8);

  // one maximum on each side of resonance, at mirrored detunings
  const auto left = std::max_element(c.values.begin(), c.values.begin() + 1000) - c.values.begin();
  const auto right = std::max_element(c.values.begin() + 1001, c.values.end()) - c.values.begin();
  EXPECT_EQ(left + right, 2000);
  EXPECT_LT(relative_error(c.values[static_cast<std::size_t>(left)], c.values[static_cast<std::size_t>(right)]), 1e-5);
  EXPECT_GT(c.values[static_cast<std::size_t>(left)], 100.0 * c.values[1000]);
  EXPECT_EQ(c.peak_value, *std::max_element(c.values.begin(), c.values.end()));
}

TEST(FisherCurve, SinglePointGrid) {
  const Medium m = sodium_d1(2.5e16);
  const std::vector<double> one{1.5 * m.gamma_s};
  const FisherCurve c = fisher_curve(noon_state(2), m, one);
  ASSERT_EQ(c.values.size(), 1u);
  EXPECT_EQ(c.peak_delta, one[0]);
  EXPECT_EQ(c.peak_value, c.values[0]);
}

TEST(FisherCurve, RejectsBadGrids) {
  const Medium m = sodium_d1(2.5e16);
  EXPECT_THROW(fisher_curve(noon_state(1), m, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(fisher_curve(noon_state(1), m, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(fisher_curve(noon_state(1), m, std::vector<double>{2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(fisher_curve(noon_state(1), m, std::vector<double>{-2.0 * m.omega0, 0.0}), std::invalid_argument);
}

TEST(FisherCurve, PeakTiesPreferSmallestDetuning) {
  FisherCurve c;
  c.deltas = {-3.0, -1.0, 2.0, 5.0};
  c.values = {1.0, 4.0, 4.0, 4.0};
  c.update_peak();
  EXPECT_EQ(c.peak_delta, -1.0);
  c.deltas = {-3.0, -2.0, 1.0};
  c.values = {4.0, 4.0, 4.0};
  c.update_peak();
  EXPECT_EQ(c.peak_delta, 1.0);
}

TEST(FisherCurve, RefinedPeakNeverBelowCoarsePeak) {
  const Medium m = sodium_d1(2.5e17);
  const DetuningGrid grid = DetuningGrid::around_resonance(m, 100.0, 201);
  for (const auto& s : {noon_state(1), noon_state(2), all_in_ensemble_arm(2)}) {
    const FisherCurve coarse = fisher_curve(s, m, grid);
    const FisherPeak refined = peak_fisher(s, m, grid);
    EXPECT_GE(refined.value, coarse.peak_value);
    EXPECT_LE(std::abs(refined.delta - coarse.peak_delta), 5 * grid.step() * (1 + 1e-12));
  }
}

TEST(CopiesFisher, ScalesPointwise) {
  FisherCurve c;
  c.deltas = {-1.0, 0.0, 1.0};
  c.values = {1.0, 3.0, 2.0};
  c.update_peak();
  const FisherCurve same = copies_fisher(c, 1);
  EXPECT_EQ(same.values, c.values);
  EXPECT_EQ(same.peak_value, 3.0);
  const FisherCurve ten = copies_fisher(c, 10);
  EXPECT_EQ(ten.peak_value, 30.0);
  EXPECT_EQ(ten.deltas, c.deltas);
  EXPECT_EQ(ten.values[2], 20.0);
  EXPECT_THROW(copies_fisher(c, 0), std::invalid_argument);
}

TEST(CopiesFisher, MatchesProductDistributionOfTwoPhotons) {
  const Medium m = sodium_d1(2.5e16);
  const auto deltas = DetuningGrid{-10 * m.gamma_s, 10 * m.gamma_s, 41}.values();
  const FisherCurve doubled = copies_fisher(fisher_curve(all_in_ensemble_arm(1), m, deltas), 2);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto d = detection_distribution(all_in_ensemble_arm(1), arm_response(m, deltas[i]));
    EXPECT_LT(relative_error(product_fisher(d, d), doubled.values[i]), 1e-10);
  }
}

TEST(CramerRao, ReciprocalOfFisherInformation) {
  EXPECT_DOUBLE_EQ(cramer_rao_bound(4.0), 0.25);
  EXPECT_THROW(cramer_rao_bound(0.0), std::domain_error);
  EXPECT_THROW(cramer_rao_bound(-1.0), std::domain_error);

  const Medium m = sodium_d1(2.5e16);
  const ArmResponse arm = arm_response(m, m.gamma_s);
  const double f = single_photon_closed_form(arm);
  EXPECT_LT(relative_error(cramer_rao_bound(fisher_information(detection_distribution(all_in_ensemble_arm(1), arm))), 1.0 / f),
            1e-12);
}

TEST(DetuningGridTest, ValuesAndValidation) {
  const DetuningGrid g{-1.0, 1.0, 5};
  EXPECT_EQ(g.values(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  EXPECT_DOUBLE_EQ(g.step(), 0.5);
  EXPECT_THROW((DetuningGrid{1.0, -1.0, 5}.values()), std::invalid_argument);
  EXPECT_THROW((DetuningGrid{0.0, 1.0, 0}.values()), std::invalid_argument);
  EXPECT_THROW((DetuningGrid{0.0, INFINITY, 3}.values()), std::invalid_argument);
}
