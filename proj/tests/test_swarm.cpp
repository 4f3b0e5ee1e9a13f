#include <cmath>
#include <random>
#include <span>

#include <gtest/gtest.h>

#include <fisherspec/swarm.hpp>

using namespace fisherspec;

namespace {

double toy_objective(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return -s;
}

void init_box(SwarmRng& rng, std::span<double> x) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x) v = u(rng);
}

void no_projection(std::span<double>) {}

struct GridMax {
  double value;
  double x;
  double y;
};

/// Exhaustive search of the toy objective on a 201 x 201 grid over [-1, 1]^2.
GridMax brute_force_toy_max() {
  GridMax best{-INFINITY, 0.0, 0.0};
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const double p[2] = {-1.0 + 0.01 * i, -1.0 + 0.01 * j};
      const double v = toy_objective(p);
      if (v > best.value) best = {v, p[0], p[1]};
    }
  }
  return best;
}

}  // namespace

TEST(PsoStep, FixedPointWhenAtBothBests) {
  std::vector<double> x{0.3, -0.2, 0.9};
  std::vector<double> v(3, 0.0);
  const std::vector<double> best = x;
  auto rng = swarm_stream(1, 1, 0);
  pso_step(x, v, best, best, SwarmParams{}, rng);
  EXPECT_EQ(x, best);
  EXPECT_EQ(v, std::vector<double>(3, 0.0));
}

TEST(PsoStep, PureInertialDecayWithoutAttraction) {
  SwarmParams p;
  p.c_global = 0.0;
  p.c_local = 0.0;
  std::vector<double> x{1.0, 2.0};
  std::vector<double> v{0.5, -1.0};
  const std::vector<double> lb{9.0, 9.0};
  const std::vector<double> gb{-9.0, 4.0};
  auto rng = swarm_stream(0, 1, 0);
  pso_step(x, v, lb, gb, p, rng);
  EXPECT_DOUBLE_EQ(v[0], 0.729 * 0.5);
  EXPECT_DOUBLE_EQ(v[1], 0.729 * -1.0);
  EXPECT_DOUBLE_EQ(x[0], 1.0 + 0.729 * 0.5);
  EXPECT_DOUBLE_EQ(x[1], 2.0 - 0.729);
}

TEST(PsoStep, MovesTowardAttractors) {
  std::vector<double> x{0.0};
  std::vector<double> v{0.0};
  const std::vector<double> target{1.0};
  auto rng = swarm_stream(5, 1, 0);
  pso_step(x, v, target, target, SwarmParams{}, rng);
  EXPECT_GT(x[0], 0.0);
  EXPECT_LE(x[0], 0.729 * 4.1);
}

TEST(PsoStep, RejectsDimensionMismatch) {
  std::vector<double> x(2), v(3), b(2);
  auto rng = swarm_stream(0, 0, 0);
  EXPECT_THROW(pso_step(x, v, b, b, SwarmParams{}, rng), std::invalid_argument);
}

TEST(SwarmMaximize, ScalarFactorsConfineTwoParticlesToALine) {
  // With one r_g, r_l per particle and zero initial velocity, every velocity
  // is a combination of differences between points on the line through the
  // two starting positions. A two-particle swarm therefore never leaves that
  // line and cannot reach an optimum off it.
  SwarmParams p;
  p.n_particles = 2;
  p.seed = 4;
  std::vector<std::vector<double>> visited;
  auto recording = [&](std::span<const double> x) {
    visited.emplace_back(x.begin(), x.end());
    return toy_objective(x);
  };
  const SwarmResult r = swarm_maximize(recording, 2, p, init_box, no_projection);
  ASSERT_EQ(visited.size(), 202u);
  const std::vector<double>& a = visited[0];
  const std::vector<double>& b = visited[1];
  const double ux = b[0] - a[0];
  const double uy = b[1] - a[1];
  const double len = std::hypot(ux, uy);
  for (const auto& x : visited) EXPECT_NEAR(((x[0] - a[0]) * uy - (x[1] - a[1]) * ux) / len, 0.0, 1e-12);
  const double gap = std::abs(a[0] * uy - a[1] * ux) / len;  // distance from the origin to the line
  EXPECT_LE(r.best_value, -gap * gap + 1e-15);
}

TEST(SwarmMaximize, TwoParticleQuadraticWithPerDimensionFactors) {
  const GridMax oracle = brute_force_toy_max();
  ASSERT_EQ(oracle.value, 0.0);
  ASSERT_NEAR(oracle.x, 0.0, 1e-12);
  ASSERT_NEAR(oracle.y, 0.0, 1e-12);

  int within_1e6 = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SwarmParams p;
    p.n_particles = 2;
    p.per_dimension_rng = true;
    p.seed = seed;
    const SwarmResult r = swarm_maximize(toy_objective, 2, p, init_box, no_projection);
    ASSERT_EQ(r.trace.size(), 101u);
    EXPECT_LT(oracle.value - r.best_value, 1e-3) << "seed " << seed;
    if (oracle.value - r.best_value < 1e-6) ++within_1e6;
  }
  // Two particles stagnate easily; this records how many seeds reach 1e-6.
  RecordProperty("seeds_within_1e-6", within_1e6);
  EXPECT_GE(within_1e6, 1);
}

TEST(SwarmMaximize, DefaultSwarmConvergesOnQuadratic) {
  const GridMax oracle = brute_force_toy_max();
  for (bool per_dimension : {false, true}) {
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SwarmParams p;
      p.per_dimension_rng = per_dimension;
      p.seed = seed;
      const SwarmResult r = swarm_maximize(toy_objective, 2, p, init_box, no_projection);
      if (oracle.value - r.best_value < 1e-6) ++converged;
    }
    EXPECT_GE(converged, 9) << "per_dimension_rng = " << per_dimension;
  }
}

TEST(SwarmMaximize, TraceIsMonotoneAndEndsAtBest) {
  SwarmParams p;
  p.seed = 42;
  p.n_iterations = 60;
  auto rastrigin = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v - 3.0 * std::cos(2 * M_PI * v);
    return -s;
  };
  const SwarmResult r = swarm_maximize(rastrigin, 4, p, init_box, no_projection);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1]);
  EXPECT_EQ(r.trace.back(), r.best_value);
  EXPECT_EQ(rastrigin(r.best_position), r.best_value);
  EXPECT_EQ(r.evaluations, 10L * 61L);
}

TEST(SwarmMaximize, DeterministicForFixedSeedAndThreadCount) {
  SwarmParams p;
  p.seed = 7;
  const SwarmResult a = swarm_maximize(toy_objective, 3, p, init_box, no_projection);
  const SwarmResult b = swarm_maximize(toy_objective, 3, p, init_box, no_projection);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.best_position, b.best_position);

  p.threads = 4;
  const SwarmResult c = swarm_maximize(toy_objective, 3, p, init_box, no_projection);
  EXPECT_EQ(a.trace, c.trace);
  EXPECT_EQ(a.best_position, c.best_position);

  p.seed = 8;
  const SwarmResult d = swarm_maximize(toy_objective, 3, p, init_box, no_projection);
  EXPECT_NE(a.trace, d.trace);
}

TEST(SwarmMaximize, PerDimensionRandomFactorsAlsoConverge) {
  SwarmParams p;
  p.per_dimension_rng = true;
  p.seed = 3;
  const SwarmResult r = swarm_maximize(toy_objective, 2, p, init_box, no_projection);
  EXPECT_GT(r.best_value, -1e-6);

  p.per_dimension_rng = false;
  const SwarmResult s = swarm_maximize(toy_objective, 2, p, init_box, no_projection);
  EXPECT_NE(r.trace, s.trace);
}

TEST(SwarmMaximize, ZeroIterationsKeepsInitialBest) {
  SwarmParams p;
  p.n_iterations = 0;
  const SwarmResult r = swarm_maximize(toy_objective, 2, p, init_box, no_projection);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.evaluations, 10);
}

TEST(SwarmParamsTest, Validation) {
  SwarmParams p;
  EXPECT_NO_THROW(p.validate());
  p.n_particles = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SwarmParams{};
  p.constriction = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 6) throw std::runtime_error("boom"); }), std::runtime_error);
}
