/* Copyright 2026 The potts-sl Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "potts_sl/error.hpp"
#include "potts_sl/oracles.hpp"
#include "potts_sl/solver.hpp"

namespace potts_sl {
namespace {

TEST(SolverConfig, DefaultsAndValidation) {
  const SolverConfig cfg;
  EXPECT_EQ(cfg.steps, 200);
  EXPECT_EQ(cfg.learning_rate, 0.075);
  EXPECT_EQ(cfg.init, SolverInit::kFromLogits);
  SolverConfig bad;
  bad.steps = 0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad.steps = 1;
  bad.learning_rate = -1.0;
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(Solver, TraceLengthAndScribblesExact) {
  const auto inst = fixtures::make_region_instance(1, 8, 8, 3, 0.2);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  SolverConfig cfg;
  cfg.steps = 37;
  const SolveResult r = solve_pseudo_labels(inst.sigma, inst.scribbles, g, LossConfig{}, cfg);
  EXPECT_EQ(r.report.objective_trace.size(), 38u);
  EXPECT_EQ(r.report.final_objective, r.report.objective_trace.back());
  for (std::size_t i = 0; i < r.labels.pixel_count(); ++i) {
    if (!inst.scribbles.is_labeled(i)) continue;
    const auto p = r.labels.pixel(i);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(p[static_cast<std::size_t>(c)], c == inst.scribbles.label(i) ? 1.0 : 0.0);
    }
  }
  for (std::size_t i = 0; i < r.labels.pixel_count(); ++i) {
    EXPECT_TRUE(is_on_simplex(r.labels.pixel(i)));
  }
}

double max_unlabeled_deviation(const ProbField& y, const ProbField& sigma,
                               const ScribbleField& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    if (s.is_labeled(i)) continue;
    for (int c = 0; c < y.classes(); ++c) {
      worst = std::max(worst, std::abs(y.pixel(i)[c] - sigma.pixel(i)[c]));
    }
  }
  return worst;
}

TEST(Solver, QuadWithoutPairwiseConvergesToSigma) {
  const auto inst = fixtures::make_region_instance(2, 6, 6, 3, 0.1);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  LossConfig cfg;
  cfg.lambda = 0.0;
  cfg.xent = XentKind::kQuadratic;
  const SolveResult r = solve_pseudo_labels(inst.sigma, inst.scribbles, g, cfg, SolverConfig{});
  EXPECT_LT(max_unlabeled_deviation(r.labels, inst.sigma, inst.scribbles), 1e-3);
}

// From a uniform start the logit parameterization approaches sigma slowly;
// a heavier weight gets closer within the same budget.
TEST(Solver, QuadWithoutPairwiseFromUniform) {
  const auto inst = fixtures::make_region_instance(2, 6, 6, 3, 0.1);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  LossConfig cfg;
  cfg.lambda = 0.0;
  cfg.xent = XentKind::kQuadratic;
  SolverConfig sc;
  sc.init = SolverInit::kUniform;
  double prev = INFINITY;
  for (double eta : {1.0, 5.0, 20.0, 40.0}) {
    cfg.eta = eta;
    const SolveResult r = solve_pseudo_labels(inst.sigma, inst.scribbles, g, cfg, sc);
    const double dev = max_unlabeled_deviation(r.labels, inst.sigma, inst.scribbles);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Solver, CollisionWithoutPairwiseSeeksArgmax) {
  std::mt19937_64 rng(3);
  const ProbField sigma = fixtures::random_field(rng, 10, 10, 3);
  const ScribbleField none(10, 10, 3);
  const AffinityGraph g = build_graph(Image(10, 10), AffinityConfig{});
  LossConfig cfg;
  cfg.lambda = 0.0;
  cfg.eta = 1.0;
  cfg.xent = XentKind::kCollisionCrossEntropy;
  const SolveResult r = solve_pseudo_labels(sigma, none, g, cfg, SolverConfig{});
  EXPECT_EQ(argmax_decode(r.labels), argmax_decode(sigma));
  EXPECT_LE(r.report.final_objective, r.report.objective_trace.front());
}

TEST(Solver, FullyScribbledReturnsGroundTruth) {
  std::vector<int> labels(16);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
  const ScribbleField s = ScribbleField::from_labels(4, 4, 3, labels);
  std::mt19937_64 rng(4);
  const ProbField sigma = fixtures::random_field(rng, 4, 4, 3);
  const AffinityGraph g = build_graph(Image(4, 4), AffinityConfig{});
  for (PottsKind k : kAllPottsKinds) {
    LossConfig cfg;
    cfg.potts = k;
    const SolveResult r = solve_pseudo_labels(sigma, s, g, cfg, SolverConfig{});
    EXPECT_EQ(r.labels, ProbField::from_labels(4, 4, 3, labels)) << to_string(k);
  }
}

TEST(Solver, ConvexTraceIsNonIncreasing) {
  const auto inst = fixtures::make_region_instance(5, 16, 16, 3);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  LossConfig cfg;
  cfg.potts = PottsKind::kQuadratic;
  cfg.xent = XentKind::kQuadratic;
  cfg.eta = 5.0;
  cfg.lambda = 5.0;
  const SolveResult r = solve_pseudo_labels(inst.sigma, inst.scribbles, g, cfg, SolverConfig{});
  for (std::size_t t = 1; t < r.report.objective_trace.size(); ++t) {
    EXPECT_LE(r.report.objective_trace[t], r.report.objective_trace[t - 1] + 1e-6) << t;
  }
}

TEST(Solver, NonConvexKindsEndBelowStart) {
  const auto inst = fixtures::make_region_instance(6, 12, 12, 3);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  for (PottsKind pk : kAllPottsKinds) {
    for (XentKind xk : kAllXentKinds) {
      LossConfig cfg;
      cfg.potts = pk;
      cfg.xent = xk;
      const SolveResult r =
          solve_pseudo_labels(inst.sigma, inst.scribbles, g, cfg, SolverConfig{});
      EXPECT_LE(r.report.final_objective, r.report.objective_trace.front() + 1e-9)
          << to_string(pk) << "/" << to_string(xk);
    }
  }
}

TEST(Solver, ObjectiveMatchesStandaloneEvaluation) {
  const auto inst = fixtures::make_region_instance(7, 8, 8, 3, 0.1);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  LossConfig cfg;
  cfg.potts = PottsKind::kNormalizedQuadratic;
  SolverConfig sc;
  sc.steps = 1;
  const SolveResult r = solve_pseudo_labels(inst.sigma, inst.scribbles, g, cfg, sc);
  // The first trace entry is the objective at the (pinned) initial point.
  std::vector<double> v(inst.sigma.values().begin(), inst.sigma.values().end());
  for (std::size_t i = 0; i < inst.sigma.pixel_count(); ++i) {
    if (!inst.scribbles.is_labeled(i)) continue;
    for (int c = 0; c < 3; ++c) v[i * 3 + c] = c == inst.scribbles.label(i);
  }
  const ProbField y0 = ProbField::from_values(8, 8, 3, std::move(v));
  EXPECT_NEAR(r.report.objective_trace.front(),
              pseudo_label_objective(inst.sigma, y0, inst.scribbles, g, cfg), 1e-9);
}

TEST(Solver, DivergentEdgesAreCounted) {
  // Two one-hot scribbles of different classes side by side diverge under CD.
  const ScribbleField s = ScribbleField::from_labels(1, 3, 2, {0, 1, kUnlabeled});
  const AffinityGraph g = build_graph(Image(1, 3), AffinityConfig{});
  SolverConfig sc;
  sc.steps = 5;
  const SolveResult r = solve_pseudo_labels(ProbField::uniform(1, 3, 2), s, g, LossConfig{}, sc);
  EXPECT_EQ(r.report.divergent_encounters, 6u);
  EXPECT_TRUE(std::isfinite(r.report.final_objective));
}

TEST(Solver, InitModes) {
  const auto inst = fixtures::make_region_instance(8, 6, 6, 3, 0.0);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  for (SolverInit init : {SolverInit::kFromLogits, SolverInit::kUniform,
                          SolverInit::kOneHotArgmax}) {
    SolverConfig sc;
    sc.init = init;
    sc.steps = 3;
    EXPECT_NO_THROW(solve_pseudo_labels(inst.sigma, inst.scribbles, g, LossConfig{}, sc));
  }
}

TEST(Solver, EdgeOrderInvariance) {
  std::mt19937_64 rng(9);
  const auto inst = fixtures::make_region_instance(9, 8, 8, 3);
  const AffinityGraph g = build_graph(inst.image, AffinityConfig{});
  std::vector<Edge> shuffled = g.edges();
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const AffinityGraph h(g.pixel_count(), g.kind(), shuffled);
  const SolveResult a = solve_pseudo_labels(inst.sigma, inst.scribbles, g, LossConfig{}, {});
  const SolveResult b = solve_pseudo_labels(inst.sigma, inst.scribbles, h, LossConfig{}, {});
  for (std::size_t i = 0; i < a.labels.values().size(); ++i) {
    EXPECT_NEAR(a.labels.values()[i], b.labels.values()[i], 1e-9);
  }
}

TEST(Solver, DimensionMismatch) {
  const AffinityGraph g = build_graph(Image(2, 2), AffinityConfig{});
  EXPECT_THROW(solve_pseudo_labels(ProbField::uniform(2, 3, 2), ScribbleField(2, 3, 2), g,
                                   LossConfig{}, SolverConfig{}),
               DataError);
}

TEST(SoftJaccard, Cases) {
  std::mt19937_64 rng(10);
  const ProbField a = fixtures::random_field(rng, 2, 2, 2);
  EXPECT_DOUBLE_EQ(soft_jaccard(a, a), 1.0);
  const ProbField zero = ProbField::from_labels(2, 2, 2, std::vector<int>(4, 0));
  const ProbField one = ProbField::from_labels(2, 2, 2, std::vector<int>(4, 1));
  EXPECT_EQ(soft_jaccard(zero, one), 0.0);
  const ProbField b = fixtures::random_field(rng, 2, 2, 2);
  double expected = 0.0;
  for (int c = 0; c < 2; ++c) {
    double mn = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      mn += std::min(a.pixel(i)[c], b.pixel(i)[c]);
      mx += std::max(a.pixel(i)[c], b.pixel(i)[c]);
    }
    expected += mn / mx / 2.0;
  }
  EXPECT_NEAR(soft_jaccard(a, b), expected, 1e-15);
  EXPECT_THROW(soft_jaccard(a, ProbField::uniform(2, 2, 3)), DataError);
}

}  // namespace
}  // namespace potts_sl
