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
#include "potts_sl/data_terms.hpp"
#include "potts_sl/error.hpp"
#include "potts_sl/oracles.hpp"

namespace potts_sl {
namespace {

using Vec = std::vector<double>;

TEST(Xent, NamesRoundTrip) {
  for (XentKind k : kAllXentKinds) EXPECT_EQ(parse_xent_kind(to_string(k)), k);
  EXPECT_FALSE(parse_xent_kind("kl").has_value());
}

TEST(Xent, KnownValues) {
  const Vec sigma{0.2, 0.7, 0.1};
  EXPECT_NEAR(xent_value(XentKind::kCrossEntropy, Distribution::one_hot(1, 3), sigma).value(),
              -std::log(0.7), 1e-15);
  EXPECT_NEAR(xent_value(XentKind::kCollisionCrossEntropy, Vec{0.5, 0.5}, Vec{0.5, 0.5}).value(),
              0.693147, 1e-6);
  EXPECT_NEAR(xent_value(XentKind::kReverseCrossEntropy, Distribution::uniform(3), sigma).value(),
              std::log(3.0), 1e-15);
  EXPECT_EQ(xent_value(XentKind::kQuadratic, sigma, sigma).value(), 0.0);
  EXPECT_NEAR(xent_value(XentKind::kQuadratic, Vec{1, 0}, Vec{0, 1}).value(), 2.0, 1e-15);
}

TEST(Xent, DivergenceIsTagged) {
  EXPECT_TRUE(xent_value(XentKind::kCrossEntropy, Vec{0.5, 0.5}, Vec{1, 0}).is_divergent());
  EXPECT_TRUE(xent_value(XentKind::kReverseCrossEntropy, Vec{1, 0}, Vec{0.5, 0.5}).is_divergent());
  EXPECT_TRUE(xent_value(XentKind::kCollisionCrossEntropy, Vec{1, 0}, Vec{0, 1}).is_divergent());
  EXPECT_THROW(xent_grad(XentKind::kCrossEntropy, Vec{0.5, 0.5}, Vec{1, 0}), DivergenceError);
  // The clamped loss stays finite.
  EXPECT_TRUE(std::isfinite(xent_loss(XentKind::kCrossEntropy, Vec{0.5, 0.5}, Vec{1, 0})));
}

TEST(Xent, CollisionSymmetryAndOneHotAgreement) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 100; ++n) {
    const Vec a = fixtures::random_interior(rng, 4);
    const Vec b = fixtures::random_interior(rng, 4);
    EXPECT_NEAR(xent_value(XentKind::kCollisionCrossEntropy, a, b).value(),
                xent_value(XentKind::kCollisionCrossEntropy, b, a).value(), 1e-15);
    const Distribution e = Distribution::one_hot(n % 4, 4);
    EXPECT_NEAR(xent_value(XentKind::kCollisionCrossEntropy, e, a).value(),
                xent_value(XentKind::kCrossEntropy, e, a).value(), 1e-15);
  }
}

TEST(Xent, KnownGradients) {
  const Vec y{0.0, 1.0, 0.0};
  const Vec sigma{0.2, 0.5, 0.3};
  const XentGradient g = xent_grad(XentKind::kCollisionCrossEntropy, y, sigma);
  EXPECT_NEAR(g.dsigma[0], 0.0, 1e-15);
  EXPECT_NEAR(g.dsigma[1], -1.0 / 0.5, 1e-15);
  const Vec y2{0.1, 0.6, 0.3};
  const XentGradient q = xent_grad(XentKind::kQuadratic, y2, sigma);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(q.dy[k], 2.0 * (y2[k] - sigma[k]), 1e-15);
}

TEST(Xent, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (XentKind kind : kAllXentKinds) {
    for (int n = 0; n < 100; ++n) {
      const int k = 2 + n % 5;
      Vec x = fixtures::random_interior(rng, k, 0.05);
      const Vec s = fixtures::random_interior(rng, k, 0.05);
      x.insert(x.end(), s.begin(), s.end());
      const XentGradient g = xent_grad(kind, std::span(x).first(k), std::span(x).last(k));
      Vec analytic = g.dy;
      analytic.insert(analytic.end(), g.dsigma.begin(), g.dsigma.end());
      auto f = [&](std::span<const double> v) {
        return xent_value(kind, v.first(k), v.last(k)).value();
      };
      EXPECT_LT(finite_diff_check(f, x, analytic), 1e-4) << to_string(kind);
    }
  }
}

TEST(Xent, LogitGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (XentKind kind : kAllXentKinds) {
    for (int n = 0; n < 50; ++n) {
      const int k = 2 + n % 4;
      const Vec y = fixtures::random_interior(rng, k, 0.05);
      Vec l(static_cast<std::size_t>(k));
      for (double& v : l) v = normal(rng);
      Vec grad(l.size(), 0.0);
      xent_loss_logit_grad(kind, y, softmax(l), 0.7, grad);
      auto f = [&](std::span<const double> x) { return 0.7 * xent_loss(kind, y, softmax(x)); };
      EXPECT_LT(finite_diff_check(f, l, grad), 1e-4) << to_string(kind);
    }
  }
}

TEST(Xent, ConstancyUnderUniformTarget) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 100; ++n) {
    const int k = 2 + n % 6;
    const Distribution u = Distribution::uniform(k);
    const Vec s = fixtures::random_interior(rng, k, 0.0);
    for (XentKind kind : {XentKind::kReverseCrossEntropy, XentKind::kCollisionCrossEntropy}) {
      EXPECT_NEAR(xent_value(kind, u, s).value(), std::log(static_cast<double>(k)), 1e-12);
      // The sigma gradient has no component along the simplex.
      const XentGradient g = xent_grad(kind, u, s);
      double mean = 0.0;
      for (double v : g.dsigma) mean += v / k;
      for (double v : g.dsigma) EXPECT_NEAR(v - mean, 0.0, 1e-12);
    }
  }
}

TEST(Xent, CrossEntropyMimicsUniformTarget) {
  const Distribution u = Distribution::uniform(3);
  const double at_uniform = xent_value(XentKind::kCrossEntropy, u, u).value();
  std::mt19937_64 rng(5);
  for (int n = 0; n < 500; ++n) {
    const Vec s = fixtures::random_interior(rng, 3, 0.0);
    EXPECT_GT(xent_value(XentKind::kCrossEntropy, u, s).value(), at_uniform - 1e-15);
  }
}

TEST(CorruptedTarget, Mixtures) {
  const Distribution y = Distribution::one_hot(0, 2);
  EXPECT_EQ(corrupted_target(y, 0.0), y);
  EXPECT_EQ(corrupted_target(y, 1.0), Distribution::uniform(2));
  const Distribution h = corrupted_target(y, 0.5);
  EXPECT_DOUBLE_EQ(h[0], 0.75);
  EXPECT_DOUBLE_EQ(h[1], 0.25);
  EXPECT_THROW(corrupted_target(y, 1.5), UsageError);
  EXPECT_THROW(corrupted_target(y, -0.1), UsageError);
  EXPECT_THROW(corrupted_target(Distribution::uniform(2), 0.5), DataError);
}

}  // namespace
}  // namespace potts_sl
