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

#ifndef POTTS_SL_DATA_TERMS_HPP_
#define POTTS_SL_DATA_TERMS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "potts_sl/simplex.hpp"

namespace potts_sl {

// Couplings between a pseudo-label y and a prediction sigma. Argument roles are
// fixed: the label always comes first.
//
//   CE    -sum y ln sigma     (standard, target first)
//   RCE   -sum sigma ln y     (reverse)
//   CCE   -ln sigma'y         (collision, symmetric)
//   QUAD  |y - sigma|^2       (no 1/2 factor)
enum class XentKind {
  kCrossEntropy,
  kReverseCrossEntropy,
  kCollisionCrossEntropy,
  kQuadratic,
};

inline constexpr std::array<XentKind, 4> kAllXentKinds = {
    XentKind::kCrossEntropy,
    XentKind::kReverseCrossEntropy,
    XentKind::kCollisionCrossEntropy,
    XentKind::kQuadratic,
};

// Config names: ce, rce, cce, quad.
std::string_view to_string(XentKind kind);
std::optional<XentKind> parse_xent_kind(std::string_view name);

ExtReal xent_value(XentKind kind, std::span<const double> y, std::span<const double> sigma);

// Same as xent_value but with every ln argument clamped to kLogClamp; used
// when evaluating losses so they stay finite.
double xent_loss(XentKind kind, std::span<const double> y, std::span<const double> sigma);

struct XentGradient {
  std::vector<double> dy;
  std::vector<double> dsigma;
};

// Throws DivergenceError at divergent points.
XentGradient xent_grad(XentKind kind, std::span<const double> y, std::span<const double> sigma);

// In-place accumulation of scale * gradient; either output may be empty.
// Returns false (and adds nothing) at a divergent point.
bool xent_accumulate(XentKind kind, std::span<const double> y, std::span<const double> sigma,
                     double scale, std::span<double> dy, std::span<double> dsigma);

// Adds scale * d xent_loss(y, softmax(l)) / dl to `logit_grad`, where sigma is
// softmax(l), and returns xent_loss(y, sigma). The gradient is that of the
// clamped loss, so it stays finite when softmax underflows.
double xent_loss_logit_grad(XentKind kind, std::span<const double> y,
                            std::span<const double> sigma, double scale,
                            std::span<double> logit_grad);

// eta * uniform + (1 - eta) * y for a one-hot y.
Distribution corrupted_target(const Distribution& y, double eta);

}  // namespace potts_sl

#endif  // POTTS_SL_DATA_TERMS_HPP_
