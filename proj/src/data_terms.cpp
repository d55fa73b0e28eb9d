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

#include "potts_sl/data_terms.hpp"

#include <algorithm>
#include <cmath>

#include "potts_sl/error.hpp"

namespace potts_sl {

std::string_view to_string(XentKind kind) {
  switch (kind) {
    case XentKind::kCrossEntropy: return "ce";
    case XentKind::kReverseCrossEntropy: return "rce";
    case XentKind::kCollisionCrossEntropy: return "cce";
    case XentKind::kQuadratic: return "quad";
  }
  return "?";
}

std::optional<XentKind> parse_xent_kind(std::string_view name) {
  for (XentKind k : kAllXentKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

double clamped_log(double x) { return std::log(std::max(x, kLogClamp)); }

}  // namespace

ExtReal xent_value(XentKind kind, std::span<const double> y, std::span<const double> sigma) {
  if (y.size() != sigma.size()) throw DataError("xent: class count mismatch");
  switch (kind) {
    case XentKind::kCrossEntropy:
      return cross_entropy(y, sigma);
    case XentKind::kReverseCrossEntropy:
      return cross_entropy(sigma, y);
    case XentKind::kCollisionCrossEntropy: {
      const double s = dot(sigma, y);
      if (s <= kLogClamp) return ExtReal::divergent();
      return ExtReal::finite(-std::log(s));
    }
    case XentKind::kQuadratic:
      return ExtReal::finite(squared_distance(y, sigma));
  }
  throw UsageError("unknown cross-entropy kind");
}

double xent_loss(XentKind kind, std::span<const double> y, std::span<const double> sigma) {
  if (y.size() != sigma.size()) throw DataError("xent: class count mismatch");
  double v = 0.0;
  switch (kind) {
    case XentKind::kCrossEntropy:
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] != 0.0) v -= y[k] * clamped_log(sigma[k]);
      }
      return v;
    case XentKind::kReverseCrossEntropy:
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (sigma[k] != 0.0) v -= sigma[k] * clamped_log(y[k]);
      }
      return v;
    case XentKind::kCollisionCrossEntropy:
      return -clamped_log(dot(sigma, y));
    case XentKind::kQuadratic:
      return squared_distance(y, sigma);
  }
  throw UsageError("unknown cross-entropy kind");
}

bool xent_accumulate(XentKind kind, std::span<const double> y, std::span<const double> sigma,
                     double scale, std::span<double> dy, std::span<double> dsigma) {
  const std::size_t n = y.size();
  switch (kind) {
    case XentKind::kCrossEntropy:
      for (std::size_t k = 0; k < n; ++k) {
        if (sigma[k] <= kLogClamp) return false;
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (!dy.empty()) dy[k] -= scale * std::log(sigma[k]);
        if (!dsigma.empty()) dsigma[k] -= scale * y[k] / sigma[k];
      }
      return true;
    case XentKind::kReverseCrossEntropy:
      for (std::size_t k = 0; k < n; ++k) {
        if (y[k] <= kLogClamp) return false;
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (!dy.empty()) dy[k] -= scale * sigma[k] / y[k];
        if (!dsigma.empty()) dsigma[k] -= scale * std::log(y[k]);
      }
      return true;
    case XentKind::kCollisionCrossEntropy: {
      const double s = dot(sigma, y);
      if (s <= kLogClamp) return false;
      for (std::size_t k = 0; k < n; ++k) {
        if (!dy.empty()) dy[k] -= scale * sigma[k] / s;
        if (!dsigma.empty()) dsigma[k] -= scale * y[k] / s;
      }
      return true;
    }
    case XentKind::kQuadratic:
      for (std::size_t k = 0; k < n; ++k) {
        const double d = 2.0 * (y[k] - sigma[k]);
        if (!dy.empty()) dy[k] += scale * d;
        if (!dsigma.empty()) dsigma[k] -= scale * d;
      }
      return true;
  }
  throw UsageError("unknown cross-entropy kind");
}

XentGradient xent_grad(XentKind kind, std::span<const double> y, std::span<const double> sigma) {
  if (y.size() != sigma.size()) throw DataError("xent: class count mismatch");
  XentGradient g{std::vector<double>(y.size(), 0.0), std::vector<double>(y.size(), 0.0)};
  if (!xent_accumulate(kind, y, sigma, 1.0, g.dy, g.dsigma)) {
    throw DivergenceError("cross-entropy gradient requested at a divergent point");
  }
  return g;
}

double xent_loss_logit_grad(XentKind kind, std::span<const double> y,
                            std::span<const double> sigma, double scale,
                            std::span<double> logit_grad) {
  const std::size_t n = y.size();
  const double value = xent_loss(kind, y, sigma);
  if (kind == XentKind::kCrossEntropy) {
    // softmax and ln cancel: d/dl = sigma - y (y sums to one)
    for (std::size_t k = 0; k < n; ++k) logit_grad[k] += scale * (sigma[k] - y[k]);
    return value;
  }
  std::vector<double> g(n);
  switch (kind) {
    case XentKind::kReverseCrossEntropy:
      for (std::size_t k = 0; k < n; ++k) g[k] = -std::log(std::max(y[k], kLogClamp));
      break;
    case XentKind::kCollisionCrossEntropy: {
      const double s = dot(sigma, y);
      for (std::size_t k = 0; k < n; ++k) g[k] = s > kLogClamp ? -y[k] / s : 0.0;
      break;
    }
    default:
      for (std::size_t k = 0; k < n; ++k) g[k] = -2.0 * (y[k] - sigma[k]);
      break;
  }
  const double sg = dot(sigma, g);
  for (std::size_t k = 0; k < n; ++k) logit_grad[k] += scale * sigma[k] * (g[k] - sg);
  return value;
}

Distribution corrupted_target(const Distribution& y, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("corruption level must lie in [0, 1]");
  const int k = y.classes();
  int hot = -1;
  for (int c = 0; c < k; ++c) {
    if (y[c] == 1.0) {
      hot = c;
    } else if (y[c] != 0.0) {
      hot = -2;
      break;
    }
  }
  if (hot < 0) throw DataError("corrupted_target expects a one-hot distribution");
  std::vector<double> out(static_cast<std::size_t>(k), eta / k);
  out[static_cast<std::size_t>(hot)] += 1.0 - eta;
  return Distribution::from_probs(std::move(out));
}

}  // namespace potts_sl
