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

#include "potts_sl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "potts_sl/error.hpp"

namespace potts_sl {

void LossConfig::validate() const {
  if (!std::isfinite(eta) || eta < 0.0) throw UsageError("eta must be finite and >= 0");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw UsageError("lambda must be finite and >= 0");
  }
}

namespace {

void check_shapes(const ProbField& field, const ScribbleField& scribbles,
                  const AffinityGraph* graph) {
  if (field.height() != scribbles.height() || field.width() != scribbles.width()) {
    throw DataError("field and scribble dimensions disagree");
  }
  if (scribbles.classes() > field.classes()) {
    throw DataError("scribble classes exceed field classes");
  }
  if (graph != nullptr && graph->pixel_count() != field.pixel_count()) {
    throw DataError("field and graph pixel counts disagree");
  }
}

double scribble_nll(const ProbField& sigma, const ScribbleField& scribbles) {
  double nll = 0.0;
  for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) continue;
    const double p = sigma.pixel(i)[static_cast<std::size_t>(scribbles.label(i))];
    nll -= std::log(std::max(p, kLogClamp));
  }
  return nll;
}

}  // namespace

void check_scribble_constraint(const ProbField& y, const ScribbleField& scribbles) {
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) continue;
    const auto p = y.pixel(i);
    const int label = scribbles.label(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double target = static_cast<int>(k) == label ? 1.0 : 0.0;
      if (std::abs(p[k] - target) > kSimplexTolerance) {
        std::ostringstream os;
        os << "pseudo-label violates scribble constraint at pixel " << i;
        throw DataError(os.str());
      }
    }
  }
}

void softmax_backward(std::span<const double> p, std::span<const double> g,
                      std::span<double> out) {
  const double pg = dot(p, g);
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k] * (g[k] - pg);
}

LossBreakdown ws_loss(const ProbField& sigma, const ScribbleField& scribbles,
                      const AffinityGraph& graph, const LossConfig& cfg) {
  cfg.validate();
  check_shapes(sigma, scribbles, &graph);
  LossBreakdown out;
  out.scribble_nll = scribble_nll(sigma, scribbles);
  double h = 0.0;
  for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) h += entropy(sigma.pixel(i));
  }
  out.unlabeled = cfg.eta * h;
  const PairwiseSum pw = potts_sum(cfg.potts, sigma, graph);
  out.pairwise = cfg.lambda * pw.value;
  out.divergent_edges = pw.divergent_edges;
  return out;
}

LossBreakdown sl_loss(const ProbField& sigma, const ProbField& y,
                      const ScribbleField& scribbles, const AffinityGraph& graph,
                      const LossConfig& cfg) {
  cfg.validate();
  check_shapes(sigma, scribbles, &graph);
  if (y.height() != sigma.height() || y.width() != sigma.width() ||
      y.classes() != sigma.classes()) {
    throw DataError("prediction and pseudo-label dimensions disagree");
  }
  check_scribble_constraint(y, scribbles);
  LossBreakdown out;
  out.scribble_nll = scribble_nll(sigma, scribbles);
  double d = 0.0;
  for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) d += xent_loss(cfg.xent, y.pixel(i), sigma.pixel(i));
  }
  out.unlabeled = cfg.eta * d;
  const PairwiseSum pw = potts_sum(cfg.potts, y, graph);
  out.pairwise = cfg.lambda * pw.value;
  out.divergent_edges = pw.divergent_edges;
  return out;
}

double sl_prediction_terms(const ProbField& sigma, const ProbField& y,
                           const ScribbleField& scribbles, const LossConfig& cfg,
                           std::span<double> logit_grad) {
  check_shapes(sigma, scribbles, nullptr);
  const auto k = static_cast<std::size_t>(sigma.classes());
  const bool want_grad = !logit_grad.empty();
  if (want_grad && logit_grad.size() != sigma.values().size()) {
    throw DataError("gradient buffer size mismatch");
  }
  double value = 0.0;
  for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
    const auto s = sigma.pixel(i);
    if (scribbles.is_labeled(i)) {
      const auto label = static_cast<std::size_t>(scribbles.label(i));
      value -= std::log(std::max(s[label], kLogClamp));
      if (want_grad) {
        // d(-ln softmax_label)/dl = sigma - e_label
        for (std::size_t c = 0; c < k; ++c) {
          logit_grad[i * k + c] += s[c] - (c == label ? 1.0 : 0.0);
        }
      }
      continue;
    }
    if (cfg.eta == 0.0) continue;
    if (want_grad) {
      value += cfg.eta * xent_loss_logit_grad(cfg.xent, y.pixel(i), s, cfg.eta,
                                              logit_grad.subspan(i * k, k));
    } else {
      value += cfg.eta * xent_loss(cfg.xent, y.pixel(i), s);
    }
  }
  return value;
}

}  // namespace potts_sl
