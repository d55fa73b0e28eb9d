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

#include "potts_sl/solver.hpp"

#include <algorithm>
#include <cmath>

#include "potts_sl/error.hpp"
#include "potts_sl/potts.hpp"

namespace potts_sl {

void SolverConfig::validate() const {
  if (steps < 1) throw UsageError("solver steps must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("solver learning rate must be positive");
  }
}

namespace {

void check_inputs(const ProbField& sigma, const ScribbleField& scribbles,
                  const AffinityGraph& graph) {
  if (sigma.height() != scribbles.height() || sigma.width() != scribbles.width()) {
    throw DataError("prediction and scribble dimensions disagree");
  }
  if (scribbles.classes() > sigma.classes()) {
    throw DataError("scribble classes exceed prediction classes");
  }
  if (graph.pixel_count() != sigma.pixel_count()) {
    throw DataError("prediction and graph pixel counts disagree");
  }
}

void reset_scribbles(std::vector<double>& y, const ScribbleField& scribbles,
                     std::size_t classes) {
  for (std::size_t i = 0; i < scribbles.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) continue;
    auto p = std::span<double>(y).subspan(i * classes, classes);
    std::fill(p.begin(), p.end(), 0.0);
    p[static_cast<std::size_t>(scribbles.label(i))] = 1.0;
  }
}

}  // namespace

double pseudo_label_objective(const ProbField& sigma, const ProbField& y,
                              const ScribbleField& scribbles, const AffinityGraph& graph,
                              const LossConfig& cfg) {
  check_inputs(sigma, scribbles, graph);
  double data = 0.0;
  for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
    if (!scribbles.is_labeled(i)) data += xent_loss(cfg.xent, y.pixel(i), sigma.pixel(i));
  }
  return cfg.eta * data + cfg.lambda * potts_sum(cfg.potts, y, graph).value;
}

SolveResult solve_pseudo_labels(const ProbField& sigma, const LogitField& init_logits,
                                const ScribbleField& scribbles, const AffinityGraph& graph,
                                const LossConfig& loss_cfg, const SolverConfig& solver_cfg) {
  loss_cfg.validate();
  solver_cfg.validate();
  check_inputs(sigma, scribbles, graph);
  if (init_logits.height() != sigma.height() || init_logits.width() != sigma.width() ||
      init_logits.classes() != sigma.classes()) {
    throw DataError("initial logits and prediction dimensions disagree");
  }

  const auto k = static_cast<std::size_t>(sigma.classes());
  const std::size_t n = sigma.pixel_count();

  // The data term sees sigma with clamped entries so ln(sigma) stays finite.
  std::vector<double> sig(sigma.values().begin(), sigma.values().end());
  for (double& v : sig) v = std::max(v, kLogClamp);

  std::vector<double> logits(init_logits.values().begin(), init_logits.values().end());
  std::vector<double> y(n * k);
  std::vector<double> grad_y(n * k);
  std::vector<double> grad_pw(n * k);
  std::vector<double> grad_l(k);

  SolveReport report;
  report.objective_trace.reserve(static_cast<std::size_t>(solver_cfg.steps) + 1);

  for (int step = 0; step <= solver_cfg.steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      softmax_into(std::span<const double>(logits).subspan(i * k, k),
                   std::span<double>(y).subspan(i * k, k));
    }
    reset_scribbles(y, scribbles, k);

    std::fill(grad_y.begin(), grad_y.end(), 0.0);
    std::fill(grad_pw.begin(), grad_pw.end(), 0.0);
    double data = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (scribbles.is_labeled(i)) continue;
      const auto yi = std::span<const double>(y).subspan(i * k, k);
      const auto si = std::span<const double>(sig).subspan(i * k, k);
      data += xent_loss(loss_cfg.xent, yi, si);
      if (!xent_accumulate(loss_cfg.xent, yi, si, loss_cfg.eta,
                           std::span<double>(grad_y).subspan(i * k, k), {})) {
        ++report.divergent_encounters;
      }
    }
    const PairwiseSum pw = potts_sum(loss_cfg.potts, y, static_cast<int>(k), graph, grad_pw);
    report.divergent_encounters += pw.divergent_edges;
    const double objective = loss_cfg.eta * data + loss_cfg.lambda * pw.value;
    if (!std::isfinite(objective)) throw NumericError("pseudo-label objective is not finite");
    report.objective_trace.push_back(objective);
    if (step == solver_cfg.steps) break;

    for (std::size_t i = 0; i < n; ++i) {
      if (scribbles.is_labeled(i)) continue;
      for (std::size_t c = 0; c < k; ++c) {
        grad_y[i * k + c] += loss_cfg.lambda * grad_pw[i * k + c];
      }
      softmax_backward(std::span<const double>(y).subspan(i * k, k),
                       std::span<const double>(grad_y).subspan(i * k, k), grad_l);
      for (std::size_t c = 0; c < k; ++c) {
        logits[i * k + c] -= solver_cfg.learning_rate * grad_l[c];
      }
    }
  }

  report.final_objective = report.objective_trace.back();
  // Softmax output is normalized to rounding; keep it bit-for-bit.
  return SolveResult{ProbField::from_values_exact(sigma.height(), sigma.width(),
                                                  sigma.classes(), std::move(y),
                                                  kSimplexTolerance),
                     std::move(report)};
}

SolveResult solve_pseudo_labels(const ProbField& sigma, const ScribbleField& scribbles,
                                const AffinityGraph& graph, const LossConfig& loss_cfg,
                                const SolverConfig& solver_cfg) {
  LogitField init(sigma.height(), sigma.width(), sigma.classes());
  switch (solver_cfg.init) {
    case SolverInit::kFromLogits:
      init = LogitField::log_of(sigma);
      break;
    case SolverInit::kUniform:
      break;
    case SolverInit::kOneHotArgmax: {
      const auto k = static_cast<std::size_t>(sigma.classes());
      std::vector<double> values(sigma.pixel_count() * k, 0.0);
      for (std::size_t i = 0; i < sigma.pixel_count(); ++i) {
        values[i * k + static_cast<std::size_t>(argmax(sigma.pixel(i)))] = kOneHotInitMargin;
      }
      init = LogitField::from_values(sigma.height(), sigma.width(), sigma.classes(),
                                     std::move(values));
      break;
    }
  }
  return solve_pseudo_labels(sigma, init, scribbles, graph, loss_cfg, solver_cfg);
}

double soft_jaccard(const ProbField& a, const ProbField& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.classes() != b.classes()) {
    throw DataError("soft_jaccard: dimension mismatch");
  }
  const auto k = static_cast<std::size_t>(a.classes());
  std::vector<double> lo(k, 0.0);
  std::vector<double> hi(k, 0.0);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    const auto pa = a.pixel(i);
    const auto pb = b.pixel(i);
    for (std::size_t c = 0; c < k; ++c) {
      lo[c] += std::min(pa[c], pb[c]);
      hi[c] += std::max(pa[c], pb[c]);
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += hi[c] > 0.0 ? lo[c] / hi[c] : 1.0;
  return sum / static_cast<double>(k);
}

}  // namespace potts_sl
