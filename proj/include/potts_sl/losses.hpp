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

#ifndef POTTS_SL_LOSSES_HPP_
#define POTTS_SL_LOSSES_HPP_

#include <span>

#include "potts_sl/affinity.hpp"
#include "potts_sl/data_terms.hpp"
#include "potts_sl/potts.hpp"
#include "potts_sl/simplex.hpp"

namespace potts_sl {

struct LossConfig {
  double eta = 0.3;     // weight of the unlabeled-pixel term
  double lambda = 6.0;  // weight of the pairwise term
  PottsKind potts = PottsKind::kCollisionDivergence;
  XentKind xent = XentKind::kCollisionCrossEntropy;

  void validate() const;
};

// Terms of a loss, already weighted. Edges whose relaxation diverges are left
// out of `pairwise` and counted in `divergent_edges`.
struct LossBreakdown {
  double scribble_nll = 0.0;
  double unlabeled = 0.0;
  double pairwise = 0.0;
  std::size_t divergent_edges = 0;

  double total() const { return scribble_nll + unlabeled + pairwise; }
};

// Weakly supervised loss: scribble NLL + eta * entropy on unlabeled pixels
// + lambda * pairwise relaxation over all edges.
LossBreakdown ws_loss(const ProbField& sigma, const ScribbleField& scribbles,
                      const AffinityGraph& graph, const LossConfig& cfg);

// Joint self-labeling loss: scribble NLL + eta * xent(y, sigma) on unlabeled
// pixels + lambda * pairwise relaxation of y. Requires y to equal the scribble
// one-hots on labeled pixels (within kSimplexTolerance).
LossBreakdown sl_loss(const ProbField& sigma, const ProbField& y,
                      const ScribbleField& scribbles, const AffinityGraph& graph,
                      const LossConfig& cfg);

// Terms of sl_loss that depend on sigma (scribble NLL + eta * xent). When
// `logit_grad` is non-empty it receives the gradient w.r.t. the logits that
// produced sigma through softmax.
double sl_prediction_terms(const ProbField& sigma, const ProbField& y,
                           const ScribbleField& scribbles, const LossConfig& cfg,
                           std::span<double> logit_grad = {});

// Throws DataError if y disagrees with a scribble beyond kSimplexTolerance.
void check_scribble_constraint(const ProbField& y, const ScribbleField& scribbles);

// Back-propagates a distribution-space gradient g through p = softmax(l):
// out = p * (g - p'g).
void softmax_backward(std::span<const double> p, std::span<const double> g,
                      std::span<double> out);

}  // namespace potts_sl

#endif  // POTTS_SL_LOSSES_HPP_
