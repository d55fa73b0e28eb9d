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

#ifndef POTTS_SL_SOLVER_HPP_
#define POTTS_SL_SOLVER_HPP_

#include <cstddef>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/losses.hpp"
#include "potts_sl/simplex.hpp"

namespace potts_sl {

enum class SolverInit {
  kFromLogits,    // supplied logits, or ln(sigma) when none are supplied
  kUniform,       // zero logits
  kOneHotArgmax,  // kOneHotInitMargin on argmax(sigma), zero elsewhere
};

inline constexpr double kOneHotInitMargin = 4.0;

struct SolverConfig {
  int steps = 200;
  double learning_rate = 0.075;
  SolverInit init = SolverInit::kFromLogits;

  void validate() const;
};

struct SolveReport {
  std::vector<double> objective_trace;  // steps + 1 entries
  double final_objective = 0.0;
  std::size_t divergent_encounters = 0;  // divergent terms skipped, summed over steps
};

struct SolveResult {
  ProbField labels;
  SolveReport report;
};

// Pseudo-label objective for fixed sigma:
//   eta * sum_{i not in S} xent(y_i, sigma_i) + lambda * sum_N w_ij P(y_i, y_j)
// with clamped logarithms in the data term and divergent edges skipped.
double pseudo_label_objective(const ProbField& sigma, const ProbField& y,
                              const ScribbleField& scribbles, const AffinityGraph& graph,
                              const LossConfig& cfg);

// Minimizes the pseudo-label objective by plain gradient descent on logits
// l with y = softmax(l). Every step first resets scribbled pixels of y to their
// ground-truth one-hots, then evaluates objective and gradient, then takes a
// fixed step on l. The returned labels carry the reset as well.
SolveResult solve_pseudo_labels(const ProbField& sigma, const LogitField& init_logits,
                                const ScribbleField& scribbles, const AffinityGraph& graph,
                                const LossConfig& loss_cfg, const SolverConfig& solver_cfg);

// Same, deriving the initial logits from sigma as selected by solver_cfg.init.
SolveResult solve_pseudo_labels(const ProbField& sigma, const ScribbleField& scribbles,
                                const AffinityGraph& graph, const LossConfig& loss_cfg,
                                const SolverConfig& solver_cfg);

// Mean over classes of sum_i min(a, b) / sum_i max(a, b). A class that is zero
// everywhere in both fields counts as a perfect match.
double soft_jaccard(const ProbField& a, const ProbField& b);

}  // namespace potts_sl

#endif  // POTTS_SL_SOLVER_HPP_
