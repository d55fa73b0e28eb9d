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

#ifndef POTTS_SL_POTTS_HPP_
#define POTTS_SL_POTTS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/simplex.hpp"

namespace potts_sl {

// Pairwise relaxations of the Potts penalty [p != q] to simplex arguments.
//
//   BL   1 - p'q                      bilinear
//   Q    |p - q|^2 / 2                quadratic
//   NQ   1 - p'q / (|p||q|)           normalized quadratic
//   CCE  -ln p'q                      collision cross entropy
//   CD   -ln (p'q / (|p||q|))         collision divergence
//   LQ   -ln (1 - |p - q|^2 / 2)      log-quadratic
//
// The three log kinds diverge when their ln argument is <= kLogClamp, which
// on the simplex happens only for orthogonal one-hot pairs.
enum class PottsKind {
  kBilinear,
  kQuadratic,
  kNormalizedQuadratic,
  kCollisionCrossEntropy,
  kCollisionDivergence,
  kLogQuadratic,
};

inline constexpr std::array<PottsKind, 6> kAllPottsKinds = {
    PottsKind::kBilinear,
    PottsKind::kQuadratic,
    PottsKind::kNormalizedQuadratic,
    PottsKind::kCollisionCrossEntropy,
    PottsKind::kCollisionDivergence,
    PottsKind::kLogQuadratic,
};

// Short config names: bl, q, nq, cce, cd, lq.
std::string_view to_string(PottsKind kind);
std::optional<PottsKind> parse_potts_kind(std::string_view name);
bool is_log_based(PottsKind kind);

ExtReal potts_value(PottsKind kind, std::span<const double> p, std::span<const double> q);

struct PairGradient {
  std::vector<double> dp;
  std::vector<double> dq;
};

// Throws DivergenceError at divergent points.
PairGradient potts_grad(PottsKind kind, std::span<const double> p, std::span<const double> q);

// Adds scale * dP/dp to dp and scale * dP/dq to dq and returns the value.
// A divergent pair leaves dp, dq untouched and returns a divergent value.
ExtReal potts_accumulate(PottsKind kind, std::span<const double> p,
                         std::span<const double> q, double scale, std::span<double> dp,
                         std::span<double> dq);

struct PairwiseSum {
  double value = 0.0;                // sum over non-divergent edges of w * P
  std::size_t divergent_edges = 0;   // edges whose P diverged (excluded above)
};

// Sum over edges of w_ij * P(field_i, field_j). `values` is pixel-major with
// `classes` entries per pixel. When `grad` is non-empty it receives the
// accumulated gradient w.r.t. `values`.
PairwiseSum potts_sum(PottsKind kind, std::span<const double> values, int classes,
                      const AffinityGraph& graph, std::span<double> grad = {});

PairwiseSum potts_sum(PottsKind kind, const ProbField& field, const AffinityGraph& graph);

}  // namespace potts_sl

#endif  // POTTS_SL_POTTS_HPP_
