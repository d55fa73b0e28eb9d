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

#ifndef POTTS_SL_ORACLES_HPP_
#define POTTS_SL_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/data_terms.hpp"
#include "potts_sl/potts.hpp"
#include "potts_sl/simplex.hpp"

namespace potts_sl {

// ---------------------------------------------------------------------------
// Random walker

// Exact minimizer of
//   eta * sum_{i not in S} |y_i - sigma_i|^2 + lambda * sum_N w_ij |y_i - y_j|^2 / 2
// subject to y_i = one_hot(scribble_i) on S. This is the QUAD data term plus
// the Q relaxation, with the same factors as sl_loss. Per class it solves
//   (2 eta I + lambda L_UU) y_U = 2 eta sigma_U + lambda W_US ybar_S
// by Jacobi-preconditioned conjugate gradients.
//
// Returns values pixel-major (classes innermost), unclamped. Throws
// NumericError when the system is singular (eta == 0 and some unlabeled
// component has no weighted path to a scribble).
std::vector<double> random_walker_values(const ProbField& sigma, const ScribbleField& scribbles,
                                         const AffinityGraph& graph, double eta, double lambda);

// random_walker_values packaged as a field; entries within 1e-9 below zero are
// clamped, anything further out is a NumericError.
ProbField random_walker_solve(const ProbField& sigma, const ScribbleField& scribbles,
                              const AffinityGraph& graph, double eta, double lambda);

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Sparse symmetric matrix in compressed rows. Only what CG needs.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_start;  // rows + 1 entries
  std::vector<std::size_t> cols;
  std::vector<double> values;

  void multiply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> diagonal() const;
};

CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b,
                            double tolerance = 1e-10, int max_iterations = 0);

// ---------------------------------------------------------------------------
// Finite differences

inline constexpr double kFiniteDiffStep = 1e-5;

// Central differences of f at `point`, coordinate-wise, compared against
// `analytic`. Returns max_k |a_k - n_k| / max(|a_k|, |n_k|, kRelErrorFloor).
// Throws DivergenceError when f is non-finite inside the stencil.
double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> point, std::span<const double> analytic,
                         double step = kFiniteDiffStep);

inline constexpr double kRelErrorFloor = 1e-6;

struct GradCheckResult {
  std::string name;  // "potts:cd", "xent:rce", ...
  int pairs = 0;
  double max_error = 0.0;
};

// Names accepted by run_gradient_suite: "potts:<bl|q|nq|cce|cd|lq>",
// "xent:<ce|rce|cce|quad>", or "all".
std::vector<std::string> gradient_suite_names();

// Checks analytic gradients of each named kind at `pairs` random interior
// simplex pairs (class counts 2..6).
std::vector<GradCheckResult> run_gradient_suite(const std::vector<std::string>& names,
                                                int pairs = 100, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Discrete Potts

struct UnaryCosts {
  std::size_t pixels = 0;
  int classes = 0;
  std::vector<double> costs;  // pixel-major

  double at(std::size_t i, int k) const {
    return costs[i * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)];
  }
};

struct DiscreteSolution {
  std::vector<int> labels;
  double energy = 0.0;
};

inline constexpr std::size_t kBruteForceMaxPixels = 16;
inline constexpr int kBruteForceMaxClasses = 3;

// sum_i unary(i, l_i) + lambda * sum_N w_ij [l_i != l_j]
double discrete_energy(std::span<const int> labels, const UnaryCosts& unary,
                       const AffinityGraph& graph, double lambda);

// Global minimizer by enumeration of all K^N labelings; ties go to the
// lexicographically smallest labeling (pixel 0 most significant).
DiscreteSolution brute_force_discrete(const UnaryCosts& unary, const AffinityGraph& graph,
                                      double lambda);

}  // namespace potts_sl

#endif  // POTTS_SL_ORACLES_HPP_
