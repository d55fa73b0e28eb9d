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

#ifndef POTTS_SL_TRAINER_HPP_
#define POTTS_SL_TRAINER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/data_terms.hpp"
#include "potts_sl/image.hpp"
#include "potts_sl/losses.hpp"
#include "potts_sl/simplex.hpp"
#include "potts_sl/solver.hpp"

namespace potts_sl {

// Pixelwise linear-softmax classifier over phi(i) = (R, G, B in [0, 1],
// col / W, row / H). Stands in for a segmentation network.
struct PixelModel {
  static constexpr int kFeatures = 5;

  int classes = 0;
  std::vector<double> weights;  // classes x kFeatures, row-major
  std::vector<double> bias;     // classes

  static PixelModel zeros(int classes);
  // Weights ~ N(0, scale^2), zero bias.
  static PixelModel random(int classes, std::uint64_t seed, double scale = 0.01);

  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

std::array<double, PixelModel::kFeatures> pixel_features(const Image& image, std::size_t i);

struct Prediction {
  LogitField logits;
  ProbField probs;
};

Prediction predict(const PixelModel& model, const Image& image);

// Gradient of a loss w.r.t. the model, given its gradient w.r.t. the logits.
PixelModel logit_grad_to_model_grad(const PixelModel& model, const Image& image,
                                    std::span<const double> logit_grad);

struct TrainConfig {
  int rounds = 10;
  int inner_epochs = 20;
  double step_size = 1.0;  // initial trial step of each backtracking search
  int pretrain_epochs = 200;
  LossConfig loss;
  SolverConfig solver;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PretrainResult {
  PixelModel model;
  std::vector<double> nll_trace;  // epoch 0 (initial) .. pretrain_epochs
  std::vector<std::string> warnings;
};

// Full-batch gradient descent with backtracking on the scribble NLL.
PretrainResult pretrain(const PixelModel& model, const Image& image,
                        const ScribbleField& scribbles, const TrainConfig& cfg);

struct AlternationResult {
  PixelModel model;
  ProbField pseudo_labels;
  std::vector<double> joint_loss_trace;  // sl_loss after each round
  int kept_previous_labels = 0;          // rounds where the new y scored worse
};

// Block-coordinate descent on sl_loss: each round solves for pseudo-labels
// with sigma fixed (kept only if they lower the objective), then runs
// inner_epochs of backtracking gradient descent on the model with y fixed.
AlternationResult alternate(const PixelModel& model, const Image& image,
                            const ScribbleField& scribbles, const AffinityGraph& graph,
                            const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Label-corruption robustness experiment

struct ClassificationDataset {
  int classes = 0;
  int dims = 0;
  std::vector<double> train_x;  // n x dims
  std::vector<int> train_y;
  std::vector<double> test_x;
  std::vector<int> test_y;
};

struct BlobConfig {
  int classes = 3;
  int dims = 20;             // the first two carry the class signal
  int train_per_class = 200;
  int test_per_class = 200;
  double separation = 2.0;   // center distance from the origin
  double noise = 1.0;        // per-coordinate standard deviation
};

ClassificationDataset make_blob_dataset(const BlobConfig& cfg, std::uint64_t seed);

struct CorruptionConfig {
  std::vector<double> levels = {0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<XentKind> kinds = {XentKind::kCrossEntropy, XentKind::kReverseCrossEntropy,
                                 XentKind::kCollisionCrossEntropy};
  int epochs = 100;
  double step_size = 1.0;
};

struct CorruptionRow {
  double eta = 0.0;
  XentKind kind = XentKind::kCrossEntropy;
  double accuracy = 0.0;  // fraction of the clean test set
};

// For each level eta, replaces the labels of a random eta-fraction of the
// training set by uniform random classes, trains a linear-softmax classifier
// against eta * uniform + (1 - eta) * one_hot(observed) with each kind, and
// reports test accuracy.
std::vector<CorruptionRow> corruption_experiment(const ClassificationDataset& data,
                                                 const CorruptionConfig& cfg,
                                                 std::uint64_t seed);

// Default blobs dataset and corruption levels, all randomness derived from
// `seed`.
std::vector<CorruptionRow> corruption_benchmark(std::uint64_t seed);

}  // namespace potts_sl

#endif  // POTTS_SL_TRAINER_HPP_
