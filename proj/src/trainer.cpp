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

#include "potts_sl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "potts_sl/error.hpp"
#include "potts_sl/parallel.hpp"

namespace potts_sl {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;

// value(params, grad) returns the objective and, when grad is non-empty,
// writes its gradient there.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

// Full-batch gradient descent with Armijo backtracking. Returns the objective
// before the first epoch and after each one; never increases it.
std::vector<double> backtracking_descent(std::vector<double>& params, const Objective& value,
                                         int epochs, double step) {
  std::vector<double> grad(params.size());
  std::vector<double> trial(params.size());
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(epochs) + 1);
  double f = value(params, grad);
  trace.push_back(f);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double gg = dot(grad, grad);
    double t = step;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings && gg > 0.0; ++h, t *= 0.5) {
      for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] - t * grad[i];
      const double ft = value(trial, {});
      if (std::isfinite(ft) && ft <= f - kArmijo * t * gg) {
        params.swap(trial);
        f = value(params, grad);
        moved = true;
        break;
      }
    }
    trace.push_back(f);
    if (!moved) {
      // Stationary to working precision; the rest of the trace is flat.
      trace.resize(static_cast<std::size_t>(epochs) + 1, f);
      break;
    }
  }
  return trace;
}

std::vector<double> pack(const PixelModel& m) {
  std::vector<double> p = m.weights;
  p.insert(p.end(), m.bias.begin(), m.bias.end());
  return p;
}

PixelModel unpack(std::span<const double> p, int classes) {
  PixelModel m;
  m.classes = classes;
  const std::size_t nw = static_cast<std::size_t>(classes) * PixelModel::kFeatures;
  m.weights.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nw));
  m.bias.assign(p.begin() + static_cast<std::ptrdiff_t>(nw), p.end());
  return m;
}

void check_model(const PixelModel& m) {
  if (m.classes < 2) throw DataError("model needs at least two classes");
  if (m.weights.size() != static_cast<std::size_t>(m.classes) * PixelModel::kFeatures ||
      m.bias.size() != static_cast<std::size_t>(m.classes)) {
    throw DataError("model parameter shapes are inconsistent");
  }
  for (double v : m.weights) {
    if (!std::isfinite(v)) throw NumericError("model weights are not finite");
  }
  for (double v : m.bias) {
    if (!std::isfinite(v)) throw NumericError("model bias is not finite");
  }
}

void check_image_scribbles(const Image& image, const ScribbleField& scribbles, int classes) {
  if (image.height() != scribbles.height() || image.width() != scribbles.width()) {
    throw DataError("image and scribble dimensions disagree");
  }
  if (scribbles.classes() > classes) throw DataError("scribble classes exceed model classes");
}

}  // namespace

PixelModel PixelModel::zeros(int classes) {
  PixelModel m;
  m.classes = classes;
  m.weights.assign(static_cast<std::size_t>(classes) * kFeatures, 0.0);
  m.bias.assign(static_cast<std::size_t>(classes), 0.0);
  return m;
}

PixelModel PixelModel::random(int classes, std::uint64_t seed, double scale) {
  PixelModel m = zeros(classes);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& w : m.weights) w = normal(rng);
  return m;
}

std::array<double, PixelModel::kFeatures> pixel_features(const Image& image, std::size_t i) {
  const Rgb& c = image.at(i);
  const auto w = static_cast<std::size_t>(image.width());
  return {c.r / 255.0, c.g / 255.0, c.b / 255.0,
          static_cast<double>(i % w) / static_cast<double>(image.width()),
          static_cast<double>(i / w) / static_cast<double>(image.height())};
}

Prediction predict(const PixelModel& model, const Image& image) {
  check_model(model);
  const auto k = static_cast<std::size_t>(model.classes);
  const std::size_t n = image.pixel_count();
  std::vector<double> logits(n * k);
  std::vector<double> probs(n * k);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto phi = pixel_features(image, i);
      for (std::size_t c = 0; c < k; ++c) {
        double z = model.bias[c];
        for (std::size_t d = 0; d < PixelModel::kFeatures; ++d) {
          z += model.weights[c * PixelModel::kFeatures + d] * phi[d];
        }
        logits[i * k + c] = z;
      }
      softmax_into(std::span<const double>(logits).subspan(i * k, k),
                   std::span<double>(probs).subspan(i * k, k));
    }
  });
  return Prediction{
      LogitField::from_values(image.height(), image.width(), model.classes, std::move(logits)),
      ProbField::from_values_exact(image.height(), image.width(), model.classes,
                                   std::move(probs), kSimplexTolerance)};
}

PixelModel logit_grad_to_model_grad(const PixelModel& model, const Image& image,
                                    std::span<const double> logit_grad) {
  const auto k = static_cast<std::size_t>(model.classes);
  if (logit_grad.size() != image.pixel_count() * k) {
    throw DataError("logit gradient size mismatch");
  }
  PixelModel g = PixelModel::zeros(model.classes);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const auto phi = pixel_features(image, i);
    for (std::size_t c = 0; c < k; ++c) {
      const double gl = logit_grad[i * k + c];
      if (gl == 0.0) continue;
      g.bias[c] += gl;
      for (std::size_t d = 0; d < PixelModel::kFeatures; ++d) {
        g.weights[c * PixelModel::kFeatures + d] += gl * phi[d];
      }
    }
  }
  return g;
}

void TrainConfig::validate() const {
  if (rounds < 1 || inner_epochs < 1 || pretrain_epochs < 0) {
    throw UsageError("training counts must be positive");
  }
  if (!(step_size > 0.0)) throw UsageError("training step size must be positive");
  loss.validate();
  solver.validate();
}

PretrainResult pretrain(const PixelModel& model, const Image& image,
                        const ScribbleField& scribbles, const TrainConfig& cfg) {
  check_model(model);
  check_image_scribbles(image, scribbles, model.classes);
  PretrainResult out{model, {}, {}};
  if (scribbles.labeled_count() == 0) {
    out.warnings.push_back("no scribbles: model left unchanged");
    return out;
  }
  std::vector<int> seen(static_cast<std::size_t>(model.classes), 0);
  for (int l : scribbles.labels()) {
    if (l != kUnlabeled) seen[static_cast<std::size_t>(l)] = 1;
  }
  for (int c = 0; c < model.classes; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      std::ostringstream os;
      os << "class " << c + 1 << " has no scribbles";
      out.warnings.push_back(os.str());
    }
  }

  LossConfig nll_only = cfg.loss;
  nll_only.eta = 0.0;
  const int classes = model.classes;
  Objective nll = [&](std::span<const double> p, std::span<double> grad) {
    const PixelModel m = unpack(p, classes);
    const Prediction pred = predict(m, image);
    if (grad.empty()) return sl_prediction_terms(pred.probs, pred.probs, scribbles, nll_only);
    std::vector<double> lg(pred.probs.values().size(), 0.0);
    const double v = sl_prediction_terms(pred.probs, pred.probs, scribbles, nll_only, lg);
    const std::vector<double> g = pack(logit_grad_to_model_grad(m, image, lg));
    std::copy(g.begin(), g.end(), grad.begin());
    return v;
  };
  std::vector<double> params = pack(model);
  out.nll_trace = backtracking_descent(params, nll, cfg.pretrain_epochs, cfg.step_size);
  out.model = unpack(params, classes);
  return out;
}

AlternationResult alternate(const PixelModel& model, const Image& image,
                            const ScribbleField& scribbles, const AffinityGraph& graph,
                            const TrainConfig& cfg) {
  cfg.validate();
  check_model(model);
  check_image_scribbles(image, scribbles, model.classes);
  if (graph.pixel_count() != image.pixel_count()) {
    throw DataError("graph and image pixel counts disagree");
  }

  const int classes = model.classes;
  std::vector<double> params = pack(model);
  Prediction pred = predict(model, image);
  std::optional<ProbField> labels;
  AlternationResult out{model, pred.probs, {}, 0};

  for (int round = 0; round < cfg.rounds; ++round) {
    SolveResult solved = solve_pseudo_labels(pred.probs, pred.logits, scribbles, graph,
                                             cfg.loss, cfg.solver);
    if (labels) {
      const double previous =
          pseudo_label_objective(pred.probs, *labels, scribbles, graph, cfg.loss);
      if (solved.report.final_objective > previous) {
        ++out.kept_previous_labels;
      } else {
        labels = std::move(solved.labels);
      }
    } else {
      labels = std::move(solved.labels);
    }

    const ProbField& y = *labels;
    Objective model_terms = [&](std::span<const double> p, std::span<double> grad) {
      const PixelModel m = unpack(p, classes);
      const Prediction pr = predict(m, image);
      if (grad.empty()) return sl_prediction_terms(pr.probs, y, scribbles, cfg.loss);
      std::vector<double> lg(pr.probs.values().size(), 0.0);
      const double v = sl_prediction_terms(pr.probs, y, scribbles, cfg.loss, lg);
      const std::vector<double> g = pack(logit_grad_to_model_grad(m, image, lg));
      std::copy(g.begin(), g.end(), grad.begin());
      return v;
    };
    backtracking_descent(params, model_terms, cfg.inner_epochs, cfg.step_size);
    pred = predict(unpack(params, classes), image);
    out.joint_loss_trace.push_back(sl_loss(pred.probs, y, scribbles, graph, cfg.loss).total());
  }

  out.model = unpack(params, classes);
  out.pseudo_labels = std::move(*labels);
  return out;
}

ClassificationDataset make_blob_dataset(const BlobConfig& cfg, std::uint64_t seed) {
  if (cfg.classes < 2 || cfg.dims < 2 || cfg.train_per_class < 1 || cfg.test_per_class < 1) {
    throw UsageError("invalid blob dataset configuration");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, cfg.noise);
  const double pi = std::acos(-1.0);
  ClassificationDataset data;
  data.classes = cfg.classes;
  data.dims = cfg.dims;
  auto draw = [&](int per_class, std::vector<double>& xs, std::vector<int>& ys) {
    for (int c = 0; c < cfg.classes; ++c) {
      const double angle = 2.0 * pi * c / cfg.classes;
      for (int s = 0; s < per_class; ++s) {
        for (int d = 0; d < cfg.dims; ++d) {
          double center = 0.0;
          if (d == 0) center = cfg.separation * std::cos(angle);
          if (d == 1) center = cfg.separation * std::sin(angle);
          xs.push_back(center + normal(rng));
        }
        ys.push_back(c);
      }
    }
  };
  draw(cfg.train_per_class, data.train_x, data.train_y);
  draw(cfg.test_per_class, data.test_x, data.test_y);
  return data;
}

namespace {

// Linear softmax classifier trained with mean xent(kind; target, sigma).
std::vector<double> train_linear(const ClassificationDataset& data,
                                 const std::vector<double>& targets, XentKind kind,
                                 const CorruptionConfig& cfg) {
  const auto k = static_cast<std::size_t>(data.classes);
  const auto d = static_cast<std::size_t>(data.dims);
  const std::size_t n = data.train_y.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  Objective mean_loss = [&](std::span<const double> p, std::span<double> grad) {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> z(k);
    std::vector<double> s(k);
    std::vector<double> gl(k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = &data.train_x[i * d];
      for (std::size_t c = 0; c < k; ++c) {
        double v = p[k * d + c];
        for (std::size_t j = 0; j < d; ++j) v += p[c * d + j] * x[j];
        z[c] = v;
      }
      softmax_into(z, s);
      std::fill(gl.begin(), gl.end(), 0.0);
      const auto target = std::span<const double>(targets).subspan(i * k, k);
      total += xent_loss_logit_grad(kind, target, s, inv_n, gl);
      if (grad.empty()) continue;
      for (std::size_t c = 0; c < k; ++c) {
        grad[k * d + c] += gl[c];
        for (std::size_t j = 0; j < d; ++j) grad[c * d + j] += gl[c] * x[j];
      }
    }
    return total * inv_n;
  };
  std::vector<double> params(k * d + k, 0.0);
  backtracking_descent(params, mean_loss, cfg.epochs, cfg.step_size);
  return params;
}

double test_accuracy(const ClassificationDataset& data, const std::vector<double>& params) {
  const auto k = static_cast<std::size_t>(data.classes);
  const auto d = static_cast<std::size_t>(data.dims);
  std::size_t correct = 0;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < data.test_y.size(); ++i) {
    const double* x = &data.test_x[i * d];
    for (std::size_t c = 0; c < k; ++c) {
      double v = params[k * d + c];
      for (std::size_t j = 0; j < d; ++j) v += params[c * d + j] * x[j];
      z[c] = v;
    }
    if (argmax(z) == data.test_y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.test_y.size());
}

}  // namespace

std::vector<CorruptionRow> corruption_experiment(const ClassificationDataset& data,
                                                 const CorruptionConfig& cfg,
                                                 std::uint64_t seed) {
  if (data.train_y.empty() || data.test_y.empty()) throw DataError("empty dataset");
  const std::size_t n = data.train_y.size();
  const auto k = static_cast<std::size_t>(data.classes);
  std::vector<CorruptionRow> rows;
  std::mt19937_64 rng(seed);
  for (double eta : cfg.levels) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("corruption level must lie in [0, 1]");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> observed = data.train_y;
    const auto corrupt = static_cast<std::size_t>(std::llround(eta * static_cast<double>(n)));
    std::uniform_int_distribution<int> any_class(0, data.classes - 1);
    for (std::size_t t = 0; t < corrupt; ++t) observed[order[t]] = any_class(rng);

    std::vector<double> targets;
    targets.reserve(n * k);
    for (int label : observed) {
      const Distribution t = corrupted_target(Distribution::one_hot(label, data.classes), eta);
      targets.insert(targets.end(), t.probs().begin(), t.probs().end());
    }
    for (XentKind kind : cfg.kinds) {
      rows.push_back({eta, kind, test_accuracy(data, train_linear(data, targets, kind, cfg))});
    }
  }
  return rows;
}

std::vector<CorruptionRow> corruption_benchmark(std::uint64_t seed) {
  // Separate streams for the data draw and the corruption draw.
  constexpr std::uint64_t kCorruptionSalt = 0x9E3779B97F4A7C15ull;
  return corruption_experiment(make_blob_dataset(BlobConfig{}, seed), CorruptionConfig{},
                               seed ^ kCorruptionSalt);
}

}  // namespace potts_sl
