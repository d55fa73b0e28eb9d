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

#include "potts_sl/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "potts_sl/error.hpp"

namespace potts_sl {

namespace {

void check_dims(int height, int width, int classes) {
  if (height <= 0 || width <= 0) {
    throw DataError("field dimensions must be positive");
  }
  if (classes < 2) {
    throw DataError("need at least two classes");
  }
}

// Validates and renormalizes in place. Returns false when the point is not
// within tolerance of the simplex.
bool normalize_in_place(std::span<double> p, double tolerance, bool renormalize) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) return false;
  if (renormalize) {
    for (double& v : p) v /= sum;
  }
  return true;
}

}  // namespace

double ExtReal::value() const {
  if (divergent_) throw DivergenceError("value is divergent (log of zero)");
  return value_;
}

Distribution Distribution::from_probs(std::vector<double> probs) {
  if (probs.size() < 2) throw DataError("distribution needs at least two classes");
  if (!normalize_in_place(probs, kSimplexTolerance, true)) {
    throw DataError("values do not lie on the probability simplex");
  }
  return Distribution(std::move(probs));
}

Distribution Distribution::uniform(int classes) {
  if (classes < 2) throw DataError("distribution needs at least two classes");
  return Distribution(std::vector<double>(static_cast<std::size_t>(classes),
                                          1.0 / classes));
}

Distribution Distribution::one_hot(int k, int classes) {
  if (classes < 2) throw DataError("distribution needs at least two classes");
  if (k < 0 || k >= classes) {
    std::ostringstream os;
    os << "class index " << k << " out of range for " << classes << " classes";
    throw DataError(os.str());
  }
  std::vector<double> probs(static_cast<std::size_t>(classes), 0.0);
  probs[static_cast<std::size_t>(k)] = 1.0;
  return Distribution(std::move(probs));
}

void softmax_into(std::span<const double> logits, std::span<double> out) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
}

Distribution softmax(std::span<const double> logits) {
  if (logits.size() < 2) throw DataError("softmax needs at least two logits");
  for (double l : logits) {
    if (!std::isfinite(l)) throw DataError("softmax of non-finite logits");
  }
  std::vector<double> out(logits.size());
  softmax_into(logits, out);
  return Distribution::from_probs(std::move(out));
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

ExtReal cross_entropy(std::span<const double> p, std::span<const double> q) {
  double h = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] <= kLogClamp) return ExtReal::divergent();
    h -= p[k] * std::log(q[k]);
  }
  return ExtReal::finite(h);
}

double kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("kl: class count mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] <= 0.0) {
      throw DivergenceError("kl: q has no support where p is positive");
    }
    d += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(d, 0.0);
}

int argmax(std::span<const double> v) {
  int best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

bool is_on_simplex(std::span<const double> p, double tolerance) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

ProbField ProbField::uniform(int height, int width, int classes) {
  check_dims(height, width, classes);
  const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                        static_cast<std::size_t>(classes);
  return ProbField(height, width, classes, std::vector<double>(n, 1.0 / classes));
}

namespace {

std::vector<double> validated_values(int height, int width, int classes,
                                     std::vector<double> values, double tolerance,
                                     bool renormalize) {
  check_dims(height, width, classes);
  const std::size_t k = static_cast<std::size_t>(classes);
  const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (values.size() != n * k) throw DataError("field value count does not match dimensions");
  for (std::size_t i = 0; i < n; ++i) {
    if (!normalize_in_place(std::span<double>(values).subspan(i * k, k), tolerance,
                            renormalize)) {
      std::ostringstream os;
      os << "pixel " << i << " is not on the probability simplex";
      throw DataError(os.str());
    }
  }
  return values;
}

}  // namespace

ProbField ProbField::from_values(int height, int width, int classes,
                                 std::vector<double> values) {
  auto v = validated_values(height, width, classes, std::move(values),
                            kSimplexTolerance, true);
  return ProbField(height, width, classes, std::move(v));
}

ProbField ProbField::from_values_exact(int height, int width, int classes,
                                       std::vector<double> values, double tolerance) {
  auto v = validated_values(height, width, classes, std::move(values), tolerance, false);
  return ProbField(height, width, classes, std::move(v));
}

ProbField ProbField::from_labels(int height, int width, int classes,
                                 std::span<const int> labels) {
  check_dims(height, width, classes);
  const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (labels.size() != n) throw DataError("label count does not match dimensions");
  std::vector<double> values(n * static_cast<std::size_t>(classes), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw DataError("label out of range when building one-hot field");
    }
    values[i * static_cast<std::size_t>(classes) + static_cast<std::size_t>(labels[i])] = 1.0;
  }
  return ProbField(height, width, classes, std::move(values));
}

LogitField::LogitField(int height, int width, int classes)
    : height_(height), width_(width), classes_(classes) {
  check_dims(height, width, classes);
  values_.assign(pixel_count() * static_cast<std::size_t>(classes), 0.0);
}

LogitField LogitField::from_values(int height, int width, int classes,
                                   std::vector<double> values) {
  LogitField f(height, width, classes);
  if (values.size() != f.values_.size()) {
    throw DataError("logit value count does not match dimensions");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("logits must be finite");
  }
  f.values_ = std::move(values);
  return f;
}

LogitField LogitField::log_of(const ProbField& field) {
  std::vector<double> values(field.values().begin(), field.values().end());
  for (double& v : values) v = std::log(std::max(v, kLogClamp));
  return from_values(field.height(), field.width(), field.classes(), std::move(values));
}

ProbField LogitField::softmax() const {
  std::vector<double> out(values_.size());
  const std::size_t k = static_cast<std::size_t>(classes_);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    softmax_into(pixel(i), std::span<double>(out).subspan(i * k, k));
  }
  return ProbField::from_values(height_, width_, classes_, std::move(out));
}

ScribbleField::ScribbleField(int height, int width, int classes)
    : height_(height), width_(width), classes_(classes) {
  check_dims(height, width, classes);
  labels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
                 kUnlabeled);
}

ScribbleField ScribbleField::from_labels(int height, int width, int classes,
                                         std::vector<int> labels) {
  ScribbleField s(height, width, classes);
  if (labels.size() != s.labels_.size()) {
    throw DataError("scribble count does not match dimensions");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) s.set(i, labels[i]);
  return s;
}

void ScribbleField::set(std::size_t i, int label) {
  if (label != kUnlabeled && (label < 0 || label >= classes_)) {
    std::ostringstream os;
    os << "scribble class " << label << " out of range for " << classes_ << " classes";
    throw DataError(os.str());
  }
  labels_.at(i) = label;
}

std::size_t ScribbleField::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](int l) { return l != kUnlabeled; }));
}

double ScribbleField::labeled_fraction() const {
  return static_cast<double>(labeled_count()) / static_cast<double>(labels_.size());
}

std::vector<int> argmax_decode(const ProbField& field) {
  std::vector<int> out(field.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = argmax(field.pixel(i));
  return out;
}

}  // namespace potts_sl
