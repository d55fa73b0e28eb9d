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

#ifndef POTTS_SL_SIMPLEX_HPP_
#define POTTS_SL_SIMPLEX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace potts_sl {

// Allowed deviation of sum(p) from 1 when building a distribution.
inline constexpr double kSimplexTolerance = 1e-6;
// Arguments of ln at or below this value are treated as divergent.
inline constexpr double kLogClamp = 1e-12;
// Class index of a pixel without a scribble. Classes are 0-based in C++;
// on-disk label maps use 1-based values.
inline constexpr int kUnlabeled = -1;

// Extended real: either a finite value or a tagged divergence (a log of 0).
class ExtReal {
 public:
  static ExtReal finite(double v) { return ExtReal(v, false); }
  static ExtReal divergent() { return ExtReal(0.0, true); }

  bool is_divergent() const { return divergent_; }
  bool is_finite() const { return !divergent_; }
  // Throws DivergenceError when divergent.
  double value() const;
  double value_or(double fallback) const { return divergent_ ? fallback : value_; }

 private:
  ExtReal(double v, bool d) : value_(v), divergent_(d) {}
  double value_;
  bool divergent_;
};

// A point on the K-class probability simplex.
class Distribution {
 public:
  // Rejects negative entries, K < 2 and sums off by more than
  // kSimplexTolerance; renormalizes anything within tolerance.
  static Distribution from_probs(std::vector<double> probs);
  static Distribution uniform(int classes);
  static Distribution one_hot(int k, int classes);

  int classes() const { return static_cast<int>(probs_.size()); }
  double operator[](int k) const { return probs_[static_cast<std::size_t>(k)]; }
  std::span<const double> probs() const { return probs_; }
  operator std::span<const double>() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Numerically safe softmax (max-subtracted). `out` must match `logits` in size.
void softmax_into(std::span<const double> logits, std::span<double> out);
Distribution softmax(std::span<const double> logits);

// Shannon entropy; zero entries contribute zero.
double entropy(std::span<const double> p);
// Cross entropy -sum p ln q. Divergent when q_k <= kLogClamp where p_k > 0.
ExtReal cross_entropy(std::span<const double> p, std::span<const double> q);
// KL(p || q). Throws DivergenceError when q lacks support where p has it.
double kl(std::span<const double> p, std::span<const double> q);

// Index of the largest entry, ties toward the smallest index.
int argmax(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Validates p as a simplex point under kSimplexTolerance (no renormalizing).
bool is_on_simplex(std::span<const double> p, double tolerance = kSimplexTolerance);

class ProbField {
 public:
  static ProbField uniform(int height, int width, int classes);
  // Per-pixel validation as in Distribution::from_probs, row-major pixels,
  // classes innermost.
  static ProbField from_values(int height, int width, int classes,
                               std::vector<double> values);
  // Validates with a custom tolerance and keeps values unchanged.
  static ProbField from_values_exact(int height, int width, int classes,
                                     std::vector<double> values,
                                     double tolerance);
  static ProbField from_labels(int height, int width, int classes,
                               std::span<const int> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  int classes() const { return classes_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::span<const double> pixel(std::size_t i) const {
    return std::span<const double>(values_).subspan(
        i * static_cast<std::size_t>(classes_), static_cast<std::size_t>(classes_));
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ProbField&, const ProbField&) = default;

 private:
  ProbField(int h, int w, int k, std::vector<double> v)
      : height_(h), width_(w), classes_(k), values_(std::move(v)) {}
  int height_;
  int width_;
  int classes_;
  std::vector<double> values_;
};

class LogitField {
 public:
  LogitField(int height, int width, int classes);  // all zeros
  static LogitField from_values(int height, int width, int classes,
                                std::vector<double> values);
  // ln(max(p, kLogClamp)) per entry.
  static LogitField log_of(const ProbField& field);

  int height() const { return height_; }
  int width() const { return width_; }
  int classes() const { return classes_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::span<const double> pixel(std::size_t i) const {
    return std::span<const double>(values_).subspan(
        i * static_cast<std::size_t>(classes_), static_cast<std::size_t>(classes_));
  }
  std::span<const double> values() const { return values_; }

  ProbField softmax() const;

 private:
  int height_;
  int width_;
  int classes_;
  std::vector<double> values_;
};

class ScribbleField {
 public:
  ScribbleField(int height, int width, int classes);  // fully unlabeled
  // `labels` holds 0-based classes or kUnlabeled.
  static ScribbleField from_labels(int height, int width, int classes,
                                   std::vector<int> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  int classes() const { return classes_; }
  std::size_t pixel_count() const { return labels_.size(); }

  bool is_labeled(std::size_t i) const { return labels_[i] != kUnlabeled; }
  int label(std::size_t i) const { return labels_[i]; }
  void set(std::size_t i, int label);
  std::span<const int> labels() const { return labels_; }

  std::size_t labeled_count() const;
  double labeled_fraction() const;

  friend bool operator==(const ScribbleField&, const ScribbleField&) = default;

 private:
  int height_;
  int width_;
  int classes_;
  std::vector<int> labels_;
};

std::vector<int> argmax_decode(const ProbField& field);

}  // namespace potts_sl

#endif  // POTTS_SL_SIMPLEX_HPP_
