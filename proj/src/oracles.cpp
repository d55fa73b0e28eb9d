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

#include "potts_sl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "potts_sl/error.hpp"
#include "potts_sl/parallel.hpp"

namespace potts_sl {

void SparseMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t e = row_start[r]; e < row_start[r + 1]; ++e) s += values[e] * x[cols[e]];
    out[r] = s;
  }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t e = row_start[r]; e < row_start[r + 1]; ++e) {
      if (cols[e] == r) d[r] += values[e];
    }
  }
  return d;
}

CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b,
                            double tolerance, int max_iterations) {
  const std::size_t n = a.rows;
  if (max_iterations <= 0) max_iterations = static_cast<int>(10 * n + 100);
  CgResult out;
  out.x.assign(n, 0.0);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) return out;

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw NumericError("conjugate gradient: non-positive diagonal");
    d = 1.0 / d;
  }
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iterations; ++it) {
    const double r_norm = std::sqrt(dot(r, r));
    out.relative_residual = r_norm / b_norm;
    if (out.relative_residual <= tolerance) return out;
    a.multiply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw NumericError("conjugate gradient: matrix is not positive definite");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    out.iterations = it + 1;
  }
  out.relative_residual = std::sqrt(dot(r, r)) / b_norm;
  if (out.relative_residual > tolerance) {
    throw NumericError("conjugate gradient did not converge");
  }
  return out;
}

namespace {

// With eta == 0, every unlabeled component needs a weighted edge into S.
void check_solvable(const ScribbleField& scribbles, const AffinityGraph& graph, double eta,
                    double lambda) {
  const std::size_t n = scribbles.pixel_count();
  if (eta > 0.0) return;
  if (scribbles.labeled_count() == n) return;
  if (lambda <= 0.0) throw NumericError("random walker: singular system (eta = lambda = 0)");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> anchored(n, 0);
  for (const Edge& e : graph.edges()) {
    if (!(e.w > 0.0)) continue;
    const bool li = scribbles.is_labeled(e.i);
    const bool lj = scribbles.is_labeled(e.j);
    if (li && lj) continue;
    if (li) anchored[e.j] = 1;
    if (lj) anchored[e.i] = 1;
    if (!li && !lj) parent[find(e.i)] = find(e.j);
  }
  std::vector<char> root_anchored(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!scribbles.is_labeled(i) && anchored[i]) root_anchored[find(i)] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!scribbles.is_labeled(i) && !root_anchored[find(i)]) {
      throw NumericError("random walker: singular system (component without scribbles)");
    }
  }
}

}  // namespace

std::vector<double> random_walker_values(const ProbField& sigma, const ScribbleField& scribbles,
                                         const AffinityGraph& graph, double eta,
                                         double lambda) {
  if (sigma.height() != scribbles.height() || sigma.width() != scribbles.width()) {
    throw DataError("random walker: prediction and scribble dimensions disagree");
  }
  if (graph.pixel_count() != sigma.pixel_count()) {
    throw DataError("random walker: graph pixel count disagrees");
  }
  if (!(eta >= 0.0) || !(lambda >= 0.0)) throw UsageError("random walker: negative weight");
  check_solvable(scribbles, graph, eta, lambda);

  const std::size_t n = sigma.pixel_count();
  const auto k = static_cast<std::size_t>(sigma.classes());
  std::vector<double> out(n * k, 0.0);

  // Unknown index of each unlabeled pixel.
  std::vector<std::size_t> slot(n, SIZE_MAX);
  std::vector<std::size_t> pixel_of;
  for (std::size_t i = 0; i < n; ++i) {
    if (scribbles.is_labeled(i)) {
      out[i * k + static_cast<std::size_t>(scribbles.label(i))] = 1.0;
    } else {
      slot[i] = pixel_of.size();
      pixel_of.push_back(i);
    }
  }
  const std::size_t m = pixel_of.size();
  if (m == 0) return out;

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(m);
  std::vector<double> diag(m, 2.0 * eta);
  std::vector<double> rhs(m * k, 0.0);
  for (std::size_t u = 0; u < m; ++u) {
    const auto s = sigma.pixel(pixel_of[u]);
    for (std::size_t c = 0; c < k; ++c) rhs[c * m + u] = 2.0 * eta * s[c];
  }
  for (const Edge& e : graph.edges()) {
    const double a = lambda * e.w;
    const bool li = scribbles.is_labeled(e.i);
    const bool lj = scribbles.is_labeled(e.j);
    if (li && lj) continue;
    if (!li && !lj) {
      const std::size_t u = slot[e.i];
      const std::size_t v = slot[e.j];
      diag[u] += a;
      diag[v] += a;
      rows[u].push_back({v, -a});
      rows[v].push_back({u, -a});
    } else {
      const std::size_t u = li ? slot[e.j] : slot[e.i];
      const int label = li ? scribbles.label(e.i) : scribbles.label(e.j);
      diag[u] += a;
      rhs[static_cast<std::size_t>(label) * m + u] += a;
    }
  }

  SparseMatrix mat;
  mat.rows = m;
  mat.row_start.push_back(0);
  for (std::size_t u = 0; u < m; ++u) {
    mat.cols.push_back(u);
    mat.values.push_back(diag[u]);
    for (const auto& [v, a] : rows[u]) {
      mat.cols.push_back(v);
      mat.values.push_back(a);
    }
    mat.row_start.push_back(mat.cols.size());
  }

  std::vector<std::vector<double>> solutions(k);
  parallel_for(k, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      solutions[c] =
          conjugate_gradient(mat, std::span<const double>(rhs).subspan(c * m, m), 1e-10).x;
    }
  });
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t u = 0; u < m; ++u) out[pixel_of[u] * k + c] = solutions[c][u];
  }
  return out;
}

ProbField random_walker_solve(const ProbField& sigma, const ScribbleField& scribbles,
                              const AffinityGraph& graph, double eta, double lambda) {
  std::vector<double> values = random_walker_values(sigma, scribbles, graph, eta, lambda);
  for (double& v : values) {
    if (v < -1e-9 || v > 1.0 + 1e-9) {
      throw NumericError("random walker: solution left the simplex");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return ProbField::from_values(sigma.height(), sigma.width(), sigma.classes(),
                                std::move(values));
}

double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> point, std::span<const double> analytic,
                         double step) {
  if (point.size() != analytic.size()) {
    throw DataError("finite_diff_check: gradient size mismatch");
  }
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double fp = f(x);
    x[i] = saved - step;
    const double fm = f(x);
    x[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw DivergenceError("finite_diff_check: function diverges inside the stencil");
    }
    const double numeric = (fp - fm) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kRelErrorFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

std::vector<std::string> gradient_suite_names() {
  std::vector<std::string> names;
  for (PottsKind k : kAllPottsKinds) names.push_back("potts:" + std::string(to_string(k)));
  for (XentKind k : kAllXentKinds) names.push_back("xent:" + std::string(to_string(k)));
  return names;
}

namespace {

std::vector<double> random_interior(std::mt19937_64& rng, int classes) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(classes));
  double sum = 0.0;
  for (double& v : p) {
    v = gamma(rng) + 0.05;
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// Scalar function of the concatenated (first, second) argument vector.
using PairFn = std::function<double(std::span<const double>, std::span<const double>)>;
using PairGradFn = std::function<void(std::span<const double>, std::span<const double>,
                                      std::vector<double>&)>;

double check_pairs(const PairFn& value, const PairGradFn& grad, int pairs,
                   std::mt19937_64& rng) {
  std::uniform_int_distribution<int> classes(2, 6);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const int k = classes(rng);
    std::vector<double> point = random_interior(rng, k);
    const std::vector<double> second = random_interior(rng, k);
    point.insert(point.end(), second.begin(), second.end());
    const auto kk = static_cast<std::size_t>(k);
    std::vector<double> analytic;
    grad(std::span<const double>(point).first(kk), std::span<const double>(point).subspan(kk),
         analytic);
    auto f = [&](std::span<const double> x) { return value(x.first(kk), x.subspan(kk)); };
    worst = std::max(worst, finite_diff_check(f, point, analytic));
  }
  return worst;
}

}  // namespace

std::vector<GradCheckResult> run_gradient_suite(const std::vector<std::string>& names,
                                                int pairs, std::uint64_t seed) {
  std::vector<std::string> selected;
  for (const auto& name : names) {
    if (name == "all") {
      const auto all = gradient_suite_names();
      selected.insert(selected.end(), all.begin(), all.end());
    } else {
      const auto all = gradient_suite_names();
      if (std::find(all.begin(), all.end(), name) == all.end()) {
        throw UsageError("unknown gradient check kind: " + name);
      }
      selected.push_back(name);
    }
  }

  std::vector<GradCheckResult> results;
  for (const auto& name : selected) {
    std::mt19937_64 rng(seed);
    GradCheckResult r{name, pairs, 0.0};
    const std::string tag = name.substr(name.find(':') + 1);
    if (name.rfind("potts:", 0) == 0) {
      const PottsKind kind = *parse_potts_kind(tag);
      r.max_error = check_pairs(
          [kind](auto p, auto q) { return potts_value(kind, p, q).value_or(INFINITY); },
          [kind](auto p, auto q, std::vector<double>& out) {
            PairGradient g = potts_grad(kind, p, q);
            out = g.dp;
            out.insert(out.end(), g.dq.begin(), g.dq.end());
          },
          pairs, rng);
    } else {
      const XentKind kind = *parse_xent_kind(tag);
      r.max_error = check_pairs(
          [kind](auto y, auto s) { return xent_value(kind, y, s).value_or(INFINITY); },
          [kind](auto y, auto s, std::vector<double>& out) {
            XentGradient g = xent_grad(kind, y, s);
            out = g.dy;
            out.insert(out.end(), g.dsigma.begin(), g.dsigma.end());
          },
          pairs, rng);
    }
    results.push_back(r);
  }
  return results;
}

double discrete_energy(std::span<const int> labels, const UnaryCosts& unary,
                       const AffinityGraph& graph, double lambda) {
  if (labels.size() != unary.pixels || graph.pixel_count() != unary.pixels) {
    throw DataError("discrete_energy: size mismatch");
  }
  double e = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) e += unary.at(i, labels[i]);
  for (const Edge& edge : graph.edges()) {
    if (labels[edge.i] != labels[edge.j]) e += lambda * edge.w;
  }
  return e;
}

DiscreteSolution brute_force_discrete(const UnaryCosts& unary, const AffinityGraph& graph,
                                      double lambda) {
  if (unary.pixels > kBruteForceMaxPixels || unary.classes > kBruteForceMaxClasses) {
    std::ostringstream os;
    os << "brute force limited to " << kBruteForceMaxPixels << " pixels and "
       << kBruteForceMaxClasses << " classes";
    throw UsageError(os.str());
  }
  if (unary.classes < 1 || unary.costs.size() != unary.pixels * static_cast<std::size_t>(unary.classes)) {
    throw DataError("brute force: malformed unary costs");
  }
  if (graph.pixel_count() != unary.pixels) throw DataError("brute force: graph size mismatch");

  std::vector<int> labels(unary.pixels, 0);
  DiscreteSolution best{labels, discrete_energy(labels, unary, graph, lambda)};
  // Odometer with the last pixel fastest, so labelings come in lexicographic order.
  while (true) {
    std::size_t pos = unary.pixels;
    while (pos > 0) {
      --pos;
      if (++labels[pos] < unary.classes) break;
      labels[pos] = 0;
      if (pos == 0) return best;
    }
    if (unary.pixels == 0) return best;
    const double e = discrete_energy(labels, unary, graph, lambda);
    if (e < best.energy) best = {labels, e};
  }
}

}  // namespace potts_sl
