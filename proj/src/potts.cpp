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

#include "potts_sl/potts.hpp"

#include <cmath>

#include "potts_sl/error.hpp"

namespace potts_sl {

std::string_view to_string(PottsKind kind) {
  switch (kind) {
    case PottsKind::kBilinear: return "bl";
    case PottsKind::kQuadratic: return "q";
    case PottsKind::kNormalizedQuadratic: return "nq";
    case PottsKind::kCollisionCrossEntropy: return "cce";
    case PottsKind::kCollisionDivergence: return "cd";
    case PottsKind::kLogQuadratic: return "lq";
  }
  return "?";
}

std::optional<PottsKind> parse_potts_kind(std::string_view name) {
  for (PottsKind k : kAllPottsKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_log_based(PottsKind kind) {
  return kind == PottsKind::kCollisionCrossEntropy ||
         kind == PottsKind::kCollisionDivergence || kind == PottsKind::kLogQuadratic;
}

ExtReal potts_accumulate(PottsKind kind, std::span<const double> p,
                         std::span<const double> q, double scale, std::span<double> dp,
                         std::span<double> dq) {
  if (p.size() != q.size()) throw DataError("potts: class count mismatch");
  const std::size_t n = p.size();
  const bool want_grad = !dp.empty();

  switch (kind) {
    case PottsKind::kBilinear: {
      const double s = dot(p, q);
      if (want_grad) {
        for (std::size_t k = 0; k < n; ++k) {
          dp[k] -= scale * q[k];
          dq[k] -= scale * p[k];
        }
      }
      return ExtReal::finite(1.0 - s);
    }
    case PottsKind::kQuadratic: {
      if (want_grad) {
        for (std::size_t k = 0; k < n; ++k) {
          dp[k] += scale * (p[k] - q[k]);
          dq[k] += scale * (q[k] - p[k]);
        }
      }
      return ExtReal::finite(0.5 * squared_distance(p, q));
    }
    case PottsKind::kNormalizedQuadratic:
    case PottsKind::kCollisionDivergence: {
      const double s = dot(p, q);
      const double pp = dot(p, p);
      const double qq = dot(q, q);
      const double np = std::sqrt(pp);
      const double nq = std::sqrt(qq);
      const double c = s / (np * nq);
      if (kind == PottsKind::kNormalizedQuadratic) {
        if (want_grad) {
          // d(-c)/dp = -q/(|p||q|) + c p/|p|^2
          const double inv = 1.0 / (np * nq);
          for (std::size_t k = 0; k < n; ++k) {
            dp[k] += scale * (c * p[k] / pp - q[k] * inv);
            dq[k] += scale * (c * q[k] / qq - p[k] * inv);
          }
        }
        return ExtReal::finite(1.0 - c);
      }
      if (c <= kLogClamp) return ExtReal::divergent();
      if (want_grad) {
        // d(-ln c)/dp = -q/(p'q) + p/|p|^2
        for (std::size_t k = 0; k < n; ++k) {
          dp[k] += scale * (p[k] / pp - q[k] / s);
          dq[k] += scale * (q[k] / qq - p[k] / s);
        }
      }
      return ExtReal::finite(-std::log(c));
    }
    case PottsKind::kCollisionCrossEntropy: {
      const double s = dot(p, q);
      if (s <= kLogClamp) return ExtReal::divergent();
      if (want_grad) {
        for (std::size_t k = 0; k < n; ++k) {
          dp[k] -= scale * q[k] / s;
          dq[k] -= scale * p[k] / s;
        }
      }
      return ExtReal::finite(-std::log(s));
    }
    case PottsKind::kLogQuadratic: {
      const double a = 1.0 - 0.5 * squared_distance(p, q);
      if (a <= kLogClamp) return ExtReal::divergent();
      if (want_grad) {
        for (std::size_t k = 0; k < n; ++k) {
          const double d = (p[k] - q[k]) / a;
          dp[k] += scale * d;
          dq[k] -= scale * d;
        }
      }
      return ExtReal::finite(-std::log(a));
    }
  }
  throw UsageError("unknown Potts kind");
}

ExtReal potts_value(PottsKind kind, std::span<const double> p, std::span<const double> q) {
  return potts_accumulate(kind, p, q, 0.0, {}, {});
}

PairGradient potts_grad(PottsKind kind, std::span<const double> p, std::span<const double> q) {
  PairGradient g{std::vector<double>(p.size(), 0.0), std::vector<double>(q.size(), 0.0)};
  if (potts_accumulate(kind, p, q, 1.0, g.dp, g.dq).is_divergent()) {
    throw DivergenceError("potts gradient requested at a divergent point");
  }
  return g;
}

PairwiseSum potts_sum(PottsKind kind, std::span<const double> values, int classes,
                      const AffinityGraph& graph, std::span<double> grad) {
  const auto k = static_cast<std::size_t>(classes);
  if (values.size() != graph.pixel_count() * k) {
    throw DataError("field and graph pixel counts disagree");
  }
  if (!grad.empty() && grad.size() != values.size()) {
    throw DataError("gradient buffer size mismatch");
  }
  PairwiseSum out;
  for (const Edge& e : graph.edges()) {
    const auto p = values.subspan(e.i * k, k);
    const auto q = values.subspan(e.j * k, k);
    ExtReal v = grad.empty()
                    ? potts_value(kind, p, q)
                    : potts_accumulate(kind, p, q, e.w, grad.subspan(e.i * k, k),
                                       grad.subspan(e.j * k, k));
    if (v.is_divergent()) {
      ++out.divergent_edges;
    } else {
      out.value += e.w * v.value();
    }
  }
  return out;
}

PairwiseSum potts_sum(PottsKind kind, const ProbField& field, const AffinityGraph& graph) {
  return potts_sum(kind, field.values(), field.classes(), graph);
}

}  // namespace potts_sl
