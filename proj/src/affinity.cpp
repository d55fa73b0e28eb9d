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

#include "potts_sl/affinity.hpp"

#include <cmath>
#include <sstream>

#include "potts_sl/error.hpp"
#include "potts_sl/parallel.hpp"

namespace potts_sl {

void AffinityConfig::validate() const {
  if (!(color_bandwidth > 0.0) || !std::isfinite(color_bandwidth)) {
    throw UsageError("color bandwidth must be positive");
  }
  if (kind != NeighborhoodKind::kNN4 && radius < 1) {
    throw UsageError("window radius must be at least 1");
  }
  if (kind == NeighborhoodKind::kDenseTruncated &&
      (!(spatial_bandwidth > 0.0) || !std::isfinite(spatial_bandwidth))) {
    throw UsageError("spatial bandwidth must be positive");
  }
}

std::string AffinityConfig::neighborhood_string() const {
  std::ostringstream os;
  switch (kind) {
    case NeighborhoodKind::kNN4:
      os << "nn4";
      break;
    case NeighborhoodKind::kSparseWindow:
      os << "sparse:" << radius;
      break;
    case NeighborhoodKind::kDenseTruncated:
      os << "dense:" << radius << ':' << spatial_bandwidth;
      break;
  }
  return os.str();
}

void parse_neighborhood(const std::string& text, AffinityConfig& cfg) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("bad neighborhood radius: " + text);
    return v;
  };
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("bad neighborhood bandwidth: " + text);
    return v;
  };
  AffinityConfig out = cfg;
  if (parts.size() == 1 && parts[0] == "nn4") {
    out.kind = NeighborhoodKind::kNN4;
    out.radius = 1;
  } else if (parts.size() == 2 && parts[0] == "sparse") {
    out.kind = NeighborhoodKind::kSparseWindow;
    out.radius = to_int(parts[1]);
  } else if (parts.size() == 3 && parts[0] == "dense") {
    out.kind = NeighborhoodKind::kDenseTruncated;
    out.radius = to_int(parts[1]);
    out.spatial_bandwidth = to_double(parts[2]);
  } else {
    throw UsageError("unknown neighborhood: " + text);
  }
  out.validate();
  cfg = out;
}

AffinityGraph::AffinityGraph(std::size_t pixel_count, NeighborhoodKind kind,
                             std::vector<Edge> edges)
    : pixel_count_(pixel_count), kind_(kind), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.i >= e.j) throw DataError("graph edges must satisfy i < j");
    if (e.j >= pixel_count_) throw DataError("graph edge refers to a missing pixel");
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw DataError("graph edge weights must be finite and non-negative");
    }
  }
}

double color_affinity(const Rgb& a, const Rgb& b, double color_bandwidth) {
  const double dr = static_cast<double>(a.r) - b.r;
  const double dg = static_cast<double>(a.g) - b.g;
  const double db = static_cast<double>(a.b) - b.b;
  return std::exp(-(dr * dr + dg * dg + db * db) /
                  (2.0 * color_bandwidth * color_bandwidth));
}

AffinityGraph build_graph(const Image& image, const AffinityConfig& cfg) {
  cfg.validate();
  const int h = image.height();
  const int w = image.width();
  const int r = cfg.kind == NeighborhoodKind::kNN4 ? 1 : cfg.radius;

  // Forward offsets only, so every pair is visited once with i < j.
  struct Offset {
    int dr;
    int dc;
  };
  std::vector<Offset> offsets;
  if (cfg.kind == NeighborhoodKind::kNN4) {
    offsets = {{0, 1}, {1, 0}};
  } else {
    for (int dr = 0; dr <= r; ++dr) {
      for (int dc = -r; dc <= r; ++dc) {
        if (dr == 0 && dc <= 0) continue;
        offsets.push_back({dr, dc});
      }
    }
  }

  const double gamma2 = 2.0 * cfg.spatial_bandwidth * cfg.spatial_bandwidth;
  std::vector<std::vector<Edge>> rows(static_cast<std::size_t>(h));
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      auto& out = rows[row];
      const int y = static_cast<int>(row);
      for (int x = 0; x < w; ++x) {
        const auto i = static_cast<std::uint32_t>(y * w + x);
        for (const Offset& o : offsets) {
          const int y2 = y + o.dr;
          const int x2 = x + o.dc;
          if (y2 >= h || x2 < 0 || x2 >= w) continue;
          const auto j = static_cast<std::uint32_t>(y2 * w + x2);
          double weight = color_affinity(image.at(y, x), image.at(y2, x2), cfg.color_bandwidth);
          if (cfg.kind == NeighborhoodKind::kDenseTruncated) {
            weight *= std::exp(-static_cast<double>(o.dr * o.dr + o.dc * o.dc) / gamma2);
          }
          out.push_back({i, j, weight});
        }
      }
    }
  });

  std::vector<Edge> edges;
  for (auto& row : rows) edges.insert(edges.end(), row.begin(), row.end());
  return AffinityGraph(image.pixel_count(), cfg.kind, std::move(edges));
}

}  // namespace potts_sl
