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

#ifndef POTTS_SL_AFFINITY_HPP_
#define POTTS_SL_AFFINITY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "potts_sl/image.hpp"

namespace potts_sl {

enum class NeighborhoodKind {
  kNN4,             // 4-connected grid
  kSparseWindow,    // every pair within a Chebyshev radius, color kernel only
  kDenseTruncated,  // same window, color kernel times a spatial Gaussian
};

struct AffinityConfig {
  NeighborhoodKind kind = NeighborhoodKind::kNN4;
  int radius = 1;                   // window kinds only
  double spatial_bandwidth = 100.0;  // kDenseTruncated only
  double color_bandwidth = 9.0;

  void validate() const;
  // "nn4", "sparse:R" or "dense:R:GAMMA".
  std::string neighborhood_string() const;
};

// Parses the neighborhood part of a config ("nn4", "sparse:2", "dense:5:100")
// into `cfg`, leaving color_bandwidth alone.
void parse_neighborhood(const std::string& text, AffinityConfig& cfg);

struct Edge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted edges over row-major pixel ids, each stored once with
// i < j.
class AffinityGraph {
 public:
  AffinityGraph(std::size_t pixel_count, NeighborhoodKind kind, std::vector<Edge> edges);

  std::size_t pixel_count() const { return pixel_count_; }
  NeighborhoodKind kind() const { return kind_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

 private:
  std::size_t pixel_count_;
  NeighborhoodKind kind_;
  std::vector<Edge> edges_;
};

// exp(-|a - b|^2 / (2 beta^2)) on raw 0..255 channels.
double color_affinity(const Rgb& a, const Rgb& b, double color_bandwidth);

AffinityGraph build_graph(const Image& image, const AffinityConfig& cfg);

}  // namespace potts_sl

#endif  // POTTS_SL_AFFINITY_HPP_
