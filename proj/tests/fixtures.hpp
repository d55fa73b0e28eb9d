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

#ifndef POTTS_SL_TESTS_FIXTURES_HPP_
#define POTTS_SL_TESTS_FIXTURES_HPP_

// Synthetic instances shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/image.hpp"
#include "potts_sl/simplex.hpp"

namespace potts_sl::fixtures {

// Random point strictly inside the simplex.
inline std::vector<double> random_interior(std::mt19937_64& rng, int k, double floor = 0.02) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(k));
  double s = 0.0;
  for (double& v : p) {
    v = g(rng) + floor;
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

inline ProbField random_field(std::mt19937_64& rng, int h, int w, int k) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(h * w * k));
  for (int i = 0; i < h * w; ++i) {
    const auto p = random_interior(rng, k);
    v.insert(v.end(), p.begin(), p.end());
  }
  return ProbField::from_values(h, w, k, std::move(v));
}

// A segmentation instance: ground truth, an image whose colors follow it, a
// noisy prediction correlated with it, and sparse scribbles.
struct RegionInstance {
  int height = 0;
  int width = 0;
  int classes = 0;
  std::vector<int> truth;
  Image image{1, 1};
  ProbField sigma = ProbField::uniform(1, 1, 2);
  ScribbleField scribbles{1, 1, 2};
};

// Regions are the Voronoi cells of `classes` random sites (one per class).
// Colors are a per-class base plus N(0, color_noise) per channel. sigma is
// softmax(confidence * one_hot(truth) + N(0, 1)). Each pixel is scribbled
// with probability scribble_rate; every class gets at least one scribble.
inline RegionInstance make_region_instance(std::uint64_t seed, int h, int w, int k,
                                           double scribble_rate = 0.05,
                                           double color_noise = 6.0,
                                           double confidence = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  RegionInstance inst;
  inst.height = h;
  inst.width = w;
  inst.classes = k;

  std::vector<std::pair<double, double>> sites;
  for (int c = 0; c < k; ++c) sites.push_back({unit(rng) * h, unit(rng) * w});
  inst.truth.resize(static_cast<std::size_t>(h * w));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int best = 0;
      double best_d = 1e300;
      for (int s = 0; s < k; ++s) {
        const double d = (r - sites[s].first) * (r - sites[s].first) +
                         (c - sites[s].second) * (c - sites[s].second);
        if (d < best_d) {
          best_d = d;
          best = s;
        }
      }
      inst.truth[static_cast<std::size_t>(r * w + c)] = best;
    }
  }

  std::vector<std::array<double, 3>> base;
  for (int c = 0; c < k; ++c) base.push_back({40.0 + 170.0 * unit(rng), 40.0 + 170.0 * unit(rng),
                                              40.0 + 170.0 * unit(rng)});
  std::vector<Rgb> px(static_cast<std::size_t>(h * w));
  auto chan = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto& b = base[static_cast<std::size_t>(inst.truth[i])];
    px[i] = Rgb{chan(b[0] + color_noise * normal(rng)), chan(b[1] + color_noise * normal(rng)),
                chan(b[2] + color_noise * normal(rng))};
  }
  inst.image = Image(h, w, std::move(px));

  std::vector<double> logits(static_cast<std::size_t>(h * w * k));
  for (std::size_t i = 0; i < inst.truth.size(); ++i) {
    for (int c = 0; c < k; ++c) {
      logits[i * k + c] = (c == inst.truth[i] ? confidence : 0.0) + normal(rng);
    }
  }
  inst.sigma = LogitField::from_values(h, w, k, std::move(logits)).softmax();

  inst.scribbles = ScribbleField(h, w, k);
  for (std::size_t i = 0; i < inst.truth.size(); ++i) {
    if (unit(rng) < scribble_rate) inst.scribbles.set(i, inst.truth[i]);
  }
  for (int c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    bool has = false;
    for (std::size_t i = 0; i < inst.truth.size(); ++i) {
      if (inst.truth[i] != c) continue;
      members.push_back(i);
      has = has || inst.scribbles.is_labeled(i);
    }
    if (!has && !members.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      inst.scribbles.set(members[pick(rng)], c);
    }
  }
  return inst;
}

// 32x32 two-region image split along a sinusoidal boundary. Gray levels
// 113 and 143 with N(0, 4) noise per channel. Scribbles are two vertical
// strokes near the left and right edges (31 pixels, about 3%), so a model
// fitted to them alone draws a straight boundary.
struct TwoRegionInstance {
  Image image{1, 1};
  std::vector<int> truth;
  ScribbleField scribbles{1, 1, 2};
};

inline TwoRegionInstance make_two_region_instance(std::uint64_t seed) {
  constexpr int kSide = 32;
  const double pi = std::acos(-1.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 4.0);
  TwoRegionInstance inst;
  inst.truth.resize(kSide * kSide);
  std::vector<Rgb> px(kSide * kSide);
  for (int r = 0; r < kSide; ++r) {
    for (int c = 0; c < kSide; ++c) {
      const int t = c > 16 + 5.0 * std::sin(2.0 * pi * r / kSide) ? 1 : 0;
      const double base = t ? 143.0 : 113.0;
      auto chan = [&] {
        return static_cast<std::uint8_t>(std::clamp(std::lround(base + noise(rng)), 0L, 255L));
      };
      const auto i = static_cast<std::size_t>(r * kSide + c);
      inst.truth[i] = t;
      px[i] = Rgb{chan(), chan(), chan()};
    }
  }
  inst.image = Image(kSide, kSide, std::move(px));
  inst.scribbles = ScribbleField(kSide, kSide, 2);
  for (int r = 8; r < 24; ++r) inst.scribbles.set(static_cast<std::size_t>(r * kSide + 4), 0);
  for (int r = 8; r < 23; ++r) inst.scribbles.set(static_cast<std::size_t>(r * kSide + 27), 1);
  return inst;
}

}  // namespace potts_sl::fixtures

#endif  // POTTS_SL_TESTS_FIXTURES_HPP_
