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

#ifndef POTTS_SL_IO_HPP_
#define POTTS_SL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/image.hpp"
#include "potts_sl/losses.hpp"
#include "potts_sl/simplex.hpp"
#include "potts_sl/solver.hpp"
#include "potts_sl/trainer.hpp"

namespace potts_sl {

// On-disk label maps store class k (0-based in memory) as k + 1; this value
// marks an unlabeled or ignored pixel.
inline constexpr std::uint8_t kIgnoreValue = 255;

// Binary PPM (P6, maxval 255).
Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);

// Binary PGM (P5, maxval 255) with values 1..classes or 255. Anything else is
// a DataError("illegal scribble value ...").
ScribbleField read_scribbles(const std::filesystem::path& path, int classes);

// Raw per-pixel classes (kUnlabeled for 255), without a class bound beyond
// the 8-bit range. Used for ground truth and decoded predictions.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int> labels;
};
LabelMap read_label_map(const std::filesystem::path& path);
// Writes labels (0-based, kUnlabeled allowed) as a P5 file.
void write_label_map(int height, int width, std::span<const int> labels,
                     const std::filesystem::path& path);

// PFLD: "PFLD", u32 LE height, width, classes, then float32 LE values,
// pixel-major. Reading validates each pixel against the simplex with a
// float32-aware tolerance and keeps the stored values as they are.
void write_probfield(const ProbField& field, const std::filesystem::path& path);
ProbField read_probfield(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_probfield(const ProbField& field);
ProbField decode_probfield(std::span<const std::uint8_t> bytes);

// First `classes` entries of the fixed 21-color table.
std::vector<Rgb> default_palette(int classes);

// Convex combination of palette colors, each channel rounded half up.
Image visualize(const ProbField& field, std::span<const Rgb> palette);

// Mean IoU over classes 0..classes-1 whose union is non-empty. Pixels with
// gt == kUnlabeled are ignored. Returns 0 when no class qualifies.
double miou(std::span<const int> pred, std::span<const int> gt, int classes);

// ---------------------------------------------------------------------------
// Config files

struct RunConfig {
  AffinityConfig affinity;
  LossConfig loss;
  SolverConfig solver;
  TrainConfig train;  // loss and solver are copied in by parse_config
  std::uint64_t seed = 0;
};

// `key = value` lines, `#` starts a comment. Keys: eta, lambda, potts, xent,
// neighborhood, color_bandwidth, steps, lr, rounds, seed. Unknown keys,
// repeated keys and malformed values are UsageErrors naming the line.
RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);

struct RunManifest {
  std::filesystem::path image;
  std::filesystem::path scribbles;
  std::optional<std::filesystem::path> sigma;
  std::optional<std::filesystem::path> ground_truth;
  std::filesystem::path out_dir;
  RunConfig config;

  // Inputs must exist (DataError); the output directory is created if needed
  // (DataError when that fails).
  void validate() const;
};

// Writes `text` to `path`, throwing DataError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace potts_sl

#endif  // POTTS_SL_IO_HPP_
