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

#include "potts_sl/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "potts_sl/error.hpp"

namespace potts_sl {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

struct Netpbm {
  int width = 0;
  int height = 0;
  std::size_t data_offset = 0;
};

// Parses "Px W H 255" plus the single whitespace byte before the raster.
Netpbm parse_netpbm(std::span<const std::uint8_t> bytes, const char* magic,
                    const std::string& name) {
  if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1]) {
    throw DataError("malformed header in " + name + ": expected " + magic);
  }
  std::size_t pos = 2;
  auto next_int = [&]() {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw DataError("malformed header in " + name);
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 20) throw DataError("malformed header in " + name + ": value too large");
    }
    return static_cast<int>(v);
  };
  Netpbm h;
  h.width = next_int();
  h.height = next_int();
  const int maxval = next_int();
  if (h.width <= 0 || h.height <= 0) throw DataError("malformed header in " + name);
  if (maxval != 255) throw DataError("unsupported maxval in " + name + " (need 255)");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw DataError("malformed header in " + name);
  }
  h.data_offset = pos + 1;
  return h;
}

std::span<const std::uint8_t> raster(std::span<const std::uint8_t> bytes, const Netpbm& h,
                                     std::size_t channels, const std::string& name) {
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * channels;
  if (bytes.size() - h.data_offset < need) throw DataError("truncated raster in " + name);
  return bytes.subspan(h.data_offset, need);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

constexpr std::size_t kPfldHeader = 16;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const Netpbm h = parse_netpbm(bytes, "P6", path.string());
  const auto data = raster(bytes, h, 3, path.string());
  std::vector<Rgb> px(static_cast<std::size_t>(h.width) * h.height);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return Image(h.height, h.width, std::move(px));
}

void write_image(const Image& image, const std::filesystem::path& path) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (const Rgb& c : image.pixels()) {
    out.push_back(c.r);
    out.push_back(c.g);
    out.push_back(c.b);
  }
  write_bytes(path, out);
}

LabelMap read_label_map(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const Netpbm h = parse_netpbm(bytes, "P5", path.string());
  const auto data = raster(bytes, h, 1, path.string());
  LabelMap m{h.height, h.width, std::vector<int>(data.size())};
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == 0) {
      throw DataError("illegal scribble value 0 at pixel " + std::to_string(i) + " in " +
                      path.string());
    }
    m.labels[i] = data[i] == kIgnoreValue ? kUnlabeled : data[i] - 1;
  }
  return m;
}

ScribbleField read_scribbles(const std::filesystem::path& path, int classes) {
  LabelMap m = read_label_map(path);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (m.labels[i] >= classes) {
      throw DataError("illegal scribble value " + std::to_string(m.labels[i] + 1) +
                      " at pixel " + std::to_string(i) + " (classes = " +
                      std::to_string(classes) + ")");
    }
  }
  return ScribbleField::from_labels(m.height, m.width, classes, std::move(m.labels));
}

void write_label_map(int height, int width, std::span<const int> labels,
                     const std::filesystem::path& path) {
  if (height <= 0 || width <= 0 ||
      labels.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw DataError("label map size mismatch");
  }
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (int l : labels) {
    if (l == kUnlabeled) {
      out.push_back(kIgnoreValue);
    } else if (l >= 0 && l < kIgnoreValue - 1) {
      out.push_back(static_cast<std::uint8_t>(l + 1));
    } else {
      throw DataError("label out of range for PGM: " + std::to_string(l));
    }
  }
  write_bytes(path, out);
}

std::vector<std::uint8_t> encode_probfield(const ProbField& field) {
  std::vector<std::uint8_t> out{'P', 'F', 'L', 'D'};
  out.reserve(kPfldHeader + 4 * field.values().size());
  put_u32(out, static_cast<std::uint32_t>(field.height()));
  put_u32(out, static_cast<std::uint32_t>(field.width()));
  put_u32(out, static_cast<std::uint32_t>(field.classes()));
  for (double v : field.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

ProbField decode_probfield(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'P' || bytes[1] != 'F' || bytes[2] != 'L' ||
      bytes[3] != 'D') {
    throw DataError("PFLD magic mismatch");
  }
  if (bytes.size() < kPfldHeader) throw DataError("truncated PFLD header");
  const std::uint32_t h = get_u32(bytes, 4);
  const std::uint32_t w = get_u32(bytes, 8);
  const std::uint32_t k = get_u32(bytes, 12);
  if (h == 0 || w == 0 || k < 2 || h > (1u << 16) || w > (1u << 16) || k > 256) {
    throw DataError("implausible PFLD dimensions");
  }
  const std::size_t n = static_cast<std::size_t>(h) * w * k;
  if (bytes.size() - kPfldHeader < 4 * n) throw DataError("truncated PFLD payload");
  if (bytes.size() - kPfldHeader > 4 * n) throw DataError("trailing bytes after PFLD payload");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, kPfldHeader + 4 * i));
  }
  const double tol = std::max(kSimplexTolerance, static_cast<double>(k) * FLT_EPSILON);
  return ProbField::from_values_exact(static_cast<int>(h), static_cast<int>(w),
                                      static_cast<int>(k), std::move(values), tol);
}

void write_probfield(const ProbField& field, const std::filesystem::path& path) {
  write_bytes(path, encode_probfield(field));
}

ProbField read_probfield(const std::filesystem::path& path) {
  return decode_probfield(read_bytes(path));
}

std::vector<Rgb> default_palette(int classes) {
  // VOC-style color table.
  static constexpr Rgb kTable[21] = {
      {0, 0, 0},       {128, 0, 0},   {0, 128, 0},   {128, 128, 0},  {0, 0, 128},
      {128, 0, 128},   {0, 128, 128}, {128, 128, 128}, {64, 0, 0},   {192, 0, 0},
      {64, 128, 0},    {192, 128, 0}, {64, 0, 128},  {192, 0, 128},  {64, 128, 128},
      {192, 128, 128}, {0, 64, 0},    {128, 64, 0},  {0, 192, 0},    {128, 192, 0},
      {0, 64, 128}};
  if (classes < 1 || classes > 21) {
    throw UsageError("default palette covers 1..21 classes, got " + std::to_string(classes));
  }
  return std::vector<Rgb>(kTable, kTable + classes);
}

Image visualize(const ProbField& field, std::span<const Rgb> palette) {
  if (palette.size() != static_cast<std::size_t>(field.classes())) {
    throw DataError("palette length does not match class count");
  }
  auto channel = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(x + 0.5), 0.0, 255.0));
  };
  std::vector<Rgb> px(field.pixel_count());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto y = field.pixel(i);
    double r = 0.0, g = 0.0, b = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      r += y[k] * palette[k].r;
      g += y[k] * palette[k].g;
      b += y[k] * palette[k].b;
    }
    px[i] = Rgb{channel(r), channel(g), channel(b)};
  }
  return Image(field.height(), field.width(), std::move(px));
}

double miou(std::span<const int> pred, std::span<const int> gt, int classes) {
  if (pred.size() != gt.size()) throw DataError("miou: prediction and ground truth sizes differ");
  if (classes < 1) throw UsageError("miou: classes must be positive");
  std::vector<std::size_t> inter(static_cast<std::size_t>(classes), 0);
  std::vector<std::size_t> uni(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kUnlabeled) continue;
    const int g = gt[i];
    const int p = pred[i];
    if (g < 0 || g >= classes) throw DataError("miou: ground-truth class out of range");
    if (p < 0 || p >= classes) throw DataError("miou: predicted class out of range");
    if (p == g) {
      ++inter[static_cast<std::size_t>(g)];
      ++uni[static_cast<std::size_t>(g)];
    } else {
      ++uni[static_cast<std::size_t>(g)];
      ++uni[static_cast<std::size_t>(p)];
    }
  }
  double sum = 0.0;
  int counted = 0;
  for (std::size_t c = 0; c < uni.size(); ++c) {
    if (uni[c] == 0) continue;
    sum += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / counted;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw UsageError(where + "missing value for " + key);
    if (seen[key]++) throw UsageError(where + "repeated key " + key);

    auto as_double = [&]() {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || !std::isfinite(v)) {
        throw UsageError(where + "bad number for " + key + ": " + value);
      }
      return v;
    };
    auto as_int = [&]() {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size()) throw UsageError(where + "bad integer for " + key + ": " + value);
      return v;
    };

    if (key == "eta") {
      cfg.loss.eta = as_double();
    } else if (key == "lambda") {
      cfg.loss.lambda = as_double();
    } else if (key == "potts") {
      const auto k = parse_potts_kind(value);
      if (!k) throw UsageError(where + "unknown potts kind " + value);
      cfg.loss.potts = *k;
    } else if (key == "xent") {
      const auto k = parse_xent_kind(value);
      if (!k) throw UsageError(where + "unknown xent kind " + value);
      cfg.loss.xent = *k;
    } else if (key == "neighborhood") {
      parse_neighborhood(value, cfg.affinity);
    } else if (key == "color_bandwidth") {
      cfg.affinity.color_bandwidth = as_double();
    } else if (key == "steps") {
      const long long v = as_int();
      if (v < 0 || v > 1000000) throw UsageError(where + "steps out of range");
      cfg.solver.steps = static_cast<int>(v);
    } else if (key == "lr") {
      cfg.solver.learning_rate = as_double();
    } else if (key == "rounds") {
      const long long v = as_int();
      if (v < 1 || v > 100000) throw UsageError(where + "rounds out of range");
      cfg.train.rounds = static_cast<int>(v);
    } else if (key == "seed") {
      const long long v = as_int();
      if (v < 0) throw UsageError(where + "seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else {
      throw UsageError(where + "unknown key " + key);
    }
  }
  cfg.affinity.validate();
  cfg.loss.validate();
  cfg.solver.validate();
  cfg.train.loss = cfg.loss;
  cfg.train.solver = cfg.solver;
  cfg.train.seed = cfg.seed;
  cfg.train.validate();
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunManifest::validate() const {
  auto need = [](const std::filesystem::path& p) {
    if (!std::filesystem::is_regular_file(p)) throw DataError("missing input " + p.string());
  };
  need(image);
  need(scribbles);
  if (sigma) need(*sigma);
  if (ground_truth) need(*ground_truth);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw DataError("cannot create output directory " + out_dir.string());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span<const std::uint8_t>(
                        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace potts_sl
