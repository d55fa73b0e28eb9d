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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "potts_sl/error.hpp"
#include "potts_sl/io.hpp"

namespace potts_sl {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("potts_sl_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path put(const std::string& name, const std::string& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << bytes;
    return p;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(IoTest, ReadsKnownPpm) {
  const auto p = put("a.ppm", std::string("P6\n# note\n2 2\n255\n") +
                                  std::string("\x01\x02\x03\x04\x05\x06\x07\x08\x09\x0a\x0b\x0c",
                                              12));
  const Image img = read_image(p);
  EXPECT_EQ(img.height(), 2);
  EXPECT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(0, 1).r, 4);
  EXPECT_EQ(img.at(1, 1).b, 12);
  write_image(img, dir_ / "b.ppm");
  EXPECT_EQ(read_image(dir_ / "b.ppm").pixels(), img.pixels());
}

TEST_F(IoTest, RejectsMalformedImages) {
  EXPECT_THROW(read_image(put("a.ppm", "P3\n1 1\n255\n1 2 3\n")), DataError);
  EXPECT_THROW(read_image(put("b.ppm", "P6\n1 1\n65535\n")), DataError);
  EXPECT_THROW(read_image(put("c.ppm", "P6\n2 2\n255\nabc")), DataError);
  EXPECT_THROW(read_image(put("d.ppm", "P6\nx 2\n255\n")), DataError);
  EXPECT_THROW(read_image(dir_ / "missing.ppm"), DataError);
}

TEST_F(IoTest, ScribbleMaps) {
  const auto all = put("u.pgm", std::string("P5\n2 2\n255\n") + std::string(4, '\xff'));
  const ScribbleField s = read_scribbles(all, 3);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_FALSE(s.is_labeled(i));

  const auto mixed = put("m.pgm", std::string("P5\n3 1\n255\n\x01\xff\x03", 14));
  const ScribbleField m = read_scribbles(mixed, 3);
  EXPECT_EQ(m.label(0), 0);
  EXPECT_FALSE(m.is_labeled(1));
  EXPECT_EQ(m.label(2), 2);

  const auto bad = put("b.pgm", std::string("P5\n1 1\n255\n\xc8", 12));
  try {
    read_scribbles(bad, 21);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("illegal scribble value"), std::string::npos);
  }
  const auto zero = put("z.pgm", std::string("P5\n1 1\n255\n\x00", 12));
  EXPECT_THROW(read_scribbles(zero, 3), DataError);
  EXPECT_THROW(read_scribbles(mixed, 2), DataError);
}

TEST_F(IoTest, LabelMapRoundTrip) {
  const std::vector<int> labels{0, 4, kUnlabeled, 2, 1, 0};
  write_label_map(2, 3, labels, dir_ / "l.pgm");
  EXPECT_EQ(slurp(dir_ / "l.pgm"), std::string("P5\n3 2\n255\n\x01\x05\xff\x03\x02\x01", 17));
  const LabelMap m = read_label_map(dir_ / "l.pgm");
  EXPECT_EQ(m.height, 2);
  EXPECT_EQ(m.width, 3);
  EXPECT_EQ(m.labels, labels);
}

TEST(Pfld, GoldenBytes) {
  const ProbField f = ProbField::from_values(1, 1, 2, {0.25, 0.75});
  const Bytes expected{'P', 'F', 'L', 'D', 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0,
                       0x00, 0x00, 0x80, 0x3e, 0x00, 0x00, 0x40, 0x3f};
  EXPECT_EQ(encode_probfield(f), expected);
  EXPECT_EQ(decode_probfield(expected), f);
}

TEST(Pfld, RandomRoundTripWithinFloatPrecision) {
  std::mt19937_64 rng(1);
  const ProbField f = fixtures::random_field(rng, 7, 5, 4);
  const ProbField g = decode_probfield(encode_probfield(f));
  ASSERT_EQ(g.values().size(), f.values().size());
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    EXPECT_NEAR(g.values()[i], f.values()[i], 1e-7);
  }
  // Float values survive a second trip exactly.
  EXPECT_EQ(encode_probfield(g), encode_probfield(f));
  EXPECT_EQ(decode_probfield(encode_probfield(g)), g);
}

TEST(Pfld, RejectsCorruptInput) {
  const ProbField f = ProbField::uniform(2, 2, 2);
  Bytes b = encode_probfield(f);
  EXPECT_THROW(decode_probfield(Bytes(b.begin(), b.begin() + 16)), DataError);
  EXPECT_THROW(decode_probfield(Bytes(b.begin(), b.begin() + 10)), DataError);
  Bytes extra = b;
  extra.push_back(0);
  EXPECT_THROW(decode_probfield(extra), DataError);
  Bytes magic = b;
  magic[0] = 'X';
  EXPECT_THROW(decode_probfield(magic), DataError);
  Bytes off = b;
  off[19] = 0x40;  // first value becomes 2.0
  EXPECT_THROW(decode_probfield(off), DataError);
}

TEST_F(IoTest, PfldFiles) {
  const ProbField f = ProbField::from_values(1, 2, 2, {0.5, 0.5, 1.0, 0.0});
  write_probfield(f, dir_ / "f.pfld");
  EXPECT_EQ(read_probfield(dir_ / "f.pfld"), f);
  EXPECT_THROW(read_probfield(dir_ / "none.pfld"), DataError);
}

TEST(Visualize, Blending) {
  const auto pal = default_palette(2);
  ASSERT_EQ(pal.size(), 2u);
  EXPECT_EQ(pal[0], (Rgb{0, 0, 0}));
  EXPECT_EQ(pal[1], (Rgb{128, 0, 0}));
  const auto p3 = default_palette(3);
  const ProbField onehot = ProbField::from_labels(1, 3, 3, std::vector<int>{0, 1, 2});
  const Image a = visualize(onehot, p3);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(a.at(0, c), p3[static_cast<std::size_t>(c)]);

  const std::vector<Rgb> rb{{255, 0, 0}, {0, 0, 255}};
  const Image u = visualize(ProbField::uniform(1, 1, 2), rb);
  EXPECT_EQ(u.at(0, 0), (Rgb{128, 0, 128}));
  const Image q = visualize(ProbField::from_values(1, 1, 2, {0.75, 0.25}), rb);
  EXPECT_EQ(q.at(0, 0), (Rgb{191, 0, 64}));
  EXPECT_THROW(visualize(ProbField::uniform(1, 1, 3), rb), DataError);
  EXPECT_THROW(default_palette(22), UsageError);
  EXPECT_THROW(default_palette(0), UsageError);
}

TEST(Miou, Cases) {
  const std::vector<int> gt{0, 0, 1, 1, kUnlabeled};
  EXPECT_DOUBLE_EQ(miou(gt, gt, 2), 1.0);
  EXPECT_DOUBLE_EQ(miou(std::vector<int>{1, 1, 0, 0, 0}, gt, 2), 0.0);
  // class 0: I=2 U=3, class 1: I=1 U=2 -> (2/3 + 1/2) / 2 = 7/12
  EXPECT_NEAR(miou(std::vector<int>{0, 0, 0, 1, 1}, gt, 2), 7.0 / 12.0, 1e-15);
  // Class 2 never appears, so it does not count.
  EXPECT_DOUBLE_EQ(miou(gt, gt, 3), 1.0);
  EXPECT_THROW(miou(std::vector<int>{0}, gt, 2), DataError);
}

TEST(Config, ParsesAllKeys) {
  const RunConfig c = parse_config(
      "# header\n"
      "eta = 0.5\n"
      "lambda=2   # trailing\n"
      "potts = nq\n"
      "xent = rce\n"
      "neighborhood = sparse:2\n"
      "color_bandwidth = 12.5\n"
      "steps = 40\n"
      "lr = 0.1\n"
      "rounds = 3\n"
      "\n"
      "seed = 99\n");
  EXPECT_EQ(c.loss.eta, 0.5);
  EXPECT_EQ(c.loss.lambda, 2.0);
  EXPECT_EQ(c.loss.potts, PottsKind::kNormalizedQuadratic);
  EXPECT_EQ(c.loss.xent, XentKind::kReverseCrossEntropy);
  EXPECT_EQ(c.affinity.kind, NeighborhoodKind::kSparseWindow);
  EXPECT_EQ(c.affinity.radius, 2);
  EXPECT_EQ(c.affinity.color_bandwidth, 12.5);
  EXPECT_EQ(c.solver.steps, 40);
  EXPECT_EQ(c.solver.learning_rate, 0.1);
  EXPECT_EQ(c.train.rounds, 3);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.train.seed, 99u);
  EXPECT_EQ(c.train.loss.xent, XentKind::kReverseCrossEntropy);
  EXPECT_EQ(c.train.solver.steps, 40);
}

TEST(Config, EmptyIsDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.loss.eta, LossConfig{}.eta);
  EXPECT_EQ(c.solver.steps, 200);
  EXPECT_EQ(c.affinity.kind, NeighborhoodKind::kNN4);
}

TEST(Config, Errors) {
  for (const char* text : {"bogus = 1\n", "eta = 1\neta = 2\n", "eta = abc\n", "eta\n",
                           "eta = \n", "potts = zz\n", "xent = ce2\n", "steps = 1.5\n",
                           "steps = 0\n", "rounds = 0\n", "seed = -1\n", "lambda = -1\n",
                           "neighborhood = hex\n", "lr = nan\n"}) {
    EXPECT_THROW(parse_config(text), UsageError) << text;
  }
  try {
    parse_config("eta = 1\n\nbogus = 2\n");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(read_config("/nonexistent/config.txt"), UsageError);
}

TEST_F(IoTest, ManifestValidation) {
  RunManifest m;
  m.image = put("i.ppm", "P6\n1 1\n255\nabc");
  m.scribbles = put("s.pgm", std::string("P5\n1 1\n255\n\x01", 12));
  m.out_dir = dir_ / "out" / "nested";
  EXPECT_NO_THROW(m.validate());
  EXPECT_TRUE(fs::is_directory(m.out_dir));
  m.sigma = dir_ / "missing.pfld";
  EXPECT_THROW(m.validate(), DataError);
}

}  // namespace
}  // namespace potts_sl
