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

// Command-line front end. Talks to the library only through potts_sl.h.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "potts_sl/potts_sl.h"

namespace fs = std::filesystem;

namespace {

// Thrown to unwind with a library status.
struct Failure {
  psl_status status;
};

void check(psl_status s) {
  if (s != PSL_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<psl_image, Deleter<psl_image, psl_image_free>>;
using LabelsPtr = std::unique_ptr<psl_labels, Deleter<psl_labels, psl_labels_free>>;
using FieldPtr = std::unique_ptr<psl_field, Deleter<psl_field, psl_field_free>>;
using ConfigPtr = std::unique_ptr<psl_config, Deleter<psl_config, psl_config_free>>;
using ReportPtr = std::unique_ptr<psl_report, Deleter<psl_report, psl_report_free>>;
using TrainPtr = std::unique_ptr<psl_train_result, Deleter<psl_train_result, psl_train_result_free>>;

ImagePtr load_image(const std::string& path) {
  psl_image* p = nullptr;
  check(psl_image_read(path.c_str(), &p));
  return ImagePtr(p);
}

LabelsPtr load_labels(const std::string& path, int classes) {
  psl_labels* p = nullptr;
  check(psl_labels_read(path.c_str(), classes, &p));
  return LabelsPtr(p);
}

FieldPtr load_field(const std::string& path) {
  psl_field* p = nullptr;
  check(psl_field_read(path.c_str(), &p));
  return FieldPtr(p);
}

ConfigPtr load_config(const std::string& path) {
  psl_config* p = nullptr;
  check(path.empty() ? psl_config_default(&p) : psl_config_read(path.c_str(), &p));
  return ConfigPtr(p);
}

int classes_of(const psl_labels* l) {
  int k = 0;
  check(psl_labels_dims(l, nullptr, nullptr, &k));
  return k;
}

void make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    std::fprintf(stderr, "potts-sl: cannot create output directory %s\n", dir.c_str());
    throw Failure{PSL_DATA_ERROR};
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::fprintf(stderr, "potts-sl: cannot write %s\n", path.string().c_str());
    throw Failure{PSL_DATA_ERROR};
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// y.pfld, labels.pgm and labels.ppm for a pseudo-label field.
void write_field_artifacts(const psl_field* y, const fs::path& dir, const std::string& stem) {
  check(psl_field_write(y, (dir / (stem + ".pfld")).string().c_str()));
  psl_labels* decoded = nullptr;
  check(psl_field_decode(y, &decoded));
  LabelsPtr guard(decoded);
  check(psl_labels_write(decoded, (dir / (stem + ".pgm")).string().c_str()));
  check(psl_field_write_visualization(y, (dir / (stem + ".ppm")).string().c_str()));
}

struct Inputs {
  std::string image;
  std::string scribbles;
  std::string sigma;
  std::string config;
  std::string out;
  std::string gt;
  int classes = 0;
};

int run_solve(const Inputs& in, bool oracle) {
  ImagePtr image = load_image(in.image);
  FieldPtr sigma = load_field(in.sigma);
  int k = 0;
  check(psl_field_dims(sigma.get(), nullptr, nullptr, &k));
  LabelsPtr scribbles = load_labels(in.scribbles, k);
  ConfigPtr cfg = load_config(in.config);
  make_out_dir(in.out);
  psl_field* y = nullptr;
  if (oracle) {
    check(psl_random_walker(image.get(), scribbles.get(), sigma.get(), cfg.get(), &y));
    FieldPtr guard(y);
    write_field_artifacts(y, in.out, "y");
    return 0;
  }
  psl_report* rep = nullptr;
  check(psl_solve(image.get(), scribbles.get(), sigma.get(), cfg.get(), &y, &rep));
  FieldPtr guard(y);
  ReportPtr rguard(rep);
  write_field_artifacts(y, in.out, "y");
  std::string text = "# step objective\n";
  for (std::size_t i = 0; i < psl_report_length(rep); ++i) {
    text += std::to_string(i) + " " + format_double(psl_report_value(rep, i)) + "\n";
  }
  write_file(fs::path(in.out) / "report.txt", text);
  return 0;
}

int run_train(const Inputs& in) {
  ImagePtr image = load_image(in.image);
  int k = in.classes;
  if (k == 0) {
    k = classes_of(load_labels(in.scribbles, 0).get());
    if (!in.gt.empty()) k = std::max(k, classes_of(load_labels(in.gt, 0).get()));
  }
  LabelsPtr scribbles = load_labels(in.scribbles, k);
  LabelsPtr gt = in.gt.empty() ? nullptr : load_labels(in.gt, k);
  ConfigPtr cfg = load_config(in.config);
  make_out_dir(in.out);

  psl_train_result* res = nullptr;
  check(psl_train(image.get(), scribbles.get(), cfg.get(), &res));
  TrainPtr guard(res);

  psl_report* warn = nullptr;
  check(psl_train_result_warnings(res, &warn));
  ReportPtr wguard(warn);
  for (std::size_t i = 0; i < psl_report_length(warn); ++i) {
    std::fprintf(stderr, "potts-sl: warning: %s\n", psl_report_name(warn, i));
  }

  psl_report* trace = nullptr;
  check(psl_train_result_trace(res, &trace));
  ReportPtr tguard(trace);
  std::string text = "# round joint_loss\n";
  for (std::size_t i = 0; i < psl_report_length(trace); ++i) {
    text += std::to_string(i + 1) + " " + format_double(psl_report_value(trace, i)) + "\n";
  }
  const fs::path dir = in.out;
  write_file(dir / "trace.txt", text);

  psl_field* sigma = nullptr;
  check(psl_train_result_sigma(res, &sigma));
  FieldPtr sguard(sigma);
  write_field_artifacts(sigma, dir, "sigma");
  psl_field* y = nullptr;
  check(psl_train_result_labels(res, &y));
  FieldPtr yguard(y);
  write_field_artifacts(y, dir, "y");

  if (gt) {
    psl_labels* pred = nullptr;
    check(psl_field_decode(sigma, &pred));
    LabelsPtr pguard(pred);
    double m = 0.0;
    check(psl_miou(pred, gt.get(), k, &m));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f\n", m);
    write_file(dir / "miou.txt", buf);
    std::printf("miou %s", buf);
  }
  return 0;
}

int run_gradcheck(const std::string& kind, int pairs, std::uint64_t seed) {
  psl_report* rep = nullptr;
  check(psl_gradcheck(kind.empty() ? nullptr : kind.c_str(), pairs, seed, &rep));
  ReportPtr guard(rep);
  bool ok = true;
  for (std::size_t i = 0; i < psl_report_length(rep); ++i) {
    const double e = psl_report_value(rep, i);
    const bool pass = e < 1e-4;
    ok = ok && pass;
    std::printf("%-12s max_rel_err %.3e %s\n", psl_report_name(rep, i), e, pass ? "ok" : "FAIL");
  }
  return ok ? 0 : PSL_NUMERIC_ERROR;
}

int run_corrupt(std::uint64_t seed, const std::string& out) {
  psl_report* rep = nullptr;
  check(psl_corruption_bench(seed, &rep));
  ReportPtr guard(rep);
  make_out_dir(out);
  std::string text = "eta,kind,accuracy\n";
  for (std::size_t i = 0; i < psl_report_length(rep); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", psl_report_value(rep, i));
    text += std::string(psl_report_name(rep, i)) + "," + buf + "\n";
  }
  write_file(fs::path(out) / "corruption.csv", text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

int run_metrics(const std::string& pred_path, const std::string& gt_path, int classes) {
  LabelsPtr pred = load_labels(pred_path, classes);
  LabelsPtr gt = load_labels(gt_path, classes);
  double m = 0.0;
  check(psl_miou(pred.get(), gt.get(), classes, &m));
  std::printf("%.4f\n", m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scribble-supervised segmentation with soft Potts pseudo-labels"};
  app.require_subcommand(1);

  Inputs solve_in;
  auto* solve = app.add_subcommand("solve", "Solve pseudo-labels for a fixed prediction");
  solve->add_option("--image", solve_in.image, "P6 image")->required();
  solve->add_option("--scribbles", solve_in.scribbles, "P5 scribbles (1..K, 255 unlabeled)")
      ->required();
  solve->add_option("--sigma", solve_in.sigma, "PFLD prediction")->required();
  solve->add_option("--config", solve_in.config, "config file");
  solve->add_option("--out", solve_in.out, "output directory")->required();

  Inputs rw_in;
  auto* rw = app.add_subcommand("oracle-rw", "Random-walker solution (quadratic terms)");
  rw->add_option("--image", rw_in.image)->required();
  rw->add_option("--scribbles", rw_in.scribbles)->required();
  rw->add_option("--sigma", rw_in.sigma)->required();
  rw->add_option("--config", rw_in.config);
  rw->add_option("--out", rw_in.out)->required();

  Inputs train_in;
  auto* train = app.add_subcommand("train", "Pretrain on scribbles, then alternate");
  train->add_option("--image", train_in.image)->required();
  train->add_option("--scribbles", train_in.scribbles)->required();
  train->add_option("--config", train_in.config);
  train->add_option("--out", train_in.out)->required();
  train->add_option("--gt", train_in.gt, "full ground-truth P5 for mIoU");
  train->add_option("--classes", train_in.classes, "class count (default: inferred)")
      ->check(CLI::Range(2, 254));

  std::string grad_kind;
  int grad_pairs = 100;
  std::uint64_t grad_seed = 1;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  grad->add_option("--kind", grad_kind, "all, potts:<name> or xent:<name>");
  grad->add_option("--pairs", grad_pairs)->check(CLI::PositiveNumber);
  grad->add_option("--seed", grad_seed);

  std::uint64_t bench_seed = 1;
  std::string bench_out;
  auto* bench = app.add_subcommand("corrupt-bench", "Label-corruption robustness benchmark");
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out)->required();

  std::string pred_path, gt_path;
  int metric_classes = 0;
  auto* metrics = app.add_subcommand("metrics", "mIoU of a decoded labeling");
  metrics->add_option("--pred", pred_path)->required();
  metrics->add_option("--gt", gt_path)->required();
  metrics->add_option("--classes", metric_classes)->required()->check(CLI::Range(2, 254));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PSL_USAGE_ERROR;
  }

  try {
    if (*solve) return run_solve(solve_in, false);
    if (*rw) return run_solve(rw_in, true);
    if (*train) return run_train(train_in);
    if (*grad) return run_gradcheck(grad_kind, grad_pairs, grad_seed);
    if (*bench) return run_corrupt(bench_seed, bench_out);
    if (*metrics) return run_metrics(pred_path, gt_path, metric_classes);
  } catch (const Failure& f) {
    const char* msg = psl_last_error();
    if (msg && *msg) std::fprintf(stderr, "potts-sl: %s\n", msg);
    return f.status;
  }
  return PSL_USAGE_ERROR;
}
