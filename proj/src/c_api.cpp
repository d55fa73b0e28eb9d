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

#include "potts_sl/potts_sl.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "potts_sl/affinity.hpp"
#include "potts_sl/error.hpp"
#include "potts_sl/io.hpp"
#include "potts_sl/oracles.hpp"
#include "potts_sl/solver.hpp"
#include "potts_sl/trainer.hpp"

struct psl_image {
  potts_sl::Image value;
};

struct psl_labels {
  int height;
  int width;
  int classes;
  std::vector<int> labels;  // 0-based, kUnlabeled for 255
};

struct psl_field {
  potts_sl::ProbField value;
};

struct psl_config {
  potts_sl::RunConfig value;
};

struct psl_report {
  std::vector<std::string> names;
  std::vector<double> values;
};

struct psl_train_result {
  potts_sl::ProbField sigma;
  potts_sl::ProbField labels;
  std::vector<double> trace;
  std::vector<std::string> warnings;
};

namespace {

using namespace potts_sl;

thread_local std::string g_last_error;

template <typename F>
psl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PSL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<psl_status>(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PSL_NUMERIC_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PSL_DATA_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw UsageError(std::string("null argument: ") + what);
}

ScribbleField to_scribbles(const psl_labels& l, int classes) {
  for (int v : l.labels) {
    if (v >= classes) {
      throw DataError("illegal scribble value " + std::to_string(v + 1) + " (classes = " +
                      std::to_string(classes) + ")");
    }
  }
  return ScribbleField::from_labels(l.height, l.width, classes, l.labels);
}

void check_dims(int h1, int w1, int h2, int w2, const char* what) {
  if (h1 != h2 || w1 != w2) throw DataError(std::string("dimension mismatch: ") + what);
}

psl_report* make_report() { return new psl_report{}; }

}  // namespace

extern "C" {

const char* psl_last_error(void) { return g_last_error.c_str(); }

const char* psl_version(void) { return "0.1.0"; }

psl_status psl_image_read(const char* path, psl_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new psl_image{read_image(path)};
  });
}

psl_status psl_image_write(const psl_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    write_image(image->value, path);
  });
}

psl_status psl_image_dims(const psl_image* image, int* height, int* width) {
  return guarded([&] {
    require(image, "image");
    if (height) *height = image->value.height();
    if (width) *width = image->value.width();
  });
}

void psl_image_free(psl_image* image) { delete image; }

psl_status psl_labels_read(const char* path, int classes, psl_labels** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    if (classes < 0 || classes == 1) throw UsageError("classes must be 0 (infer) or >= 2");
    if (classes > 0) {
      ScribbleField s = read_scribbles(path, classes);
      *out = new psl_labels{s.height(), s.width(), classes,
                            std::vector<int>(s.labels().begin(), s.labels().end())};
      return;
    }
    LabelMap m = read_label_map(path);
    int k = 2;
    for (int v : m.labels) k = std::max(k, v + 1);
    *out = new psl_labels{m.height, m.width, k, std::move(m.labels)};
  });
}

psl_status psl_labels_write(const psl_labels* labels, const char* path) {
  return guarded([&] {
    require(labels, "labels");
    require(path, "path");
    write_label_map(labels->height, labels->width, labels->labels, path);
  });
}

psl_status psl_labels_dims(const psl_labels* labels, int* height, int* width, int* classes) {
  return guarded([&] {
    require(labels, "labels");
    if (height) *height = labels->height;
    if (width) *width = labels->width;
    if (classes) *classes = labels->classes;
  });
}

void psl_labels_free(psl_labels* labels) { delete labels; }

psl_status psl_field_read(const char* path, psl_field** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new psl_field{read_probfield(path)};
  });
}

psl_status psl_field_write(const psl_field* field, const char* path) {
  return guarded([&] {
    require(field, "field");
    require(path, "path");
    write_probfield(field->value, path);
  });
}

psl_status psl_field_dims(const psl_field* field, int* height, int* width, int* classes) {
  return guarded([&] {
    require(field, "field");
    if (height) *height = field->value.height();
    if (width) *width = field->value.width();
    if (classes) *classes = field->value.classes();
  });
}

psl_status psl_field_values(const psl_field* field, double* buf, size_t len) {
  return guarded([&] {
    require(field, "field");
    require(buf, "buf");
    const auto v = field->value.values();
    if (len != v.size()) throw UsageError("buffer length does not match field size");
    std::copy(v.begin(), v.end(), buf);
  });
}

psl_status psl_field_decode(const psl_field* field, psl_labels** out) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    const ProbField& f = field->value;
    *out = new psl_labels{f.height(), f.width(), f.classes(), argmax_decode(f)};
  });
}

psl_status psl_field_write_visualization(const psl_field* field, const char* path) {
  return guarded([&] {
    require(field, "field");
    require(path, "path");
    const auto palette = default_palette(field->value.classes());
    write_image(visualize(field->value, palette), path);
  });
}

void psl_field_free(psl_field* field) { delete field; }

psl_status psl_config_default(psl_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new psl_config{parse_config("")};
  });
}

psl_status psl_config_read(const char* path, psl_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new psl_config{read_config(path)};
  });
}

psl_status psl_config_parse(const char* text, psl_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new psl_config{parse_config(text)};
  });
}

psl_status psl_config_seed(const psl_config* config, uint64_t* seed) {
  return guarded([&] {
    require(config, "config");
    require(seed, "seed");
    *seed = config->value.seed;
  });
}

psl_status psl_config_set_seed(psl_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->value.seed = seed;
    config->value.train.seed = seed;
  });
}

void psl_config_free(psl_config* config) { delete config; }

size_t psl_report_length(const psl_report* report) {
  return report ? report->values.size() : 0;
}

double psl_report_value(const psl_report* report, size_t i) {
  return report && i < report->values.size() ? report->values[i] : 0.0;
}

const char* psl_report_name(const psl_report* report, size_t i) {
  return report && i < report->names.size() ? report->names[i].c_str() : "";
}

void psl_report_free(psl_report* report) { delete report; }

psl_status psl_solve(const psl_image* image, const psl_labels* scribbles,
                     const psl_field* sigma, const psl_config* config,
                     psl_field** labels_out, psl_report** report) {
  return guarded([&] {
    require(image, "image");
    require(scribbles, "scribbles");
    require(sigma, "sigma");
    require(config, "config");
    const ProbField& s = sigma->value;
    check_dims(image->value.height(), image->value.width(), s.height(), s.width(),
               "image vs sigma");
    check_dims(scribbles->height, scribbles->width, s.height(), s.width(),
               "scribbles vs sigma");
    const ScribbleField sc = to_scribbles(*scribbles, s.classes());
    const AffinityGraph graph = build_graph(image->value, config->value.affinity);
    SolveResult r = solve_pseudo_labels(s, sc, graph, config->value.loss, config->value.solver);
    if (report) {
      auto* rep = make_report();
      rep->values = r.report.objective_trace;
      rep->names.resize(rep->values.size());
      *report = rep;
    }
    if (labels_out) *labels_out = new psl_field{std::move(r.labels)};
  });
}

psl_status psl_random_walker(const psl_image* image, const psl_labels* scribbles,
                             const psl_field* sigma, const psl_config* config,
                             psl_field** labels_out) {
  return guarded([&] {
    require(image, "image");
    require(scribbles, "scribbles");
    require(sigma, "sigma");
    require(config, "config");
    require(labels_out, "labels_out");
    const ProbField& s = sigma->value;
    check_dims(image->value.height(), image->value.width(), s.height(), s.width(),
               "image vs sigma");
    check_dims(scribbles->height, scribbles->width, s.height(), s.width(),
               "scribbles vs sigma");
    const ScribbleField sc = to_scribbles(*scribbles, s.classes());
    const AffinityGraph graph = build_graph(image->value, config->value.affinity);
    *labels_out = new psl_field{
        random_walker_solve(s, sc, graph, config->value.loss.eta, config->value.loss.lambda)};
  });
}

psl_status psl_train(const psl_image* image, const psl_labels* scribbles,
                     const psl_config* config, psl_train_result** out) {
  return guarded([&] {
    require(image, "image");
    require(scribbles, "scribbles");
    require(config, "config");
    require(out, "out");
    const Image& img = image->value;
    check_dims(img.height(), img.width(), scribbles->height, scribbles->width,
               "image vs scribbles");
    const RunConfig& cfg = config->value;
    const ScribbleField sc = to_scribbles(*scribbles, scribbles->classes);
    const AffinityGraph graph = build_graph(img, cfg.affinity);
    const PixelModel init = PixelModel::random(scribbles->classes, cfg.train.seed);
    PretrainResult pre = pretrain(init, img, sc, cfg.train);
    AlternationResult alt = alternate(pre.model, img, sc, graph, cfg.train);
    *out = new psl_train_result{predict(alt.model, img).probs, std::move(alt.pseudo_labels),
                                std::move(alt.joint_loss_trace), std::move(pre.warnings)};
  });
}

psl_status psl_train_result_sigma(const psl_train_result* result, psl_field** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = new psl_field{result->sigma};
  });
}

psl_status psl_train_result_labels(const psl_train_result* result, psl_field** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = new psl_field{result->labels};
  });
}

psl_status psl_train_result_trace(const psl_train_result* result, psl_report** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    auto* rep = make_report();
    rep->values = result->trace;
    rep->names.resize(rep->values.size());
    *out = rep;
  });
}

psl_status psl_train_result_warnings(const psl_train_result* result, psl_report** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    auto* rep = make_report();
    rep->names = result->warnings;
    rep->values.assign(rep->names.size(), 0.0);
    *out = rep;
  });
}

void psl_train_result_free(psl_train_result* result) { delete result; }

psl_status psl_miou(const psl_labels* pred, const psl_labels* gt, int classes, double* out) {
  return guarded([&] {
    require(pred, "pred");
    require(gt, "gt");
    require(out, "out");
    check_dims(pred->height, pred->width, gt->height, gt->width, "pred vs gt");
    *out = miou(pred->labels, gt->labels, classes);
  });
}

psl_status psl_gradcheck(const char* kind, int pairs, uint64_t seed, psl_report** out) {
  return guarded([&] {
    require(out, "out");
    if (pairs < 1) throw UsageError("pairs must be positive");
    const std::string name = kind ? kind : "all";
    const auto results = run_gradient_suite({name}, pairs, seed);
    auto* rep = make_report();
    for (const auto& r : results) {
      rep->names.push_back(r.name);
      rep->values.push_back(r.max_error);
    }
    *out = rep;
  });
}

psl_status psl_corruption_bench(uint64_t seed, psl_report** out) {
  return guarded([&] {
    require(out, "out");
    const auto rows = corruption_benchmark(seed);
    auto* rep = make_report();
    for (const auto& r : rows) {
      std::ostringstream name;
      name << r.eta << ',' << to_string(r.kind);
      rep->names.push_back(name.str());
      rep->values.push_back(r.accuracy);
    }
    *out = rep;
  });
}

}  // extern "C"
