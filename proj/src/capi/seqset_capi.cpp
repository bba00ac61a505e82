// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "seqset/seqset.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "data/jsonl.hpp"
#include "error.hpp"
#include "harness/commands.hpp"
#include "tensor/tensor.hpp"

struct seqset_model {
  seqset::mra::Model model;
};

namespace {

using namespace seqset;

thread_local std::string g_last_error;
thread_local std::string g_last_kind;

void clear_error() {
  g_last_error.clear();
  g_last_kind.clear();
}

seqset_status record(seqset_status status, const char* kind, const std::string& message) {
  g_last_kind = kind;
  g_last_error = message;
  return status;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

template <typename F>
seqset_status guarded(F&& body) {
  clear_error();
  try {
    return body();
  } catch (const Error& e) {
    return record(is_numerical(e.kind()) ? SEQSET_ERR_NUMERIC : SEQSET_ERR_INPUT, to_string(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return record(SEQSET_ERR_INPUT, "config", std::string("config error: ") + e.what());
  } catch (const std::bad_alloc&) {
    return record(SEQSET_ERR_INTERNAL, "internal", "out of memory");
  } catch (const std::exception& e) {
    return record(SEQSET_ERR_INTERNAL, "internal", e.what());
  } catch (...) {
    return record(SEQSET_ERR_INTERNAL, "internal", "unknown failure");
  }
}

seqset_status null_arg(const char* name) {
  return record(SEQSET_ERR_INPUT, "config", std::string("config error: ") + name + " must not be null");
}

nlohmann::json parse_optional(const char* text, const char* what) {
  if (!text || !*text) return nlohmann::json::object();
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::Config, std::string(what) + " is not a JSON object");
  return doc;
}

train::Dataset dataset_for(const seqset_model* m, const char* data_path, const char* hidden_path) {
  return harness::load_dataset(data_path, hidden_path ? hidden_path : "", m->model.schema(), m->model.config());
}

std::size_t effective_threads(std::size_t t) { return t == 0 ? 1 : t; }

harness::RunConfig run_config(const char* config_path, const char* overrides_json) {
  auto cfg = harness::RunConfig::load(config_path);
  harness::apply_overrides(cfg, parse_optional(overrides_json, "overrides"));
  return cfg;
}

nlohmann::ordered_json optional_metrics(const std::optional<train::MetricsReport>& r) {
  return r ? r->to_json() : nlohmann::ordered_json(nullptr);
}

harness::AblationSelection parse_selection(const nlohmann::json& doc) {
  harness::AblationSelection s;
  if (doc.contains("variants")) s.variants = doc.at("variants").get<std::vector<std::string>>();
  if (doc.contains("similarities")) {
    s.similarities.clear();
    for (const auto& v : doc.at("similarities")) s.similarities.push_back(mra::parse_similarity(v.get<std::string>()));
  }
  if (doc.contains("residuals")) s.residuals = doc.at("residuals").get<std::vector<bool>>();
  if (s.variants.empty() || s.similarities.empty() || s.residuals.empty()) {
    fail(ErrorKind::Config, "ablation selection leaves an empty grid");
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

extern "C" {

const char* seqset_version(void) { return "0.1.0"; }

const char* seqset_last_error(void) { return g_last_error.c_str(); }

const char* seqset_last_error_kind(void) { return g_last_kind.c_str(); }

void seqset_string_free(char* s) { std::free(s); }

seqset_status seqset_model_load(const char* checkpoint_path, seqset_model** out) {
  if (!checkpoint_path) return null_arg("checkpoint_path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    if (!std::filesystem::exists(checkpoint_path)) {
      fail(ErrorKind::Io, std::string("checkpoint file not found: ") + checkpoint_path);
    }
    *out = new seqset_model{mra::Model::load(checkpoint_path)};
    return SEQSET_OK;
  });
}

void seqset_model_free(seqset_model* model) { delete model; }

seqset_status seqset_model_info(const seqset_model* model, char** out_json) {
  if (!model) return null_arg("model");
  return guarded([&] {
    nlohmann::ordered_json j = {{"model", model->model.config().to_json()},
                                {"schema", model->model.schema().to_json()},
                                {"vocab_size", model->model.vocab().size()}};
    put(out_json, j.dump());
    return SEQSET_OK;
  });
}

seqset_status seqset_model_evaluate(const seqset_model* model, const char* data_path, const char* hidden_path,
                                    double threshold, size_t threads, char** out_json) {
  if (!model) return null_arg("model");
  if (!data_path) return null_arg("data_path");
  return guarded([&] {
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorKind::Config, "threshold must lie in (0, 1)");
    const auto ds = dataset_for(model, data_path, hidden_path);
    const auto report = harness::cmd_eval(model->model, ds, threshold, effective_threads(threads));
    put(out_json, report.to_json().dump());
    return SEQSET_OK;
  });
}

seqset_status seqset_model_predict(const seqset_model* model, const char* data_path, const char* hidden_path,
                                   size_t threads, char** out_jsonl) {
  if (!model) return null_arg("model");
  if (!data_path) return null_arg("data_path");
  return guarded([&] {
    const auto ds = dataset_for(model, data_path, hidden_path);
    put(out_jsonl, harness::cmd_predict(model->model, ds, effective_threads(threads)));
    return SEQSET_OK;
  });
}

seqset_status seqset_model_predict_json(const seqset_model* model, const char* sample_json, char** out_json) {
  if (!model) return null_arg("model");
  if (!sample_json) return null_arg("sample_json");
  return guarded([&] {
    if (model->model.config().encoder == mra::EncoderKind::Precomputed) {
      fail(ErrorKind::Config, "single-sample prediction needs a token-level model");
    }
    auto doc = nlohmann::ordered_json::parse(sample_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::Ingestion, "sample is not a JSON object");
    // Labels are optional here; a placeholder keeps the parser's checks intact.
    if (!doc.contains("label")) {
      const auto& schema = model->model.schema();
      if (schema.task() == data::Task::Multilabel) {
        doc["label"] = std::vector<int>(schema.num_classes(), 0);
      } else {
        doc["label"] = 0;
      }
    }
    train::Dataset ds;
    ds.samples.push_back(data::parse_sample(doc, model->model.schema()));
    auto text = harness::cmd_predict(model->model, ds, 1);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    put(out_json, text);
    return SEQSET_OK;
  });
}

seqset_status seqset_model_explain(const seqset_model* model, const char* data_path, const char* hidden_path,
                                   const char* ids_csv, char** out_json, char** out_html) {
  if (!model) return null_arg("model");
  if (!data_path) return null_arg("data_path");
  return guarded([&] {
    std::vector<std::string> ids;
    if (ids_csv && *ids_csv) {
      std::stringstream ss(ids_csv);
      for (std::string id; std::getline(ss, id, ',');)
        if (!id.empty()) ids.push_back(id);
    }
    const auto ds = dataset_for(model, data_path, hidden_path);
    const auto reports = harness::cmd_explain(model->model, ds, ids);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    put(out_json, arr.dump());
    put(out_html, harness::render_html(reports));
    return SEQSET_OK;
  });
}

seqset_status seqset_model_erase_eval(const seqset_model* model, const char* data_path, const char* hidden_path,
                                      double threshold, size_t threads, char** out_json, char** out_csv) {
  if (!model) return null_arg("model");
  if (!data_path) return null_arg("data_path");
  return guarded([&] {
    const auto ds = dataset_for(model, data_path, hidden_path);
    const auto rows = harness::cmd_erase_eval(model->model, ds, threshold, effective_threads(threads));
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"condition", r.condition}, {"modality", r.modality}, {"metrics", r.metrics.to_json()}});
    }
    put(out_json, arr.dump());
    put(out_csv, harness::erase_table_csv(rows));
    return SEQSET_OK;
  });
}

seqset_status seqset_resolve_config(const char* config_path, const char* overrides_json, char** out_json) {
  if (!config_path) return null_arg("config_path");
  return guarded([&] {
    put(out_json, run_config(config_path, overrides_json).to_json().dump());
    return SEQSET_OK;
  });
}

seqset_status seqset_train(const char* config_path, const char* overrides_json, char** out_json) {
  if (!config_path) return null_arg("config_path");
  return guarded([&] {
    const auto cfg = run_config(config_path, overrides_json);
    const auto outcome = harness::cmd_train(cfg, &std::cerr);
    nlohmann::ordered_json j = {{"run_dir", outcome.run_dir},
                                {"epochs", outcome.curve.empty() ? 0 : outcome.curve.back().epoch},
                                {"final_loss", outcome.curve.empty() ? 0.0 : outcome.curve.back().mean_loss},
                                {"valid", optional_metrics(outcome.valid)},
                                {"test", optional_metrics(outcome.test)}};
    put(out_json, j.dump());
    return SEQSET_OK;
  });
}

seqset_status seqset_ablate(const char* config_path, const char* overrides_json, const char* selection_json,
                            char** out_json) {
  if (!config_path) return null_arg("config_path");
  return guarded([&] {
    const auto cfg = run_config(config_path, overrides_json);
    const auto selection = parse_selection(parse_optional(selection_json, "ablation selection"));
    const auto rows = harness::cmd_ablate(cfg, selection, &std::cerr);
    const auto csv = harness::ablation_csv(rows);
    const auto path = std::filesystem::path(cfg.out_dir) / "grid.csv";
    write_file(path, csv);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json cell = {{"variant", r.cell.variant},
                                     {"use_intra", r.cell.use_intra},
                                     {"use_inter", r.cell.use_inter}};
      cell["similarity"] = r.cell.similarity ? nlohmann::ordered_json(mra::to_string(*r.cell.similarity))
                                             : nlohmann::ordered_json(nullptr);
      cell["residual"] = r.cell.residual ? nlohmann::ordered_json(*r.cell.residual) : nlohmann::ordered_json(nullptr);
      cell["split"] = r.split;
      cell["metrics"] = r.metrics.to_json();
      cell["train_seconds"] = r.train_seconds;
      arr.push_back(cell);
    }
    put(out_json, nlohmann::ordered_json{{"grid_csv", path.string()}, {"cells", arr}}.dump());
    return SEQSET_OK;
  });
}

seqset_status seqset_gradcheck(const char* options_json, char** out_json) {
  return guarded([&] {
    const auto opts = harness::GradcheckOptions::from_json(parse_optional(options_json, "gradcheck options"));
    const auto report = harness::cmd_gradcheck(opts);
    put(out_json, report.to_json().dump());
    if (!report.passed) {
      return record(SEQSET_ERR_NUMERIC, "gradcheck",
                    "gradcheck error: max relative error " + harness::format_number(report.max_relative_error) +
                        " exceeds tolerance " + harness::format_number(report.tolerance));
    }
    return SEQSET_OK;
  });
}

seqset_status seqset_synth(const char* options_json, const char* out_dir, char** out_json) {
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    const auto spec = harness::SynthSpec::from_json(parse_optional(options_json, "synth options"));
    put(out_json, harness::cmd_synth(spec, out_dir).dump());
    return SEQSET_OK;
  });
}

}  // extern "C"
