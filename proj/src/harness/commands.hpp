// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "harness/explain.hpp"
#include "harness/run_config.hpp"
#include "harness/synth.hpp"
#include "mra/model.hpp"
#include "tensor/tensor.hpp"
#include "training/trainer.hpp"

namespace seqset::harness {

train::Dataset load_dataset(const std::string& path, const std::string& hidden_path,
                            const data::ModalitySchema& schema, const mra::ModelConfig& model);

// Model config with task and output width taken from the schema, vocabulary
// built from the training split.
mra::Model build_model(const RunConfig& config, const data::ModalitySchema& schema, const train::Dataset& train);

// ---- train ---------------------------------------------------------------

struct TrainOutcome {
  std::string run_dir;
  std::vector<train::EpochRecord> curve;
  std::optional<train::MetricsReport> valid, test;
};

// Writes resolved_config.json, checkpoint.json, loss_curve.csv,
// valid_metrics.jsonl (when a validation split exists) and metrics.json.
TrainOutcome cmd_train(const RunConfig& config, std::ostream* log = nullptr);

// Builds, trains and evaluates in memory without touching disk.
struct FitResult {
  mra::Model model;
  std::vector<train::EpochRecord> curve;
};
FitResult fit(const RunConfig& config, const data::ModalitySchema& schema, const train::Dataset& train_set,
              std::ostream* log = nullptr);

// ---- eval / predict / explain ---------------------------------------------

train::MetricsReport cmd_eval(const mra::Model& model, const train::Dataset& dataset, double threshold,
                              std::size_t threads = 1);

// One JSON line per sample: id, raw output and, for classification, probabilities.
std::string cmd_predict(const mra::Model& model, const train::Dataset& dataset, std::size_t threads = 1);

// Empty ids selects every sample. Unknown ids raise a lookup error.
std::vector<ExplainReport> cmd_explain(const mra::Model& model, const train::Dataset& dataset,
                                       const std::vector<std::string>& ids);

// ---- modality erasure ------------------------------------------------------

struct EraseRow {
  std::string condition;  // "baseline" or "erase"
  std::string modality;   // empty for the baseline
  train::MetricsReport metrics;
};

train::Dataset erase_everywhere(const train::Dataset& dataset, const data::ModalitySchema& schema,
                                const std::string& modality);

std::vector<EraseRow> cmd_erase_eval(const mra::Model& model, const train::Dataset& dataset, double threshold,
                                     std::size_t threads = 1);
std::string erase_table_csv(const std::vector<EraseRow>& rows);

// ---- ablation --------------------------------------------------------------

struct AblationCell {
  std::string variant;  // encoder_only, intra, inter, both
  bool use_intra = false;
  bool use_inter = false;
  std::optional<mra::Similarity> similarity;  // unset when the flag is inert
  std::optional<bool> residual;
};

struct AblationSelection {
  std::vector<std::string> variants{"encoder_only", "intra", "inter", "both"};
  std::vector<mra::Similarity> similarities{mra::Similarity::Additive, mra::Similarity::ScaledDot};
  std::vector<bool> residuals{true, false};
};

// Encoder-only appears once: similarity and residual do nothing without MRA.
std::vector<AblationCell> ablation_grid(const AblationSelection& selection);
std::size_t full_grid_size(const AblationSelection& selection);

struct AblationRow {
  AblationCell cell;
  std::string split;
  train::MetricsReport metrics;
  double train_seconds = 0.0;
};

// Every cell trains from config.seed. Cells run on up to config.threads threads.
std::vector<AblationRow> cmd_ablate(const RunConfig& config, const AblationSelection& selection,
                                    std::ostream* log = nullptr);
std::string ablation_csv(const std::vector<AblationRow>& rows);

// ---- gradient check ----------------------------------------------------------

struct GradcheckOptions {
  std::size_t d = 8;
  std::size_t modalities = 3;
  std::size_t max_len = 5;
  std::size_t vocab_size = 16;
  std::size_t h_mlp = 8;
  std::size_t samples = 3;
  std::size_t num_classes = 3;
  data::Task task = data::Task::Binary;
  mra::Similarity similarity = mra::Similarity::Additive;
  bool use_residual = true;
  bool use_intra = true;
  bool use_inter = true;
  bool mixer = false;
  train::WsceMode wsce_mode = train::WsceMode::FullBce;
  double epsilon = 1e-4;
  double tolerance = 1e-4;
  std::uint64_t seed = 7;
  double init_scale = 1.0;  // parameters are redrawn from U(-s, s)
  ad::Fault fault = ad::Fault::None;

  static GradcheckOptions from_json(const nlohmann::json& doc);
};

struct GradcheckReport {
  std::vector<std::pair<std::string, double>> groups;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

GradcheckReport cmd_gradcheck(const GradcheckOptions& options);

// ---- synthetic benchmark -------------------------------------------------------

nlohmann::ordered_json cmd_synth(const SynthSpec& spec, const std::string& out_dir);

// ---- shared formatting -------------------------------------------------------------

std::vector<std::string> metric_columns(data::Task task);
std::optional<double> metric_value(const train::MetricsReport& report, const std::string& column);
std::string format_number(double v);

}  // namespace seqset::harness
