// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "harness/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "data/jsonl.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "tensor/gradcheck.hpp"

namespace seqset::harness {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) fail(ErrorKind::Config, std::string("no ") + what + " path configured");
  if (!fs::exists(path)) fail(ErrorKind::Io, std::string(what) + " file not found: " + path);
}

class FaultGuard {
 public:
  explicit FaultGuard(ad::Fault f) { ad::set_fault(f); }
  ~FaultGuard() { ad::set_fault(ad::Fault::None); }
  FaultGuard(const FaultGuard&) = delete;
  FaultGuard& operator=(const FaultGuard&) = delete;
};

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> metric_columns(data::Task task) {
  switch (task) {
    case data::Task::Multilabel: return {"f1_micro", "f1_macro", "f1_samples"};
    case data::Task::Binary: return {"accuracy", "roc_auc", "f1_micro"};
    case data::Task::Regression: return {"rmse", "mape"};
  }
  return {};
}

std::optional<double> metric_value(const train::MetricsReport& r, const std::string& column) {
  if (column == "f1_micro") return r.f1_micro;
  if (column == "f1_macro") return r.f1_macro;
  if (column == "f1_samples") return r.f1_samples;
  if (column == "accuracy") return r.accuracy;
  if (column == "roc_auc") return r.roc_auc;
  if (column == "rmse") return r.rmse;
  if (column == "mape") return r.mape;
  return std::nullopt;
}

train::Dataset load_dataset(const std::string& path, const std::string& hidden_path,
                            const data::ModalitySchema& schema, const mra::ModelConfig& model) {
  require_file(path, "dataset");
  train::Dataset ds;
  ds.samples = data::load_jsonl(path, schema);
  if (ds.samples.empty()) fail(ErrorKind::Ingestion, "dataset " + path + " holds no samples");
  if (model.encoder == mra::EncoderKind::Precomputed) {
    require_file(hidden_path, "hidden-state");
    ds.hidden = std::make_shared<encoder::PrecomputedStore>(encoder::PrecomputedStore::load(hidden_path, schema, model.d));
    train::check_hidden_alignment(ds, schema);
  }
  return ds;
}

mra::Model build_model(const RunConfig& config, const data::ModalitySchema& schema, const train::Dataset& train_set) {
  auto model_cfg = config.model;
  model_cfg.task = schema.task();
  model_cfg.output_dim = schema.output_dim();
  return mra::Model(model_cfg, schema, data::build_vocab(train_set.samples, config.min_count), config.seed);
}

FitResult fit(const RunConfig& config, const data::ModalitySchema& schema, const train::Dataset& train_set,
              std::ostream* log) {
  auto model = build_model(config, schema, train_set);
  auto curve = train::train_epochs(model, train_set, config.train, {}, log);
  return {std::move(model), std::move(curve)};
}

TrainOutcome cmd_train(const RunConfig& config, std::ostream* log) {
  require_file(config.schema_path, "schema");
  const auto schema = data::ModalitySchema::load(config.schema_path);
  auto model_cfg = config.model;
  model_cfg.task = schema.task();
  model_cfg.output_dim = schema.output_dim();

  const auto train_set = load_dataset(config.train_path, config.train_hidden, schema, model_cfg);
  std::optional<train::Dataset> valid_set, test_set;
  if (!config.valid_path.empty()) valid_set = load_dataset(config.valid_path, config.valid_hidden, schema, model_cfg);
  if (!config.test_path.empty()) test_set = load_dataset(config.test_path, config.test_hidden, schema, model_cfg);

  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create run directory " + config.out_dir + ": " + ec.message());
  auto resolved = config.to_json();
  resolved["model"] = model_cfg.to_json();
  write_text(dir / "resolved_config.json", resolved.dump(2) + "\n");

  auto model = build_model(config, schema, train_set);
  std::ostringstream valid_log;
  const auto on_epoch = [&](const train::EpochRecord& e) {
    if (log) *log << "epoch " << e.epoch << " loss " << format_number(e.mean_loss) << " lr " << format_number(e.lr) << '\n';
    if (valid_set && e.epoch > 0) {
      auto j = train::evaluate(model, *valid_set, config.threshold, config.threads).to_json();
      nlohmann::ordered_json line = {{"epoch", e.epoch}};
      for (auto& [k, v] : j.items()) line[k] = v;
      valid_log << line.dump() << '\n';
    }
  };

  TrainOutcome out;
  out.run_dir = dir.string();
  out.curve = train::train_epochs(model, train_set, config.train, on_epoch, log);

  std::string csv = "epoch,mean_loss,lr\n";
  for (const auto& e : out.curve) {
    csv += std::to_string(e.epoch) + "," + format_number(e.mean_loss) + "," + format_number(e.lr) + "\n";
  }
  write_text(dir / "loss_curve.csv", csv);
  if (valid_set) write_text(dir / "valid_metrics.jsonl", valid_log.str());
  model.save((dir / "checkpoint.json").string());

  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  if (valid_set) {
    out.valid = train::evaluate(model, *valid_set, config.threshold, config.threads);
    metrics["valid"] = out.valid->to_json();
  }
  if (test_set) {
    out.test = train::evaluate(model, *test_set, config.threshold, config.threads);
    metrics["test"] = out.test->to_json();
  }
  write_text(dir / "metrics.json", metrics.dump(2) + "\n");
  return out;
}

train::MetricsReport cmd_eval(const mra::Model& model, const train::Dataset& dataset, double threshold,
                              std::size_t threads) {
  return train::evaluate(model, dataset, threshold, threads);
}

std::string cmd_predict(const mra::Model& model, const train::Dataset& dataset, std::size_t threads) {
  const auto outputs = train::predict_outputs(model, dataset, threads);
  std::string text;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    nlohmann::ordered_json line = {{"id", dataset.samples[i].id}, {"output", outputs[i]}};
    if (model.config().task != data::Task::Regression) {
      std::vector<double> p;
      for (double z : outputs[i]) p.push_back(1.0 / (1.0 + std::exp(-z)));
      line["probabilities"] = p;
    }
    text += line.dump() + "\n";
  }
  return text;
}

std::vector<ExplainReport> cmd_explain(const mra::Model& model, const train::Dataset& dataset,
                                       const std::vector<std::string>& ids) {
  std::vector<ExplainReport> reports;
  if (ids.empty()) {
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) reports.push_back(explain_sample(model, dataset, i));
    return reports;
  }
  for (const auto& id : ids) {
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < dataset.samples.size() && !index; ++i) {
      if (dataset.samples[i].id == id) index = i;
    }
    if (!index) fail(ErrorKind::Lookup, "sample id '" + id + "' not found in dataset");
    reports.push_back(explain_sample(model, dataset, *index));
  }
  return reports;
}

train::Dataset erase_everywhere(const train::Dataset& dataset, const data::ModalitySchema& schema,
                                const std::string& modality) {
  train::Dataset out;
  out.hidden = dataset.hidden;
  out.samples.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) out.samples.push_back(data::erase_modality(s, schema, modality));
  return out;
}

std::vector<EraseRow> cmd_erase_eval(const mra::Model& model, const train::Dataset& dataset, double threshold,
                                     std::size_t threads) {
  const auto& schema = model.schema();
  if (schema.size() < 2) fail(ErrorKind::Config, "modality erasure needs at least two modalities");
  std::vector<EraseRow> rows;
  rows.push_back({"baseline", "", train::evaluate(model, dataset, threshold, threads)});
  for (const auto& m : schema.modalities()) {
    const auto erased = erase_everywhere(dataset, schema, m.name);
    // Samples left with no tokens at all cannot be pooled and are dropped.
    train::Dataset kept;
    kept.hidden = erased.hidden;
    for (const auto& s : erased.samples) {
      bool any = false;
      for (const auto& [name, tokens] : s.sequences) any = any || !tokens.empty();
      if (any) kept.samples.push_back(s);
    }
    if (kept.samples.empty()) fail(ErrorKind::DegenerateSample, "erasing '" + m.name + "' empties every sample");
    rows.push_back({"erase", m.name, train::evaluate(model, kept, threshold, threads)});
  }
  return rows;
}

std::string erase_table_csv(const std::vector<EraseRow>& rows) {
  if (rows.empty()) return {};
  const auto cols = metric_columns(rows.front().metrics.task);
  std::string csv = "condition,modality";
  for (const auto& c : cols) csv += "," + c;
  for (const auto& c : cols) csv += ",delta_" + c;
  csv += "\n";
  const auto& base = rows.front().metrics;
  for (const auto& r : rows) {
    csv += r.condition + "," + r.modality;
    for (const auto& c : cols) {
      const auto v = metric_value(r.metrics, c);
      csv += "," + (v ? format_number(*v) : std::string("nan"));
    }
    for (const auto& c : cols) {
      const auto v = metric_value(r.metrics, c);
      const auto b = metric_value(base, c);
      csv += "," + (v && b ? format_number(*v - *b) : std::string("nan"));
    }
    csv += "\n";
  }
  return csv;
}

std::size_t full_grid_size(const AblationSelection& s) {
  return s.variants.size() * s.similarities.size() * s.residuals.size();
}

std::vector<AblationCell> ablation_grid(const AblationSelection& selection) {
  std::vector<AblationCell> cells;
  for (const auto& v : selection.variants) {
    AblationCell base;
    base.variant = v;
    if (v == "encoder_only") {
      cells.push_back(base);
      continue;
    }
    if (v == "intra") {
      base.use_intra = true;
    } else if (v == "inter") {
      base.use_inter = true;
    } else if (v == "both") {
      base.use_intra = base.use_inter = true;
    } else {
      fail(ErrorKind::Config, "unknown ablation variant '" + v + "' (expected encoder_only, intra, inter, both)");
    }
    for (auto sim : selection.similarities) {
      for (bool res : selection.residuals) {
        auto cell = base;
        cell.similarity = sim;
        cell.residual = res;
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

std::vector<AblationRow> cmd_ablate(const RunConfig& config, const AblationSelection& selection, std::ostream* log) {
  require_file(config.schema_path, "schema");
  const auto schema = data::ModalitySchema::load(config.schema_path);
  auto model_cfg = config.model;
  model_cfg.task = schema.task();
  model_cfg.output_dim = schema.output_dim();
  const auto train_set = load_dataset(config.train_path, config.train_hidden, schema, model_cfg);
  std::string split = "train";
  std::optional<train::Dataset> eval_set;
  if (!config.test_path.empty()) {
    eval_set = load_dataset(config.test_path, config.test_hidden, schema, model_cfg);
    split = "test";
  } else if (!config.valid_path.empty()) {
    eval_set = load_dataset(config.valid_path, config.valid_hidden, schema, model_cfg);
    split = "valid";
  }
  const auto& scored = eval_set ? *eval_set : train_set;

  const auto cells = ablation_grid(selection);
  std::vector<AblationRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::mutex log_mutex;
  const auto run_cell = [&](std::size_t i) {
    try {
      auto cell_cfg = config;
      cell_cfg.model.use_intra = cells[i].use_intra;
      cell_cfg.model.use_inter = cells[i].use_inter;
      if (cells[i].similarity) cell_cfg.model.similarity = *cells[i].similarity;
      if (cells[i].residual) cell_cfg.model.use_residual = *cells[i].residual;
      const auto start = Clock::now();
      auto fitted = fit(cell_cfg, schema, train_set, nullptr);
      rows[i].train_seconds = seconds_since(start);
      rows[i].cell = cells[i];
      rows[i].split = split;
      rows[i].metrics = train::evaluate(fitted.model, scored, config.threshold, 1);
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << "ablate " << cells[i].variant
             << (cells[i].similarity ? std::string(" ") + mra::to_string(*cells[i].similarity) : std::string())
             << (cells[i].residual ? (*cells[i].residual ? " residual" : " no-residual") : "") << " done in "
             << rows[i].train_seconds << "s\n";
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, cells.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  if (rows.empty()) return {};
  const auto cols = metric_columns(rows.front().metrics.task);
  std::string csv = "variant,use_intra,use_inter,similarity,residual,split";
  for (const auto& c : cols) csv += "," + c;
  csv += ",train_seconds\n";
  for (const auto& r : rows) {
    csv += r.cell.variant + "," + (r.cell.use_intra ? "1" : "0") + "," + (r.cell.use_inter ? "1" : "0") + "," +
           (r.cell.similarity ? mra::to_string(*r.cell.similarity) : "-") + "," +
           (r.cell.residual ? (*r.cell.residual ? "on" : "off") : "-") + "," + r.split;
    for (const auto& c : cols) {
      const auto v = metric_value(r.metrics, c);
      csv += "," + (v ? format_number(*v) : std::string("nan"));
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.train_seconds);
    csv += std::string(",") + secs + "\n";
  }
  return csv;
}

GradcheckOptions GradcheckOptions::from_json(const nlohmann::json& doc) {
  GradcheckOptions o;
  if (doc.is_null()) return o;
  try {
    o.d = doc.value("d", o.d);
    o.modalities = doc.value("modalities", o.modalities);
    o.max_len = doc.value("max_len", o.max_len);
    o.vocab_size = doc.value("vocab_size", o.vocab_size);
    o.h_mlp = doc.value("h_mlp", o.h_mlp);
    o.samples = doc.value("samples", o.samples);
    o.num_classes = doc.value("num_classes", o.num_classes);
    if (doc.contains("task")) o.task = data::parse_task(doc.at("task").get<std::string>());
    if (doc.contains("similarity")) o.similarity = mra::parse_similarity(doc.at("similarity").get<std::string>());
    o.use_residual = doc.value("use_residual", o.use_residual);
    o.use_intra = doc.value("use_intra", o.use_intra);
    o.use_inter = doc.value("use_inter", o.use_inter);
    o.mixer = doc.value("mixer", o.mixer);
    if (doc.contains("wsce_mode")) o.wsce_mode = train::parse_wsce_mode(doc.at("wsce_mode").get<std::string>());
    o.epsilon = doc.value("epsilon", o.epsilon);
    o.tolerance = doc.value("tolerance", o.tolerance);
    o.seed = doc.value("seed", o.seed);
    o.init_scale = doc.value("init_scale", o.init_scale);
    if (doc.contains("fault")) {
      const auto f = doc.at("fault").get<std::string>();
      if (f == "none") {
        o.fault = ad::Fault::None;
      } else if (f == "tanh_backward") {
        o.fault = ad::Fault::TanhBackward;
      } else {
        fail(ErrorKind::Config, "unknown fault '" + f + "' (expected none or tanh_backward)");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed gradcheck options: ") + e.what());
  }
  if (!(o.init_scale > 0.0)) fail(ErrorKind::Config, "gradcheck init_scale must be positive");
  if (o.d == 0 || o.modalities == 0 || o.max_len == 0 || o.vocab_size == 0 || o.h_mlp == 0 || o.samples == 0) {
    fail(ErrorKind::Config, "gradcheck dimensions must be positive");
  }
  return o;
}

nlohmann::ordered_json GradcheckReport::to_json() const {
  nlohmann::ordered_json g = nlohmann::ordered_json::object();
  for (const auto& [name, err] : groups) g[name] = err;
  return {{"groups", g},
          {"max_relative_error", max_relative_error},
          {"tolerance", tolerance},
          {"passed", passed},
          {"seconds", seconds}};
}

GradcheckReport cmd_gradcheck(const GradcheckOptions& o) {
  const auto start = Clock::now();
  FaultGuard fault(o.fault);

  std::vector<data::ModalitySpec> mods;
  for (std::size_t m = 0; m < o.modalities; ++m) mods.push_back({"m" + std::to_string(m), o.max_len});
  const data::ModalitySchema schema(mods, o.task, o.task == data::Task::Multilabel ? o.num_classes : 1);

  data::Vocabulary vocab;
  for (std::size_t i = 0; i < o.vocab_size; ++i) vocab.add("w" + std::to_string(i));

  Rng rng(o.seed);
  std::vector<data::SequenceSet> samples;
  for (std::size_t j = 0; j < o.samples; ++j) {
    data::SequenceSet s;
    s.id = "g" + std::to_string(j);
    s.label.task = o.task;
    for (std::size_t m = 0; m < o.modalities; ++m) {
      // The second sample leaves its last modality empty to cover the masking path.
      const bool empty = j == 1 && o.modalities > 1 && m + 1 == o.modalities;
      const std::size_t len = empty ? 0 : 1 + static_cast<std::size_t>(rng.below(o.max_len));
      data::TokenList tokens(len);
      for (auto& t : tokens) t = "w" + std::to_string(rng.below(o.vocab_size));
      s.sequences.emplace_back(mods[m].name, std::move(tokens));
    }
    for (std::size_t k = 0; k < schema.output_dim(); ++k) {
      s.label.values.push_back(o.task == data::Task::Regression ? rng.uniform(-1.0, 1.0) : (rng.bernoulli(0.5) ? 1.0 : 0.0));
    }
    samples.push_back(std::move(s));
  }

  mra::ModelConfig cfg;
  cfg.similarity = o.similarity;
  cfg.use_intra = o.use_intra;
  cfg.use_inter = o.use_inter;
  cfg.use_residual = o.use_residual;
  cfg.d = o.d;
  cfg.h_mlp = o.h_mlp;
  cfg.task = o.task;
  cfg.output_dim = schema.output_dim();
  cfg.mixer = o.mixer;
  mra::Model model(cfg, schema, vocab, o.seed + 1);
  // The training initialization keeps attention gradients near 1e-8, where
  // finite differences are dominated by rounding. Check at a livelier point.
  {
    Rng point(o.seed + 2);
    for (auto& p : model.parameters()) {
      const double bound = o.init_scale;
      for (auto& v : p.tensor.mutable_values()) v = point.uniform(-bound, bound);
    }
  }

  train::LossConfig loss_cfg;
  loss_cfg.task = o.task;
  loss_cfg.wsce_mode = o.wsce_mode;
  const auto objective = [&] {
    std::vector<ad::Tensor> preds;
    std::vector<const data::Label*> labels;
    for (const auto& s : samples) {
      preds.push_back(model.forward(s).prediction);
      labels.push_back(&s.label);
    }
    return train::batch_loss(preds, labels, loss_cfg);
  };

  auto params = model.parameter_tensors();
  const auto detailed = ad::grad_check_detailed(objective, params, o.epsilon);

  GradcheckReport r;
  for (std::size_t i = 0; i < params.size(); ++i) {
    r.groups.emplace_back(model.parameters()[i].name, detailed.per_param[i]);
  }
  r.max_relative_error = detailed.max_relative_error;
  r.tolerance = o.tolerance;
  r.passed = r.max_relative_error < o.tolerance;
  r.seconds = seconds_since(start);
  return r;
}

nlohmann::ordered_json cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
  return write_synth(generate_synth(spec), out_dir);
}

}  // namespace seqset::harness
