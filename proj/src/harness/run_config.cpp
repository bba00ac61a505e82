// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "harness/run_config.hpp"

#include <filesystem>
#include <fstream>

#include "error.hpp"

namespace seqset::harness {

namespace fs = std::filesystem;

namespace {
std::string resolve(const nlohmann::json& doc, const char* key, const std::string& base) {
  if (!doc.contains(key) || doc.at(key).is_null()) return {};
  const fs::path p = doc.at(key).get<std::string>();
  if (p.empty()) return {};
  return (p.is_absolute() || base.empty() ? p : fs::path(base) / p).lexically_normal().string();
}

std::size_t positive(const nlohmann::json& doc, const char* key, std::size_t fallback) {
  if (!doc.contains(key)) return fallback;
  const auto v = doc.at(key).get<long long>();
  if (v <= 0) fail(ErrorKind::Config, std::string(key) + " must be positive");
  return static_cast<std::size_t>(v);
}

void apply_optimizer(train::TrainConfig& t, const nlohmann::json& o) {
  t.peak_lr = o.value("peak_lr", t.peak_lr);
  t.warmup_epochs = o.value("warmup_epochs", t.warmup_epochs);
  t.epochs = positive(o, "epochs", t.epochs);
  t.batch_size = positive(o, "batch_size", t.batch_size);
  t.adam.weight_decay = o.value("weight_decay", t.adam.weight_decay);
  t.adam.beta1 = o.value("beta1", t.adam.beta1);
  t.adam.beta2 = o.value("beta2", t.adam.beta2);
  t.adam.eps = o.value("eps", t.adam.eps);
  t.patience = o.value("patience", t.patience);
  if (o.contains("schedule")) {
    const auto s = o.at("schedule").get<std::string>();
    if (s == "warmup_cosine") {
      t.schedule = train::ScheduleKind::WarmupCosine;
    } else if (s == "constant") {
      t.schedule = train::ScheduleKind::Constant;
    } else {
      fail(ErrorKind::Config, "unknown schedule '" + s + "' (expected warmup_cosine or constant)");
    }
  }
  if (t.peak_lr < 0) fail(ErrorKind::Config, "peak_lr must be non-negative");
  if (t.adam.weight_decay < 0) fail(ErrorKind::Config, "weight_decay must be non-negative");
}
}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& doc, const std::string& base_dir) {
  RunConfig c;
  try {
    if (!doc.is_object()) fail(ErrorKind::Config, "run config must be a JSON object");
    c.schema_path = resolve(doc, "schema", base_dir);
    c.train_path = resolve(doc, "train", base_dir);
    c.valid_path = resolve(doc, "valid", base_dir);
    c.test_path = resolve(doc, "test", base_dir);
    if (doc.contains("hidden_states")) {
      const auto& h = doc.at("hidden_states");
      c.train_hidden = resolve(h, "train", base_dir);
      c.valid_hidden = resolve(h, "valid", base_dir);
      c.test_hidden = resolve(h, "test", base_dir);
    }
    if (doc.contains("model")) c.model = mra::ModelConfig::from_json(doc.at("model"));
    if (doc.contains("vocab")) c.min_count = positive(doc.at("vocab"), "min_count", c.min_count);
    if (doc.contains("optimizer")) apply_optimizer(c.train, doc.at("optimizer"));
    if (doc.contains("loss")) {
      const auto& l = doc.at("loss");
      if (l.contains("wsce_mode")) c.train.wsce_mode = train::parse_wsce_mode(l.at("wsce_mode").get<std::string>());
      c.train.class_weighting = l.value("class_weights", c.train.class_weighting);
    }
    c.threshold = doc.value("threshold", c.threshold);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("out")) c.out_dir = resolve(doc, "out", base_dir);
    c.threads = positive(doc, "threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed run config: ") + e.what());
  }
  c.train.seed = c.seed;
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

nlohmann::ordered_json RunConfig::to_json() const {
  auto model_json = model.to_json();
  nlohmann::ordered_json j;
  j["schema"] = schema_path;
  j["train"] = train_path;
  j["valid"] = valid_path;
  j["test"] = test_path;
  j["hidden_states"] = {{"train", train_hidden}, {"valid", valid_hidden}, {"test", test_hidden}};
  j["model"] = model_json;
  j["vocab"] = {{"min_count", min_count}};
  j["optimizer"] = {{"schedule", train.schedule == train::ScheduleKind::WarmupCosine ? "warmup_cosine" : "constant"},
                    {"peak_lr", train.peak_lr},
                    {"warmup_epochs", train.warmup_epochs},
                    {"epochs", train.epochs},
                    {"batch_size", train.batch_size},
                    {"weight_decay", train.adam.weight_decay},
                    {"beta1", train.adam.beta1},
                    {"beta2", train.adam.beta2},
                    {"eps", train.adam.eps},
                    {"patience", train.patience}};
  j["loss"] = {{"wsce_mode", train::to_string(train.wsce_mode)}, {"class_weights", train.class_weighting}};
  j["threshold"] = threshold;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["threads"] = threads;
  return j;
}

void apply_overrides(RunConfig& config, const nlohmann::json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) fail(ErrorKind::Config, "overrides must be a JSON object");
  try {
    if (overrides.contains("seed")) {
      config.seed = overrides.at("seed").get<std::uint64_t>();
      config.train.seed = config.seed;
    }
    if (overrides.contains("out")) config.out_dir = overrides.at("out").get<std::string>();
    if (overrides.contains("threads")) config.threads = positive(overrides, "threads", config.threads);
    if (overrides.contains("model")) {
      auto merged = config.model.to_json();
      for (const auto& [k, v] : overrides.at("model").items()) merged[k] = v;
      config.model = mra::ModelConfig::from_json(merged);
    }
    if (overrides.contains("optimizer")) apply_optimizer(config.train, overrides.at("optimizer"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed overrides: ") + e.what());
  }
}

}  // namespace seqset::harness
