// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "harness/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "data/jsonl.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace seqset::harness {

namespace fs = std::filesystem;

namespace {
std::string token_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tok%03zu", i);
  return buf;
}

std::string modality_name(std::size_t m) { return "m" + std::to_string(m); }

std::size_t key_count(const SynthSpec& s) { return s.task == data::Task::Binary ? 2 : s.num_classes; }

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}
}  // namespace

SynthSpec SynthSpec::from_json(const nlohmann::json& doc) {
  SynthSpec s;
  try {
    s.modalities = doc.value("modalities", s.modalities);
    s.vocab_size = doc.value("vocab_size", s.vocab_size);
    s.min_len = doc.value("min_len", s.min_len);
    s.max_len = doc.value("max_len", s.max_len);
    if (doc.contains("task")) s.task = data::parse_task(doc.at("task").get<std::string>());
    s.num_classes = doc.value("num_classes", s.num_classes);
    s.key_modality = doc.value("key_modality", s.key_modality);
    s.n_train = doc.value("n_train", s.n_train);
    s.n_valid = doc.value("n_valid", s.n_valid);
    s.n_test = doc.value("n_test", s.n_test);
    s.seed = doc.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed synth spec: ") + e.what());
  }
  return s;
}

nlohmann::ordered_json SynthSpec::to_json() const {
  return {{"modalities", modalities}, {"vocab_size", vocab_size}, {"min_len", min_len},
          {"max_len", max_len},       {"task", data::to_string(task)}, {"num_classes", num_classes},
          {"key_modality", key_modality}, {"n_train", n_train}, {"n_valid", n_valid},
          {"n_test", n_test},         {"seed", seed}};
}

SynthDataset generate_synth(const SynthSpec& spec) {
  if (spec.modalities < 1) fail(ErrorKind::Config, "synth needs at least one modality");
  if (spec.key_modality >= spec.modalities) fail(ErrorKind::Config, "key_modality outside the modality range");
  if (spec.min_len < 1 || spec.min_len > spec.max_len) fail(ErrorKind::Config, "synth needs 1 <= min_len <= max_len");
  if (spec.task != data::Task::Binary && spec.num_classes < 2) fail(ErrorKind::Config, "num_classes must be >= 2");
  const std::size_t keys = key_count(spec);
  if (spec.vocab_size < keys + 1) fail(ErrorKind::Config, "vocab_size leaves no room for noise tokens");
  if (spec.task == data::Task::Multilabel && spec.min_len < keys) {
    fail(ErrorKind::Config, "multilabel synth needs min_len >= num_classes so every key fits");
  }
  if (spec.n_train == 0) fail(ErrorKind::Config, "n_train must be positive");

  std::vector<data::ModalitySpec> mods;
  for (std::size_t m = 0; m < spec.modalities; ++m) mods.push_back({modality_name(m), spec.max_len});
  data::ModalitySchema schema(mods, spec.task, spec.task == data::Task::Multilabel ? spec.num_classes : 1);

  Rng rng(spec.seed);
  const std::size_t noise_count = spec.vocab_size - keys;
  const auto noise = [&] { return token_name(keys + static_cast<std::size_t>(rng.below(noise_count))); };
  const auto length = [&] {
    return spec.min_len + static_cast<std::size_t>(rng.below(spec.max_len - spec.min_len + 1));
  };

  const auto make = [&](const std::string& id) {
    data::SequenceSet s;
    s.id = id;
    s.label.task = spec.task;
    for (std::size_t m = 0; m < spec.modalities; ++m) {
      data::TokenList tokens(length());
      for (auto& t : tokens) t = noise();
      if (m == spec.key_modality) {
        std::vector<std::size_t> slots(tokens.size());
        for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
        rng.shuffle(std::span<std::size_t>(slots));
        switch (spec.task) {
          case data::Task::Binary: {
            const bool positive = rng.bernoulli(0.5);
            tokens[slots[0]] = token_name(positive ? 0 : 1);
            s.label.values = {positive ? 1.0 : 0.0};
            break;
          }
          case data::Task::Multilabel: {
            std::size_t used = 0;
            for (std::size_t k = 0; k < keys; ++k) {
              const bool on = rng.bernoulli(0.5);
              s.label.values.push_back(on ? 1.0 : 0.0);
              if (on) tokens[slots[used++]] = token_name(k);
            }
            break;
          }
          case data::Task::Regression: {
            const auto k = static_cast<std::size_t>(rng.below(keys));
            tokens[slots[0]] = token_name(k);
            s.label.values = {static_cast<double>(k + 1) / static_cast<double>(keys)};
            break;
          }
        }
      }
      s.sequences.emplace_back(modality_name(m), std::move(tokens));
    }
    return s;
  };

  SynthDataset out{schema, {}, {}, {}, {}};
  for (std::size_t i = 0; i < spec.n_train; ++i) out.train.push_back(make("train-" + std::to_string(i)));
  for (std::size_t i = 0; i < spec.n_valid; ++i) out.valid.push_back(make("valid-" + std::to_string(i)));
  for (std::size_t i = 0; i < spec.n_test; ++i) out.test.push_back(make("test-" + std::to_string(i)));

  nlohmann::ordered_json key_map = nlohmann::ordered_json::object();
  std::string rule;
  switch (spec.task) {
    case data::Task::Binary:
      key_map[token_name(0)] = 1;
      key_map[token_name(1)] = 0;
      rule = "label is 1 when key_modality holds " + token_name(0) + " and 0 when it holds " + token_name(1);
      break;
    case data::Task::Multilabel:
      for (std::size_t k = 0; k < keys; ++k) key_map[token_name(k)] = k;
      rule = "class k is on iff key_modality holds the key token mapped to k";
      break;
    case data::Task::Regression:
      for (std::size_t k = 0; k < keys; ++k) key_map[token_name(k)] = static_cast<double>(k + 1) / static_cast<double>(keys);
      rule = "target is the value of the key token held by key_modality";
      break;
  }
  const auto base_rate = [&](const std::vector<data::SequenceSet>& split) {
    if (split.empty() || spec.task == data::Task::Regression) return nlohmann::ordered_json(nullptr);
    double on = 0, total = 0;
    for (const auto& s : split)
      for (double v : s.label.values) {
        on += v;
        total += 1;
      }
    return nlohmann::ordered_json(on / total);
  };
  out.manifest = {{"generator", "planted-signal"},
                  {"spec", spec.to_json()},
                  {"task", data::to_string(spec.task)},
                  {"key_modality", modality_name(spec.key_modality)},
                  {"keys", key_map},
                  {"rule", rule},
                  {"splits",
                   {{"train", {{"samples", out.train.size()}, {"base_rate", base_rate(out.train)}}},
                    {"valid", {{"samples", out.valid.size()}, {"base_rate", base_rate(out.valid)}}},
                    {"test", {{"samples", out.test.size()}, {"base_rate", base_rate(out.test)}}}}}};
  return out;
}

nlohmann::ordered_json write_synth(const SynthDataset& data, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + out_dir + ": " + ec.message());
  write_json(dir / "schema.json", data.schema.to_json());
  data::write_jsonl((dir / "train.jsonl").string(), data.train);
  if (!data.valid.empty()) data::write_jsonl((dir / "valid.jsonl").string(), data.valid);
  if (!data.test.empty()) data::write_jsonl((dir / "test.jsonl").string(), data.test);
  auto manifest = data.manifest;
  manifest["files"] = {{"schema", "schema.json"},
                       {"train", "train.jsonl"},
                       {"valid", data.valid.empty() ? "" : "valid.jsonl"},
                       {"test", data.test.empty() ? "" : "test.jsonl"}};
  write_json(dir / "manifest.json", manifest);
  nlohmann::ordered_json config = {{"schema", "schema.json"},
                                   {"train", "train.jsonl"},
                                   {"valid", data.valid.empty() ? "" : "valid.jsonl"},
                                   {"test", data.test.empty() ? "" : "test.jsonl"},
                                   {"model", {{"d", 32}, {"h_mlp", 64}}},
                                   {"seed", data.manifest["spec"]["seed"]},
                                   {"out", "run"}};
  write_json(dir / "config.json", config);
  return manifest;
}

data::Label planted_label(const data::SequenceSet& sample, const nlohmann::json& manifest) {
  const auto task = data::parse_task(manifest.at("task").get<std::string>());
  const auto key_modality = manifest.at("key_modality").get<std::string>();
  const auto& keys = manifest.at("keys");
  data::Label label{task, {}};
  if (task == data::Task::Multilabel) label.values.assign(keys.size(), 0.0);
  const auto* tokens = sample.find(key_modality);
  if (!tokens) return label;
  for (const auto& t : *tokens) {
    if (!keys.contains(t)) continue;
    if (task == data::Task::Multilabel) {
      label.values.at(keys.at(t).get<std::size_t>()) = 1.0;
    } else {
      label.values = {keys.at(t).get<double>()};
    }
  }
  return label;
}

}  // namespace seqset::harness
