// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"
#include "data/vocab.hpp"
#include "mra/model.hpp"
#include "rng.hpp"

namespace testing {

using namespace seqset;

inline data::ModalitySchema schema_of(std::size_t modalities, std::size_t max_len, data::Task task = data::Task::Binary,
                                      std::size_t classes = 1) {
  std::vector<data::ModalitySpec> specs;
  for (std::size_t m = 0; m < modalities; ++m) specs.push_back({"m" + std::to_string(m), max_len});
  return data::ModalitySchema(specs, task, classes);
}

inline data::Vocabulary vocab_of(std::size_t n) {
  data::Vocabulary v;
  for (std::size_t i = 0; i < n; ++i) v.add("w" + std::to_string(i));
  return v;
}

inline data::Label label_for(data::Task task, std::size_t classes, Rng& rng) {
  data::Label l;
  l.task = task;
  if (task == data::Task::Regression) {
    l.values = {rng.uniform(-1, 1)};
  } else {
    const std::size_t k = task == data::Task::Multilabel ? classes : 1;
    for (std::size_t c = 0; c < k; ++c) l.values.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  return l;
}

// Random sample; each modality empty with probability p_empty, never all empty.
inline data::SequenceSet random_sample(const data::ModalitySchema& schema, std::size_t vocab, Rng& rng,
                                       double p_empty = 0.2, std::size_t max_tokens = 5) {
  data::SequenceSet s;
  s.id = "s" + std::to_string(rng.below(1000000));
  bool any = false;
  for (std::size_t m = 0; m < schema.size(); ++m) {
    data::TokenList toks;
    if (!rng.bernoulli(p_empty) || (m + 1 == schema.size() && !any)) {
      const std::size_t len = 1 + rng.below(max_tokens);
      for (std::size_t t = 0; t < len; ++t) toks.push_back("w" + std::to_string(rng.below(vocab)));
    }
    any = any || !toks.empty();
    s.sequences.emplace_back(schema.name(m), std::move(toks));
  }
  s.label = label_for(schema.task(), schema.num_classes(), rng);
  return s;
}

inline mra::ModelConfig config_for(const data::ModalitySchema& schema, std::size_t d = 8, std::size_t h = 8) {
  mra::ModelConfig c;
  c.d = d;
  c.h_mlp = h;
  c.task = schema.task();
  c.output_dim = schema.output_dim();
  return c;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("seqset_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
