// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"
#include "data/vocab.hpp"
#include "encoder/encoder.hpp"
#include "mra/attention.hpp"

namespace seqset::mra {

struct NamedParam {
  std::string name;
  ad::Tensor tensor;
  bool decay = false;  // decoupled weight decay applies to matrices only
};

struct ForwardResult {
  ad::Tensor prediction;  // [output_dim]
  ad::Tensor pooled;      // [d]
  AttentionRecord attention;
};

// f(X) = head(pool(inter(intra(encode(X))))) with every parameter it needs.
// Initialisation consumes one seeded stream in a fixed order (encoder tables,
// intra pairs in canonical order, inter pair, head), so configurations that
// differ only in MRA flags start from identical weights.
class Model {
 public:
  Model(ModelConfig config, data::ModalitySchema schema, data::Vocabulary vocab, std::uint64_t seed);
  // Tensors are shared handles; a copy would alias the parameters.
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const noexcept { return config_; }
  const data::ModalitySchema& schema() const noexcept { return schema_; }
  const data::Vocabulary& vocab() const noexcept { return vocab_; }
  const std::optional<encoder::ToyEncoderParams>& encoder() const noexcept { return encoder_; }
  const MraParameters& mra() const noexcept { return mra_; }
  const HeadParams& head() const noexcept { return head_; }

  // Canonical names: embedding, positional, mixer.*, intra.W.<m>, intra.q.<m>,
  // inter.W, inter.q, head.W1, head.b1, head.W2, head.b2.
  std::vector<NamedParam>& parameters() noexcept { return params_; }
  const std::vector<NamedParam>& parameters() const noexcept { return params_; }
  std::vector<ad::Tensor> parameter_tensors() const;
  const ad::Tensor& parameter(const std::string& name) const;

  std::vector<encoder::HiddenSequence> encode(const data::SequenceSet& sample) const;
  ForwardResult forward(const data::SequenceSet& sample) const;
  ForwardResult forward_hidden(const std::vector<encoder::HiddenSequence>& hidden) const;

  nlohmann::ordered_json to_checkpoint() const;
  static Model from_checkpoint(const nlohmann::json& doc);
  void save(const std::string& path) const;
  static Model load(const std::string& path);

 private:
  void register_params();

  ModelConfig config_;
  data::ModalitySchema schema_;
  data::Vocabulary vocab_;
  std::optional<encoder::ToyEncoderParams> encoder_;
  MraParameters mra_;
  HeadParams head_;
  std::vector<NamedParam> params_;
};

}  // namespace seqset::mra
