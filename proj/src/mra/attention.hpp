// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// Modality residual attention: token-level attention inside each modality,
// then modality-level attention over per-modality summaries, then mean
// pooling over every real token and a two-layer perceptron.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "data/schema.hpp"
#include "tensor/tensor.hpp"

namespace seqset::mra {

enum class Similarity { Additive, ScaledDot };

const char* to_string(Similarity s) noexcept;
Similarity parse_similarity(std::string_view text);

enum class EncoderKind { Toy, Precomputed };

struct ModelConfig {
  Similarity similarity = Similarity::Additive;
  bool use_intra = true;
  bool use_inter = true;
  bool use_residual = true;
  std::size_t d = 32;
  std::size_t h_mlp = 64;
  std::size_t output_dim = 1;
  data::Task task = data::Task::Binary;
  EncoderKind encoder = EncoderKind::Toy;
  bool mixer = false;

  nlohmann::ordered_json to_json() const;
  static ModelConfig from_json(const nlohmann::json& doc);
  bool operator==(const ModelConfig&) const = default;
};

// Trainable (W, q) of one alignment function.
struct AttentionParams {
  ad::Tensor weight;  // [d x d]
  ad::Tensor query;   // [d]
};

struct MraParameters {
  std::vector<AttentionParams> intra;  // canonical modality order
  AttentionParams inter;
};

struct HeadParams {
  ad::Tensor w1;  // [h_mlp x d]
  ad::Tensor b1;  // [h_mlp]
  ad::Tensor w2;  // [output_dim x h_mlp]
  ad::Tensor b2;  // [output_dim]
};

// Weights are stored in canonical order. Empty modalities have an empty intra
// list and an inter weight of exactly 0.
struct AttentionRecord {
  std::vector<std::vector<double>> intra;
  std::vector<double> inter;
  std::vector<bool> empty;
};

// Additive: q^T tanh(W H_t).  Scaled dot: q^T W H_t / sqrt(d).  H is [l x d].
ad::Tensor similarity(const ad::Tensor& H, const AttentionParams& params, Similarity kind);

// Alignment over all rows of H.
ad::Tensor attention_weights(const ad::Tensor& H, const AttentionParams& params, Similarity kind);

struct IntraResult {
  ad::Tensor output;            // [l_m x d]
  std::vector<double> weights;  // l_m entries
};

// a_t * H_t (+ H_t with residual). l_m == 0 passes through with no weights.
IntraResult intra_mra(const ad::Tensor& H, const AttentionParams& params, const ModelConfig& config);

struct Summaries {
  ad::Tensor rows;             // [M x d]; zero row for empty modalities
  std::vector<bool> nonempty;  // M entries
};

Summaries modality_summaries(const std::vector<ad::Tensor>& intra_outputs, std::size_t d);

struct InterResult {
  std::vector<ad::Tensor> outputs;  // per modality [l_m x d]
  std::vector<double> weights;      // M entries, 0 on empty modalities
};

InterResult inter_mra(const std::vector<ad::Tensor>& intra_outputs, const Summaries& summaries,
                      const AttentionParams& params, const ModelConfig& config);

struct Prediction {
  ad::Tensor pooled;  // h, [d]
  ad::Tensor output;  // logits or regression value, [output_dim]
};

Prediction pool_and_predict(const std::vector<ad::Tensor>& token_states, const HeadParams& head, std::size_t d);

// Full modality stack on already-encoded states, with bypasses per config.
struct StackResult {
  Prediction prediction;
  AttentionRecord attention;
};

StackResult apply_stack(const std::vector<ad::Tensor>& hidden, const MraParameters& mra, const HeadParams& head,
                        const ModelConfig& config);

}  // namespace seqset::mra
