// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"
#include "rng.hpp"
#include "tensor/tensor.hpp"

namespace seqset::encoder {

// States of one modality's real tokens, [l_m x d]; l_m may be 0.
struct HiddenSequence {
  std::string modality;
  ad::Tensor states;
};

// One residual self-attention block followed by a residual tanh feedforward.
struct MixerParams {
  ad::Tensor query, key, value;  // [d x d]
  ad::Tensor ff_in, ff_out;      // [d x d]
};

struct ToyEncoderParams {
  ad::Tensor embedding;   // [|V| x d]
  ad::Tensor positional;  // [max_positions x d]
  std::optional<MixerParams> mixer;

  std::size_t hidden_size() const { return embedding.cols(); }
  std::size_t max_positions() const { return positional.rows(); }
};

// Draws embedding, positional, then mixer tables uniform in [-0.1, 0.1].
ToyEncoderParams init_toy_encoder(std::size_t vocab_size, std::size_t max_positions, std::size_t d, bool mixer,
                                  Rng& rng);

// Embedding plus absolute position over the whole unified sequence, an
// optional mixer pass over all positions, then one slice per modality span.
std::vector<HiddenSequence> encode_hidden(const data::UnifiedSequence& unified, const ToyEncoderParams& params,
                                          const data::ModalitySchema& schema);

}  // namespace seqset::encoder
