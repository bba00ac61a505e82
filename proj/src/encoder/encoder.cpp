// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "encoder/encoder.hpp"

#include <cmath>
#include <numeric>

#include "error.hpp"
#include "tensor/ops.hpp"

namespace seqset::encoder {

namespace {
ad::Tensor uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return ad::Tensor::from_values({rows, cols}, std::move(v), true);
}

ad::Tensor apply_mixer(const ad::Tensor& x, const MixerParams& mix) {
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  const auto q = ad::matmul(x, mix.query);
  const auto k = ad::matmul(x, mix.key);
  const auto v = ad::matmul(x, mix.value);
  const auto attn = ad::softmax_rows(ad::scale(ad::matmul(q, ad::transpose(k)), inv_sqrt_d));
  const auto mixed = ad::add(x, ad::matmul(attn, v));
  return ad::add(mixed, ad::matmul(ad::tanh(ad::matmul(mixed, mix.ff_in)), mix.ff_out));
}
}  // namespace

ToyEncoderParams init_toy_encoder(std::size_t vocab_size, std::size_t max_positions, std::size_t d, bool mixer,
                                  Rng& rng) {
  if (d == 0 || vocab_size == 0 || max_positions == 0) fail(ErrorKind::Config, "encoder dimensions must be positive");
  ToyEncoderParams p;
  p.embedding = uniform_matrix(vocab_size, d, 0.1, rng);
  p.positional = uniform_matrix(max_positions, d, 0.1, rng);
  if (mixer) {
    MixerParams m;
    m.query = uniform_matrix(d, d, 0.1, rng);
    m.key = uniform_matrix(d, d, 0.1, rng);
    m.value = uniform_matrix(d, d, 0.1, rng);
    m.ff_in = uniform_matrix(d, d, 0.1, rng);
    m.ff_out = uniform_matrix(d, d, 0.1, rng);
    p.mixer = std::move(m);
  }
  return p;
}

std::vector<HiddenSequence> encode_hidden(const data::UnifiedSequence& unified, const ToyEncoderParams& params,
                                          const data::ModalitySchema& schema) {
  const std::size_t n = unified.ids.size();
  if (n > params.max_positions()) {
    fail(ErrorKind::Capacity, "unified sequence of length " + std::to_string(n) + " exceeds " +
                                  std::to_string(params.max_positions()) + " positions");
  }
  if (unified.segment_spans.size() != schema.size()) {
    fail(ErrorKind::Dimension, "unified sequence has " + std::to_string(unified.segment_spans.size()) +
                                   " spans for " + std::to_string(schema.size()) + " modalities");
  }
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  auto x = ad::add(ad::gather_rows(params.embedding, unified.ids), ad::gather_rows(params.positional, positions));
  if (params.mixer) x = apply_mixer(x, *params.mixer);

  std::vector<HiddenSequence> out;
  out.reserve(schema.size());
  for (std::size_t m = 0; m < schema.size(); ++m) {
    const auto& span = unified.segment_spans[m];
    out.push_back({schema.name(m), ad::slice_rows(x, span.begin, span.end)});
  }
  return out;
}

}  // namespace seqset::encoder
