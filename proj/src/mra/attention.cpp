// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "mra/attention.hpp"

#include <cmath>

#include "error.hpp"
#include "tensor/ops.hpp"

namespace seqset::mra {

const char* to_string(Similarity s) noexcept { return s == Similarity::Additive ? "additive" : "scaled_dot"; }

Similarity parse_similarity(std::string_view text) {
  if (text == "additive") return Similarity::Additive;
  if (text == "scaled_dot") return Similarity::ScaledDot;
  fail(ErrorKind::Config, "unknown similarity '" + std::string(text) + "' (expected additive or scaled_dot)");
}

nlohmann::ordered_json ModelConfig::to_json() const {
  return {{"similarity", mra::to_string(similarity)},
          {"use_intra", use_intra},
          {"use_inter", use_inter},
          {"use_residual", use_residual},
          {"d", d},
          {"h_mlp", h_mlp},
          {"output_dim", output_dim},
          {"task", data::to_string(task)},
          {"encoder", encoder == EncoderKind::Toy ? "toy" : "precomputed"},
          {"mixer", mixer}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
  ModelConfig c;
  try {
    if (doc.contains("similarity")) c.similarity = parse_similarity(doc.at("similarity").get<std::string>());
    c.use_intra = doc.value("use_intra", c.use_intra);
    c.use_inter = doc.value("use_inter", c.use_inter);
    c.use_residual = doc.value("use_residual", c.use_residual);
    const auto positive = [&](const char* key, std::size_t fallback) {
      if (!doc.contains(key)) return fallback;
      const auto v = doc.at(key).get<long long>();
      if (v <= 0) fail(ErrorKind::Config, std::string(key) + " must be positive");
      return static_cast<std::size_t>(v);
    };
    c.d = positive("d", c.d);
    c.h_mlp = positive("h_mlp", c.h_mlp);
    c.output_dim = positive("output_dim", c.output_dim);
    if (doc.contains("task")) c.task = data::parse_task(doc.at("task").get<std::string>());
    if (doc.contains("encoder")) {
      const auto e = doc.at("encoder").get<std::string>();
      if (e == "toy") {
        c.encoder = EncoderKind::Toy;
      } else if (e == "precomputed") {
        c.encoder = EncoderKind::Precomputed;
      } else {
        fail(ErrorKind::Config, "unknown encoder '" + e + "' (expected toy or precomputed)");
      }
    }
    c.mixer = doc.value("mixer", c.mixer);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed model config: ") + e.what());
  }
  return c;
}

ad::Tensor similarity(const ad::Tensor& H, const AttentionParams& params, Similarity kind) {
  if (H.rank() != 2 || H.rows() == 0) fail(ErrorKind::Dimension, "similarity needs a non-empty [l x d] input");
  const std::size_t d = H.cols();
  if (params.weight.shape() != ad::Shape{d, d} || params.query.shape() != ad::Shape{d}) {
    fail(ErrorKind::Dimension, "similarity parameters " + ad::shape_string(params.weight.shape()) + "/" +
                                   ad::shape_string(params.query.shape()) + " do not fit states " +
                                   ad::shape_string(H.shape()));
  }
  // Row t of H W^T is W H_t.
  const auto projected = ad::matmul(H, ad::transpose(params.weight));
  if (kind == Similarity::Additive) return ad::matmul(ad::tanh(projected), params.query);
  return ad::scale(ad::matmul(projected, params.query), 1.0 / std::sqrt(static_cast<double>(d)));
}

ad::Tensor attention_weights(const ad::Tensor& H, const AttentionParams& params, Similarity kind) {
  const auto scores = similarity(H, params, kind);
  return ad::masked_softmax(scores, std::vector<bool>(scores.size(), true));
}

IntraResult intra_mra(const ad::Tensor& H, const AttentionParams& params, const ModelConfig& config) {
  if (H.rows() == 0) return {H, {}};
  const auto a = attention_weights(H, params, config.similarity);
  auto attended = ad::scale_rows(H, a);
  if (config.use_residual) attended = ad::add(attended, H);
  return {attended, std::vector<double>(a.values().begin(), a.values().end())};
}

Summaries modality_summaries(const std::vector<ad::Tensor>& intra_outputs, std::size_t d) {
  Summaries s;
  std::vector<ad::Tensor> rows;
  bool any = false;
  for (const auto& out : intra_outputs) {
    const bool nonempty = out.rows() > 0;
    any = any || nonempty;
    s.nonempty.push_back(nonempty);
    rows.push_back(nonempty ? ad::sum_rows(out) : ad::Tensor::zeros({d}));
  }
  if (!any) fail(ErrorKind::DegenerateSample, "every modality is empty");
  s.rows = ad::stack(rows);
  return s;
}

InterResult inter_mra(const std::vector<ad::Tensor>& intra_outputs, const Summaries& summaries,
                      const AttentionParams& params, const ModelConfig& config) {
  bool any = false;
  for (bool b : summaries.nonempty) any = any || b;
  if (!any) fail(ErrorKind::DegenerateSample, "inter-modality attention with no non-empty modality");
  const auto scores = similarity(summaries.rows, params, config.similarity);
  const auto a = ad::masked_softmax(scores, summaries.nonempty);

  InterResult r;
  r.weights.assign(a.values().begin(), a.values().end());
  for (std::size_t m = 0; m < intra_outputs.size(); ++m) {
    if (!summaries.nonempty[m]) {
      r.outputs.push_back(intra_outputs[m]);
      continue;
    }
    auto attended = ad::scale_by_scalar(intra_outputs[m], ad::element(a, m));
    if (config.use_residual) attended = ad::add(attended, intra_outputs[m]);
    r.outputs.push_back(std::move(attended));
  }
  return r;
}

Prediction pool_and_predict(const std::vector<ad::Tensor>& token_states, const HeadParams& head, std::size_t d) {
  std::size_t total = 0;
  for (const auto& t : token_states) total += t.rows();
  if (total == 0) fail(ErrorKind::DegenerateSample, "mean pooling over zero tokens");
  const auto all = token_states.size() == 1 ? token_states.front() : ad::concat_rows(token_states, d);
  Prediction p;
  p.pooled = ad::mean_rows(all);
  const auto hidden = ad::tanh(ad::add(ad::matmul(head.w1, p.pooled), head.b1));
  p.output = ad::add(ad::matmul(head.w2, hidden), head.b2);
  return p;
}

StackResult apply_stack(const std::vector<ad::Tensor>& hidden, const MraParameters& mra, const HeadParams& head,
                        const ModelConfig& config) {
  if (hidden.size() != mra.intra.size()) {
    fail(ErrorKind::Dimension, std::to_string(hidden.size()) + " hidden sequences for " +
                                   std::to_string(mra.intra.size()) + " modalities");
  }
  StackResult result;
  auto& rec = result.attention;
  const std::size_t M = hidden.size();

  std::vector<ad::Tensor> intra_out;
  intra_out.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& H = hidden[m];
    if (H.rank() != 2 || H.cols() != config.d) {
      fail(ErrorKind::Dimension, "hidden states " + ad::shape_string(H.shape()) + " do not have width d=" +
                                     std::to_string(config.d));
    }
    rec.empty.push_back(H.rows() == 0);
    if (config.use_intra) {
      auto r = intra_mra(H, mra.intra[m], config);
      intra_out.push_back(std::move(r.output));
      rec.intra.push_back(std::move(r.weights));
    } else {
      intra_out.push_back(H);
      rec.intra.emplace_back(H.rows(), H.rows() ? 1.0 / static_cast<double>(H.rows()) : 0.0);
    }
  }

  std::vector<ad::Tensor> inter_out;
  if (config.use_inter) {
    const auto summaries = modality_summaries(intra_out, config.d);
    auto r = inter_mra(intra_out, summaries, mra.inter, config);
    inter_out = std::move(r.outputs);
    rec.inter = std::move(r.weights);
  } else {
    std::size_t nonempty = 0;
    for (bool e : rec.empty) nonempty += e ? 0 : 1;
    if (nonempty == 0) fail(ErrorKind::DegenerateSample, "every modality is empty");
    for (bool e : rec.empty) rec.inter.push_back(e ? 0.0 : 1.0 / static_cast<double>(nonempty));
    inter_out = std::move(intra_out);
  }

  result.prediction = pool_and_predict(inter_out, head, config.d);
  return result;
}

}  // namespace seqset::mra
