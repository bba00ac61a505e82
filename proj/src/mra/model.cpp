// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "mra/model.hpp"

#include <cmath>
#include <fstream>

#include "error.hpp"
#include "rng.hpp"

namespace seqset::mra {

namespace {
ad::Tensor uniform(ad::Shape shape, double bound, Rng& rng) {
  std::vector<double> v(ad::element_count(shape));
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return ad::Tensor::from_values(std::move(shape), std::move(v), true);
}
}  // namespace

Model::Model(ModelConfig config, data::ModalitySchema schema, data::Vocabulary vocab, std::uint64_t seed)
    : config_(config), schema_(std::move(schema)), vocab_(std::move(vocab)) {
  if (config_.task != schema_.task()) {
    fail(ErrorKind::TaskMismatch, std::string("model task ") + data::to_string(config_.task) + " vs schema task " +
                                      data::to_string(schema_.task()));
  }
  if (config_.output_dim != schema_.output_dim()) {
    fail(ErrorKind::Config, "output_dim " + std::to_string(config_.output_dim) + " but the task needs " +
                                std::to_string(schema_.output_dim()));
  }
  Rng rng(seed);
  const std::size_t d = config_.d;
  if (config_.encoder == EncoderKind::Toy) {
    encoder_ = encoder::init_toy_encoder(vocab_.size(), schema_.max_unified_length(), d, config_.mixer, rng);
  }
  for (std::size_t m = 0; m < schema_.size(); ++m) {
    AttentionParams p;
    p.weight = uniform({d, d}, 0.1, rng);
    p.query = uniform({d}, 0.1, rng);
    mra_.intra.push_back(std::move(p));
  }
  mra_.inter.weight = uniform({d, d}, 0.1, rng);
  mra_.inter.query = uniform({d}, 0.1, rng);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(config_.h_mlp));
  head_.w1 = uniform({config_.h_mlp, d}, b1, rng);
  head_.b1 = ad::Tensor::zeros({config_.h_mlp}, true);
  head_.w2 = uniform({config_.output_dim, config_.h_mlp}, b2, rng);
  head_.b2 = ad::Tensor::zeros({config_.output_dim}, true);
  register_params();
}

void Model::register_params() {
  params_.clear();
  const auto add = [&](std::string name, const ad::Tensor& t) {
    params_.push_back({std::move(name), t, t.rank() == 2});
  };
  if (encoder_) {
    add("embedding", encoder_->embedding);
    add("positional", encoder_->positional);
    if (encoder_->mixer) {
      add("mixer.query", encoder_->mixer->query);
      add("mixer.key", encoder_->mixer->key);
      add("mixer.value", encoder_->mixer->value);
      add("mixer.ff_in", encoder_->mixer->ff_in);
      add("mixer.ff_out", encoder_->mixer->ff_out);
    }
  }
  for (std::size_t m = 0; m < schema_.size(); ++m) {
    add("intra.W." + schema_.name(m), mra_.intra[m].weight);
    add("intra.q." + schema_.name(m), mra_.intra[m].query);
  }
  add("inter.W", mra_.inter.weight);
  add("inter.q", mra_.inter.query);
  add("head.W1", head_.w1);
  add("head.b1", head_.b1);
  add("head.W2", head_.w2);
  add("head.b2", head_.b2);
}

std::vector<ad::Tensor> Model::parameter_tensors() const {
  std::vector<ad::Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

const ad::Tensor& Model::parameter(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  fail(ErrorKind::Lookup, "no parameter named '" + name + "'");
}

std::vector<encoder::HiddenSequence> Model::encode(const data::SequenceSet& sample) const {
  if (!encoder_) fail(ErrorKind::Config, "model uses precomputed hidden states; call forward_hidden");
  return encoder::encode_hidden(data::encode(sample, vocab_, schema_), *encoder_, schema_);
}

ForwardResult Model::forward(const data::SequenceSet& sample) const { return forward_hidden(encode(sample)); }

ForwardResult Model::forward_hidden(const std::vector<encoder::HiddenSequence>& hidden) const {
  if (hidden.size() != schema_.size()) {
    fail(ErrorKind::Dimension, std::to_string(hidden.size()) + " hidden sequences for " +
                                   std::to_string(schema_.size()) + " modalities");
  }
  std::vector<ad::Tensor> states;
  states.reserve(hidden.size());
  for (std::size_t m = 0; m < hidden.size(); ++m) {
    if (hidden[m].modality != schema_.name(m)) {
      fail(ErrorKind::Schema, "hidden sequence '" + hidden[m].modality + "' out of canonical order, expected '" +
                                  schema_.name(m) + "'");
    }
    states.push_back(hidden[m].states);
  }
  auto stack = apply_stack(states, mra_, head_, config_);
  return {stack.prediction.output, stack.prediction.pooled, std::move(stack.attention)};
}

nlohmann::ordered_json Model::to_checkpoint() const {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& p : params_) {
    params[p.name] = {{"shape", p.tensor.shape()}, {"values", p.tensor.values()}};
  }
  return {{"version", 1},
          {"config", config_.to_json()},
          {"schema", schema_.to_json()},
          {"vocab", vocab_.tokens()},
          {"params", params}};
}

Model Model::from_checkpoint(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) fail(ErrorKind::Config, "unsupported checkpoint version");
    auto config = ModelConfig::from_json(doc.at("config"));
    auto schema = data::ModalitySchema::from_json(doc.at("schema"));
    auto vocab = data::Vocabulary::from_tokens(doc.at("vocab").get<std::vector<std::string>>());
    Model model(config, std::move(schema), std::move(vocab), 0);
    const auto& stored = doc.at("params");
    for (auto& p : model.params_) {
      if (!stored.contains(p.name)) fail(ErrorKind::Config, "checkpoint lacks parameter '" + p.name + "'");
      const auto shape = stored.at(p.name).at("shape").get<ad::Shape>();
      if (shape != p.tensor.shape()) {
        fail(ErrorKind::Dimension, "parameter '" + p.name + "' stored as " + ad::shape_string(shape) +
                                       " but the config implies " + ad::shape_string(p.tensor.shape()));
      }
      const auto values = stored.at(p.name).at("values").get<std::vector<double>>();
      if (values.size() != p.tensor.size()) fail(ErrorKind::Dimension, "parameter '" + p.name + "' value count");
      std::copy(values.begin(), values.end(), p.tensor.mutable_values().begin());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed checkpoint: ") + e.what());
  }
}

void Model::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write checkpoint " + path);
  out << to_checkpoint().dump() << '\n';
}

Model Model::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return from_checkpoint(doc);
}

}  // namespace seqset::mra
