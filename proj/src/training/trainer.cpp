// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include "error.hpp"
#include "rng.hpp"

namespace seqset::train {

namespace {
double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

void check_task(const mra::Model& model, const Dataset& dataset) {
  for (const auto& s : dataset.samples) {
    if (s.label.task != model.config().task) {
      fail(ErrorKind::TaskMismatch, std::string("model is ") + data::to_string(model.config().task) +
                                        " but sample '" + s.id + "' carries a " + data::to_string(s.label.task) +
                                        " label");
    }
  }
}

LossConfig loss_config_for(const mra::Model& model, const Dataset& dataset, const TrainConfig& config) {
  LossConfig loss;
  loss.task = model.config().task;
  loss.wsce_mode = config.wsce_mode;
  if (config.class_weighting && loss.task != data::Task::Regression) {
    std::vector<double> labels;
    for (const auto& s : dataset.samples) labels.insert(labels.end(), s.label.values.begin(), s.label.values.end());
    loss.class_weights = class_weights(labels, model.config().output_dim);
  }
  return loss;
}
}  // namespace

void check_hidden_alignment(const Dataset& dataset, const data::ModalitySchema& schema) {
  if (!dataset.hidden) return;
  for (const auto& s : dataset.samples) {
    const auto tokens = data::canonical_tokens(s, schema);
    const auto hidden = dataset.hidden->get(s.id);
    for (std::size_t m = 0; m < schema.size(); ++m) {
      if (hidden[m].states.rows() != tokens[m].size()) {
        fail(ErrorKind::Dimension, "sample '" + s.id + "' modality '" + schema.name(m) + "' has " +
                                       std::to_string(tokens[m].size()) + " tokens but " +
                                       std::to_string(hidden[m].states.rows()) + " precomputed rows");
      }
    }
  }
}

mra::ForwardResult forward_sample(const mra::Model& model, const Dataset& dataset, std::size_t index) {
  const auto& sample = dataset.samples.at(index);
  if (model.config().encoder == mra::EncoderKind::Precomputed) {
    if (!dataset.hidden) fail(ErrorKind::Config, "model expects precomputed hidden states but none were supplied");
    auto hidden = dataset.hidden->get(sample.id);
    // An erased modality keeps its stored states; the sample's tokens decide.
    for (auto& h : hidden) {
      const auto* tokens = sample.find(h.modality);
      if (!tokens || tokens->empty()) h.states = ad::Tensor::zeros({0, model.config().d});
    }
    return model.forward_hidden(hidden);
  }
  return model.forward(sample);
}

double mean_loss(const mra::Model& model, const Dataset& dataset, const LossConfig& loss, std::size_t batch_size) {
  ad::NoGradGuard guard;
  const std::size_t n = dataset.samples.size();
  double total = 0.0;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    std::vector<ad::Tensor> preds;
    std::vector<const data::Label*> labels;
    for (std::size_t i = begin; i < end; ++i) {
      preds.push_back(forward_sample(model, dataset, i).prediction);
      labels.push_back(&dataset.samples[i].label);
    }
    total += batch_loss(preds, labels, loss).item() * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(n);
}

std::vector<EpochRecord> train_epochs(mra::Model& model, const Dataset& dataset, const TrainConfig& config,
                                      const EpochCallback& on_epoch, std::ostream* warnings) {
  const std::size_t n = dataset.samples.size();
  if (n == 0) fail(ErrorKind::Config, "training set is empty");
  if (config.batch_size == 0) fail(ErrorKind::Config, "batch_size must be positive");
  if (config.epochs == 0) fail(ErrorKind::Config, "epochs must be positive");
  check_task(model, dataset);

  Schedule schedule;
  schedule.kind = config.schedule;
  schedule.peak_lr = config.peak_lr;
  schedule.warmup_epochs = config.warmup_epochs;
  schedule.total_epochs = static_cast<double>(config.epochs);
  schedule.steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  lr_at(0, schedule);  // validates the schedule before any work

  std::vector<OptimizedParam> params;
  for (const auto& p : model.parameters()) params.push_back({p.name, p.tensor, p.decay});
  AdamW optimizer(params, config.adam, schedule);
  auto tensors = model.parameter_tensors();
  const auto loss_cfg = loss_config_for(model, dataset, config);

  std::vector<EpochRecord> curve;
  curve.push_back({0, mean_loss(model, dataset, loss_cfg, config.batch_size), lr_at(0, schedule)});
  if (on_epoch) on_epoch(curve.back());

  Rng rng(config.seed ^ 0x5eed5e75eed5e7ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = curve.back().mean_loss;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      std::vector<ad::Tensor> preds;
      std::vector<const data::Label*> labels;
      for (std::size_t i = begin; i < end; ++i) {
        preds.push_back(forward_sample(model, dataset, order[i]).prediction);
        labels.push_back(&dataset.samples[order[i]].label);
      }
      const auto loss = batch_loss(preds, labels, loss_cfg);
      if (!std::isfinite(loss.item())) fail(ErrorKind::Divergence, "loss became non-finite in epoch " + std::to_string(epoch));
      total += loss.item() * static_cast<double>(end - begin);
      loss.backward();
      optimizer.step();
      ad::zero_grads(tensors);
    }
    curve.push_back({epoch, total / static_cast<double>(n), optimizer.last_lr()});
    if (on_epoch) on_epoch(curve.back());

    if (curve.back().mean_loss < best) {
      best = curve.back().mean_loss;
      stale = 0;
    } else if (++stale >= config.patience && config.patience > 0) {
      if (warnings) *warnings << "warning: training loss has not improved for " << stale << " epochs (epoch " << epoch << ")\n";
      stale = 0;
    }
  }
  return curve;
}

std::vector<std::vector<double>> predict_outputs(const mra::Model& model, const Dataset& dataset,
                                                 std::size_t threads) {
  const std::size_t n = dataset.samples.size();
  std::vector<std::vector<double>> out(n);
  const auto run = [&](std::size_t begin, std::size_t end) {
    ad::NoGradGuard guard;
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = forward_sample(model, dataset, i).prediction;
      out[i].assign(p.values().begin(), p.values().end());
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    run(0, n);
    return out;
  }
  // Forwards are pure given parameters; each thread builds its own tapes.
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        run(std::min(n, t * chunk), std::min(n, (t + 1) * chunk));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

MetricsReport metrics_from_outputs(const std::vector<std::vector<double>>& outputs,
                                   const std::vector<data::SequenceSet>& samples, data::Task task, double threshold) {
  if (outputs.size() != samples.size() || samples.empty()) fail(ErrorKind::Dimension, "no samples to evaluate");
  MetricsReport r;
  r.task = task;
  r.samples = samples.size();
  std::vector<double> truth, scores, predicted;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& label = samples[i].label.values;
    if (label.size() != outputs[i].size()) fail(ErrorKind::TaskMismatch, "label width differs from model output");
    truth.insert(truth.end(), label.begin(), label.end());
    for (double z : outputs[i]) {
      if (task == data::Task::Regression) {
        predicted.push_back(z);
      } else {
        const double s = sigmoid(z);
        scores.push_back(s);
        predicted.push_back(s >= threshold ? 1.0 : 0.0);
      }
    }
  }
  const std::size_t k = outputs.front().size();
  switch (task) {
    case data::Task::Multilabel:
      r.f1_micro = f1_micro(truth, predicted, k);
      r.f1_macro = f1_macro(truth, predicted, k);
      r.f1_samples = f1_samples(truth, predicted, k);
      r.per_class = per_class_metrics(truth, predicted, k);
      break;
    case data::Task::Binary:
      r.accuracy = accuracy(truth, predicted);
      r.roc_auc = roc_auc(scores, truth);
      r.f1_micro = f1_micro(truth, predicted, 1);
      r.per_class = per_class_metrics(truth, predicted, 1);
      break;
    case data::Task::Regression:
      r.rmse = rmse(truth, predicted);
      r.mape = mape(truth, predicted);
      break;
  }
  return r;
}

MetricsReport evaluate(const mra::Model& model, const Dataset& dataset, double threshold, std::size_t threads) {
  check_task(model, dataset);
  return metrics_from_outputs(predict_outputs(model, dataset, threads), dataset.samples, model.config().task,
                              threshold);
}

}  // namespace seqset::train
