// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"
#include "tensor/ops.hpp"
#include "training/loss.hpp"
#include "training/metrics.hpp"
#include "training/optimizer.hpp"
#include "training/trainer.hpp"

using namespace seqset;
using namespace seqset::train;
using seqset::ad::Tensor;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Sets the gradient of `theta` to g through a linear loss.
void set_grad(const Tensor& theta, const std::vector<double>& g) {
  theta.impl()->grad.clear();
  ad::sum(ad::mul(theta, Tensor::from_values(theta.shape(), g))).backward();
}

// Binary task where the first token of m0 decides the label.
Dataset separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.bernoulli(0.5);
    data::SequenceSet s;
    s.id = "s" + std::to_string(i);
    s.sequences = {{"m0", {pos ? "w1" : "w2", "w" + std::to_string(3 + rng.below(4))}},
                   {"m1", {"w" + std::to_string(3 + rng.below(4))}}};
    s.label = {data::Task::Binary, {pos ? 1.0 : 0.0}};
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace

TEST_CASE("class weights") {
  const std::vector<double> y{1, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0};
  CHECK(class_weights(y, 3) == std::vector<double>{0.5, 1.0, 1.0});
  CHECK(class_weights(y, 3) == oracle::class_weights(y, 4, 3));
  CHECK(class_weights(std::vector<double>{1, 1, 1, 1}, 1) == std::vector<double>{0.25});
  const auto eq = class_weights(std::vector<double>{1, 0, 0, 1}, 2);
  CHECK(eq[0] == eq[1]);
  try {
    class_weights(std::vector<double>{1, 0, 1, 0}, 2);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedClass);
    CHECK(std::string(e.what()).find("class 1") != std::string::npos);
  }
}

TEST_CASE("wsce hand cases") {
  const auto half = Tensor::from_values({1, 1}, {0.0});
  CHECK(wsce_loss(half, std::vector<double>{1}, std::vector<double>{1}, WsceMode::Literal).item() ==
        doctest::Approx(0.693147).epsilon(1e-6));
  const auto big = Tensor::from_values({2, 2}, {800, 800, 800, 800});
  for (auto mode : {WsceMode::Literal, WsceMode::FullBce}) {
    CHECK(wsce_loss(big, std::vector<double>{1, 1, 1, 1}, {}, mode).item() == 0.0);
  }
  Rng rng(3);
  std::vector<double> z(6);
  for (auto& x : z) x = rng.uniform(-50, 50);
  CHECK(wsce_loss(Tensor::from_values({3, 2}, z), std::vector<double>(6, 0.0), {}, WsceMode::Literal).item() == 0.0);
  CHECK(kind_of([] {
          wsce_loss(Tensor::from_values({1, 2}, {0, 0}), std::vector<double>{1}, {}, WsceMode::FullBce);
        }) == ErrorKind::Dimension);
}

TEST_CASE("wsce matches the oracle and stays non-negative") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(6), k = 1 + rng.below(4);
    std::vector<double> z(n * k), y(n * k), w(k);
    for (auto& x : z) x = rng.uniform(-8, 8);
    for (auto& x : y) x = rng.bernoulli(0.4) ? 1.0 : 0.0;
    for (auto& x : w) x = rng.uniform(0.1, 2.0);
    const auto logits = Tensor::from_values({n, k}, z);
    for (bool literal : {true, false}) {
      const double got = wsce_loss(logits, y, w, literal ? WsceMode::Literal : WsceMode::FullBce).item();
      const double want = oracle::wsce(z, y, w, n, k, literal);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      CHECK(got >= 0.0);
    }
  }
}

TEST_CASE("rmse loss") {
  CHECK(rmse_loss(Tensor::from_values({2}, {0, 2}), std::vector<double>{0, 0}).item() ==
        doctest::Approx(1.414214).epsilon(1e-6));
  CHECK(rmse_loss(Tensor::from_values({3}, {1, 2, 3}), std::vector<double>{1, 2, 3}).item() == 0.0);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<double> y(n), yh(n);
    for (auto& x : y) x = rng.uniform(-5, 5);
    for (auto& x : yh) x = rng.uniform(-5, 5);
    const double got = rmse_loss(Tensor::from_values({n}, yh), y).item();
    const double want = oracle::rmse(y, yh);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, want));
    const double c = rng.uniform(-3, 3);
    auto ys = y, yhs = yh;
    for (auto& x : ys) x += c;
    for (auto& x : yhs) x += c;
    CHECK(std::abs(rmse_loss(Tensor::from_values({n}, yhs), ys).item() - got) <= 1e-9);
  }
}

TEST_CASE("learning rate schedule") {
  Schedule s;  // peak 0.001, warmup 5, total 25
  CHECK(lr_at(0, s) == 0.0);
  CHECK(lr_at(5, s) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(lr_at(15, s) == doctest::Approx(0.0005).epsilon(1e-12));
  CHECK(std::abs(lr_at(25, s)) <= 1e-12);
  s.steps_per_epoch = 2;
  CHECK(lr_at(5, s) == doctest::Approx(0.0005).epsilon(1e-12));
  s.steps_per_epoch = 1000;
  const double left = lr_at(4999, s), right = lr_at(5001, s);
  CHECK(std::abs(left - 0.001) <= 1e-6);
  CHECK(std::abs(right - 0.001) <= 1e-6);
  for (std::size_t step = 0; step <= 25000; step += 37) {
    const double e = static_cast<double>(step) / 1000.0;
    CHECK(std::abs(lr_at(step, s) - oracle::lr(e, 0.001, 5, 25)) <= 1e-15);
  }
  s.total_epochs = 5;
  CHECK(kind_of([&] { lr_at(0, s); }) == ErrorKind::Config);
}

TEST_CASE("adamw hand cases") {
  auto theta = Tensor::from_values({1}, {1.0}, true);
  AdamW opt({{"t", theta, true}}, {0.9, 0.999, 1e-8, 0.0}, {ScheduleKind::Constant, 0.001});
  set_grad(theta, {1.0});
  opt.step();
  CHECK(std::abs(theta.at(0) - (1.0 - 0.001)) <= 1e-10);
  CHECK(opt.step_count() == 1);

  auto zero = Tensor::from_values({3}, {1.0, -2.0, 0.5}, true);
  AdamW still({{"z", zero, true}}, {0.9, 0.999, 1e-8, 0.0}, {ScheduleKind::Constant, 0.01});
  set_grad(zero, {0, 0, 0});
  still.step();
  CHECK(vals(zero) == std::vector<double>{1.0, -2.0, 0.5});

  auto shrink = Tensor::from_values({2}, {1.0, -4.0}, true);
  AdamW decay({{"s", shrink, true}}, {0.9, 0.999, 1e-8, 0.1}, {ScheduleKind::Constant, 0.01});
  set_grad(shrink, {0, 0});
  decay.step();
  CHECK(shrink.at(0) == 1.0 * (1 - 0.01 * 0.1));
  CHECK(shrink.at(1) == -4.0 * (1 - 0.01 * 0.1));

  auto bad = Tensor::from_values({2}, {1.0, 1.0}, true);
  AdamW div({{"head.b2", bad, false}}, {}, {ScheduleKind::Constant, 0.01});
  set_grad(bad, {0.0, std::nan("")});
  try {
    div.step();
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(std::string(e.what()).find("head.b2") != std::string::npos);
  }
}

TEST_CASE("adamw without decay equals plain adam") {
  Rng rng(6);
  std::vector<double> init(7);
  for (auto& x : init) x = rng.uniform(-1, 1);
  auto theta = Tensor::from_values({7}, init, true);
  AdamW opt({{"t", theta, true}}, {0.9, 0.999, 1e-8, 0.0}, {ScheduleKind::Constant, 0.003});
  oracle::Adam ref(7, 0.003, 0.9, 0.999, 1e-8);
  auto mirror = init;
  for (int step = 0; step < 100; ++step) {
    std::vector<double> g(7);
    for (auto& x : g) x = rng.uniform(-2, 2);
    set_grad(theta, g);
    opt.step();
    ref.step(mirror, g);
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(theta.at(i) - mirror[i]) <= 1e-12);
  }
}

TEST_CASE("metrics hand cases") {
  const std::vector<double> truth{1, 0, 1, 1}, pred{1, 1, 1, 0};
  CHECK(f1_micro(truth, pred, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f1_micro(truth, truth, 2) == 1.0);
  CHECK(f1_macro(truth, truth, 2) == 1.0);
  CHECK(f1_samples(truth, truth, 2) == 1.0);
  CHECK(accuracy(truth, truth) == 1.0);
  // Nothing true, nothing predicted.
  const std::vector<double> none{0, 0, 0, 0};
  CHECK(f1_micro(none, none, 2) == 1.0);
  CHECK(f1_samples(none, none, 2) == 1.0);
  CHECK(f1_macro(none, none, 2) == 0.0);

  CHECK(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<double>{0, 0, 1, 1}) ==
        doctest::Approx(0.75));
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.9}, std::vector<double>{0, 0, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.5, 0.5}, std::vector<double>{0, 1}) == 0.5);
  CHECK_FALSE(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<double>{1, 1}).has_value());

  CHECK(rmse(std::vector<double>{0, 2}, std::vector<double>{0, 0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(mape(std::vector<double>{2, 4}, std::vector<double>{1, 5}) == doctest::Approx(0.375));
  CHECK(mape(std::vector<double>{0}, std::vector<double>{1e-8}) == doctest::Approx(1.0));
}

TEST_CASE("metrics match brute force on random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(20), k = 1 + rng.below(5);
    std::vector<int> t(n * k), p(n * k);
    for (auto& x : t) x = rng.bernoulli(0.4) ? 1 : 0;
    for (auto& x : p) x = rng.bernoulli(0.4) ? 1 : 0;
    const auto td = as_double(t), pd = as_double(p);
    CHECK(f1_micro(td, pd, k) == oracle::f1_micro(t, p));
    CHECK(std::abs(f1_macro(td, pd, k) - oracle::f1_macro(t, p, n, k)) <= 1e-12);
    CHECK(std::abs(f1_samples(td, pd, k) - oracle::f1_samples(t, p, n, k)) <= 1e-12);
    CHECK(accuracy(td, pd) == oracle::accuracy(t, p));

    std::vector<double> scores(n);
    // Coarse scores force ties.
    for (auto& x : scores) x = static_cast<double>(rng.below(4));
    const auto col = oracle::column(t, n, k, 0);
    const auto auc = roc_auc(scores, as_double(col));
    const double want = oracle::auc_pairwise(scores, col);
    if (std::isnan(want)) {
      CHECK_FALSE(auc.has_value());
    } else {
      REQUIRE(auc.has_value());
      CHECK(std::abs(*auc - want) <= 1e-12);
    }
  }
}

TEST_CASE("metrics from outputs handle the task variants") {
  std::vector<data::SequenceSet> samples(3);
  samples[0].label = {data::Task::Binary, {1}};
  samples[1].label = {data::Task::Binary, {0}};
  samples[2].label = {data::Task::Binary, {1}};
  const auto r = metrics_from_outputs({{2.0}, {-1.0}, {0.5}}, samples, data::Task::Binary, 0.5);
  CHECK(*r.accuracy == 1.0);
  CHECK(*r.roc_auc == 1.0);
  CHECK(r.samples == 3);
  const auto strict = metrics_from_outputs({{2.0}, {-1.0}, {0.5}}, samples, data::Task::Binary, 0.7);
  CHECK(*strict.accuracy == doctest::Approx(2.0 / 3.0));

  for (auto& s : samples) s.label = {data::Task::Regression, {2.0}};
  const auto reg = metrics_from_outputs({{2.0}, {1.0}, {3.0}}, samples, data::Task::Regression, 0.5);
  CHECK(*reg.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(*reg.mape == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(reg.accuracy.has_value());
}

TEST_CASE("zero learning rate leaves parameters bit-identical") {
  const auto schema = testing::schema_of(2, 4);
  auto data = separable(20, 1);
  mra::Model model(testing::config_for(schema), schema, testing::vocab_of(8), 3);
  std::vector<std::vector<double>> before;
  for (const auto& p : model.parameters()) before.push_back(vals(p.tensor));
  TrainConfig tc;
  tc.epochs = 3;
  tc.peak_lr = 0.0;
  tc.warmup_epochs = 1;
  tc.adam.weight_decay = 0.5;
  train_epochs(model, data, tc);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(vals(model.parameters()[i].tensor) == before[i]);
}

TEST_CASE("training is deterministic and lowers the loss on a separable task") {
  const auto schema = testing::schema_of(2, 4);
  const auto data = separable(64, 2);
  TrainConfig tc;
  tc.epochs = 30;
  tc.peak_lr = 0.01;
  tc.warmup_epochs = 2;
  tc.seed = 9;
  mra::Model a(testing::config_for(schema), schema, testing::vocab_of(8), 4);
  mra::Model b(testing::config_for(schema), schema, testing::vocab_of(8), 4);
  std::size_t calls = 0;
  const auto ca = train_epochs(a, data, tc, [&](const EpochRecord&) { ++calls; });
  const auto cb = train_epochs(b, data, tc);
  REQUIRE(ca.size() == 31);
  CHECK(calls == 31);
  CHECK(ca.front().epoch == 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    CHECK(ca[i].mean_loss == cb[i].mean_loss);
    CHECK(ca[i].lr == cb[i].lr);
  }
  CHECK(ca.back().mean_loss < ca.front().mean_loss);
  CHECK(*evaluate(a, data).accuracy == 1.0);
}

TEST_CASE("stalled loss warns without aborting") {
  const auto schema = testing::schema_of(2, 4);
  auto data = separable(10, 3);
  mra::Model model(testing::config_for(schema), schema, testing::vocab_of(8), 5);
  TrainConfig tc;
  tc.epochs = 4;
  tc.peak_lr = 0.0;
  tc.warmup_epochs = 1;
  tc.patience = 2;
  std::ostringstream warn;
  CHECK(train_epochs(model, data, tc, {}, &warn).size() == 5);
  CHECK_FALSE(warn.str().empty());
}

TEST_CASE("training config errors") {
  const auto schema = testing::schema_of(2, 4);
  mra::Model model(testing::config_for(schema), schema, testing::vocab_of(8), 5);
  TrainConfig tc;
  CHECK(kind_of([&] { train_epochs(model, Dataset{}, tc); }) == ErrorKind::Config);
  tc.batch_size = 0;
  CHECK(kind_of([&] { train_epochs(model, separable(4, 1), tc); }) == ErrorKind::Config);
}

TEST_CASE("multithreaded prediction matches single-threaded") {
  const auto schema = testing::schema_of(3, 5, data::Task::Multilabel, 3);
  Rng rng(8);
  Dataset data;
  for (int i = 0; i < 40; ++i) data.samples.push_back(testing::random_sample(schema, 12, rng, 0.3));
  mra::Model model(testing::config_for(schema), schema, testing::vocab_of(12), 6);
  const auto one = predict_outputs(model, data, 1);
  CHECK(predict_outputs(model, data, 4) == one);
  CHECK(predict_outputs(model, data, 64) == one);
  const auto r1 = evaluate(model, data, 0.5, 1), r4 = evaluate(model, data, 0.5, 4);
  CHECK(*r1.f1_micro == *r4.f1_micro);
  CHECK(*r1.f1_samples == *r4.f1_samples);
}

TEST_CASE("evaluation rejects a model of another task") {
  const auto schema = testing::schema_of(2, 4);
  const auto reg = testing::schema_of(2, 4, data::Task::Regression);
  mra::Model model(testing::config_for(reg), reg, testing::vocab_of(8), 5);
  CHECK(kind_of([&] { evaluate(model, separable(4, 1)); }) == ErrorKind::TaskMismatch);
}
