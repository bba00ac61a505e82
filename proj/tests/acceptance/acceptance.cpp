// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 when any
// criterion fails. Tolerances are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "harness/commands.hpp"
#include "harness/run_config.hpp"
#include "harness/synth.hpp"
#include "mra/model.hpp"
#include "oracles/oracles.hpp"
#include "tensor/ops.hpp"
#include "training/loss.hpp"
#include "training/metrics.hpp"
#include "training/optimizer.hpp"
#include "training/trainer.hpp"
#include "unit/helpers.hpp"

using namespace seqset;
namespace fs = std::filesystem;

namespace {

constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 30.0;
constexpr std::size_t kNormSamples = 1000;
constexpr double kNormTol = 1e-9;
constexpr std::size_t kPermSamples = 200;
constexpr double kClosedTol = 1e-12;
constexpr std::size_t kOracleInstances = 300;
constexpr double kOracleTol = 1e-9;
constexpr double kScheduleTol = 1e-12;
constexpr double kSynthAccuracy = 0.95;
constexpr double kSynthSeconds = 60.0;
constexpr double kErasedKeyMax = 0.6;
constexpr double kNoiseDeltaMax = 0.05;
constexpr std::size_t kAblateEpochs = 10;
constexpr double kAdamTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> vals(const ad::Tensor& t) { return {t.values().begin(), t.values().end()}; }

void enliven(mra::Model& model, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : model.parameters()) {
    for (auto& v : p.tensor.mutable_values()) v = rng.uniform(-1, 1);
  }
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / "seqset_acceptance";
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

// The planted benchmark at its default size, written once and shared.
harness::RunConfig benchmark(const Workspace& ws) {
  static bool written = false;
  if (!written) {
    harness::SynthSpec spec;  // M = 3, |V| = 200, 2000/500/500, seed 42
    harness::write_synth(harness::generate_synth(spec), ws.file("synth"));
    written = true;
  }
  auto c = harness::RunConfig::load(ws.file("synth/config.json"));
  c.threads = 1;
  return c;
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_case;
  std::size_t runs = 0;
  for (auto task : {data::Task::Binary, data::Task::Multilabel, data::Task::Regression}) {
    for (auto sim : {mra::Similarity::Additive, mra::Similarity::ScaledDot}) {
      for (bool residual : {true, false}) {
        harness::GradcheckOptions o;
        o.d = 8;
        o.modalities = 3;
        o.max_len = 5;
        o.task = task;
        o.similarity = sim;
        o.use_residual = residual;
        const auto r = harness::cmd_gradcheck(o);
        ++runs;
        for (const auto& [name, err] : r.groups) {
          if (err > worst) {
            worst = err;
            worst_case = std::string(data::to_string(task)) + "/" + mra::to_string(sim) + "/" +
                         (residual ? "res" : "nores") + "/" + name;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst < kGradTol && secs < kGradSeconds;
  o.detail = std::to_string(runs) + " configs, max rel err " + fmt("%.3g", worst) + " (" + worst_case + ") < " +
             fmt("%.0e", kGradTol) + ", " + fmt("%.2f", secs) + " s < " + fmt("%.0f", kGradSeconds) + " s";
  return o;
}

Outcome normalization() {
  const auto schema = testing::schema_of(4, 6);
  Rng rng(101);
  std::size_t checked = 0, bad = 0;
  double worst = 0.0;
  for (auto sim : {mra::Similarity::Additive, mra::Similarity::ScaledDot}) {
    for (bool residual : {true, false}) {
      auto cfg = testing::config_for(schema, 8, 8);
      cfg.similarity = sim;
      cfg.use_residual = residual;
      mra::Model model(cfg, schema, testing::vocab_of(30), 17);
      enliven(model, 18);
      for (std::size_t i = 0; i < kNormSamples; ++i) {
        const auto s = testing::random_sample(schema, 30, rng, 0.35);
        const auto rec = model.forward(s).attention;
        double inter = 0.0;
        for (std::size_t m = 0; m < schema.size(); ++m) {
          if (rec.empty[m]) {
            if (rec.inter[m] != 0.0 || !rec.intra[m].empty()) ++bad;
          } else {
            const double e = std::abs(std::accumulate(rec.intra[m].begin(), rec.intra[m].end(), 0.0) - 1.0);
            worst = std::max(worst, e);
            if (e > kNormTol) ++bad;
          }
          inter += rec.inter[m];
        }
        const double e = std::abs(inter - 1.0);
        worst = std::max(worst, e);
        if (e > kNormTol) ++bad;
        ++checked;
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " samples, max |sum-1| " + fmt("%.2e", worst) + " <= " +
                        fmt("%.0e", kNormTol) + ", " + std::to_string(bad) + " violations"};
}

Outcome order_invariance() {
  const auto schema = testing::schema_of(4, 6, data::Task::Multilabel, 3);
  Rng rng(202);
  std::size_t mismatches = 0;
  for (auto sim : {mra::Similarity::Additive, mra::Similarity::ScaledDot}) {
    auto cfg = testing::config_for(schema, 8, 8);
    cfg.similarity = sim;
    mra::Model model(cfg, schema, testing::vocab_of(25), 5);
    enliven(model, 6);
    for (std::size_t i = 0; i < kPermSamples / 2; ++i) {
      const auto s = testing::random_sample(schema, 25, rng, 0.25);
      auto p = s;
      rng.shuffle(std::span(p.sequences));
      const auto a = model.forward(s), b = model.forward(p);
      if (vals(a.prediction) != vals(b.prediction) || vals(a.pooled) != vals(b.pooled)) ++mismatches;
    }
  }
  return {mismatches == 0,
          std::to_string(kPermSamples) + " permuted samples, " + std::to_string(mismatches) + " not bit-identical"};
}

Outcome closed_forms() {
  double worst = 0.0;
  bool weights_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto schema = testing::schema_of(1, 4);
    mra::Model model(testing::config_for(schema, 8, 8), schema, testing::vocab_of(6), seed);
    if (seed % 2 == 0) enliven(model, seed + 100);
    data::SequenceSet s;
    s.sequences = {{"m0", {"w" + std::to_string(seed % 6)}}};
    const auto h = model.encode(s)[0].states;
    const auto r = model.forward(s);
    for (std::size_t c = 0; c < 8; ++c) worst = std::max(worst, std::abs(r.pooled.at(c) - 4.0 * h.at(0, c)));
    weights_ok = weights_ok && r.attention.inter == std::vector<double>{1.0} &&
                 r.attention.intra[0] == std::vector<double>{1.0};

    // M = 1 with several tokens still gives an inter weight of exactly 1.
    data::SequenceSet many;
    many.sequences = {{"m0", {"w1", "w2", "w3"}}};
    weights_ok = weights_ok && model.forward(many).attention.inter == std::vector<double>{1.0};
  }
  return {worst <= kClosedTol && weights_ok, "max |h - 4x| " + fmt("%.2e", worst) + " <= " +
                                                 fmt("%.0e", kClosedTol) +
                                                 (weights_ok ? ", unit weights exact" : ", unit weights WRONG")};
}

Outcome loss_metric_oracles() {
  Rng rng(303);
  double loss_err = 0.0;
  std::size_t exact_misses = 0;
  for (std::size_t trial = 0; trial < kOracleInstances; ++trial) {
    const std::size_t n = 1 + rng.below(20), k = 1 + rng.below(5);
    std::vector<double> z(n * k), y(n * k);
    for (auto& x : z) x = rng.uniform(-6, 6);
    for (auto& x : y) x = rng.bernoulli(0.5) ? 1.0 : 0.0;
    // Guarantee support for class weights.
    for (std::size_t c = 0; c < k; ++c) y[(trial % n) * k + c] = 1.0;
    const auto w = train::class_weights(y, k);
    const auto wo = oracle::class_weights(y, n, k);
    for (std::size_t c = 0; c < k; ++c) loss_err = std::max(loss_err, std::abs(w[c] - wo[c]));
    const auto logits = ad::Tensor::from_values({n, k}, z);
    for (bool literal : {true, false}) {
      const double got = train::wsce_loss(logits, y, w, literal ? train::WsceMode::Literal : train::WsceMode::FullBce)
                             .item();
      loss_err = std::max(loss_err, std::abs(got - oracle::wsce(z, y, wo, n, k, literal)));
    }
    std::vector<double> yr(n), yh(n);
    for (auto& x : yr) x = rng.uniform(-3, 3);
    for (auto& x : yh) x = rng.uniform(-3, 3);
    loss_err = std::max(loss_err,
                        std::abs(train::rmse_loss(ad::Tensor::from_values({n}, yh), yr).item() - oracle::rmse(yr, yh)));

    std::vector<int> ti(n * k), pi(n * k);
    for (auto& x : ti) x = rng.bernoulli(0.4) ? 1 : 0;
    for (auto& x : pi) x = rng.bernoulli(0.4) ? 1 : 0;
    const std::vector<double> td(ti.begin(), ti.end()), pd(pi.begin(), pi.end());
    if (train::f1_micro(td, pd, k) != oracle::f1_micro(ti, pi)) ++exact_misses;
    if (train::f1_macro(td, pd, k) != oracle::f1_macro(ti, pi, n, k)) ++exact_misses;
    if (train::f1_samples(td, pd, k) != oracle::f1_samples(ti, pi, n, k)) ++exact_misses;
    if (train::accuracy(td, pd) != oracle::accuracy(ti, pi)) ++exact_misses;
    std::vector<double> scores(n);
    for (auto& x : scores) x = static_cast<double>(rng.below(5)) / 4.0;
    const auto col = oracle::column(ti, n, k, 0);
    const auto auc = train::roc_auc(scores, std::vector<double>(col.begin(), col.end()));
    const double want = oracle::auc_pairwise(scores, col);
    if (std::isnan(want) ? auc.has_value() : (!auc || *auc != want)) ++exact_misses;
  }
  return {loss_err <= kOracleTol && exact_misses == 0,
          std::to_string(kOracleInstances) + " instances, loss/weight max err " + fmt("%.2e", loss_err) + " <= " +
              fmt("%.0e", kOracleTol) + ", " + std::to_string(exact_misses) + " inexact F1/acc/AUC"};
}

Outcome schedule() {
  train::Schedule s;  // peak 0.001, warmup 5, total 25
  double err = 0.0;
  err = std::max(err, std::abs(train::lr_at(0, s) - 0.0));
  err = std::max(err, std::abs(train::lr_at(5, s) - 0.001));
  err = std::max(err, std::abs(train::lr_at(15, s) - 0.0005));
  err = std::max(err, std::abs(train::lr_at(25, s) - 0.0));
  s.steps_per_epoch = 2;
  err = std::max(err, std::abs(train::lr_at(5, s) - 0.0005));  // e = 2.5
  s.steps_per_epoch = 100000;
  const double left = train::lr_at(499999, s), right = train::lr_at(500001, s);
  const double jump = std::max(std::abs(left - 0.001), std::abs(right - 0.001));
  const bool continuous = jump <= 1e-7;
  return {err <= kScheduleTol && continuous, "max err " + fmt("%.2e", err) + " <= " + fmt("%.0e", kScheduleTol) +
                                                 ", boundary step " + fmt("%.2e", jump)};
}

Outcome synthetic_benchmark(const Workspace& ws) {
  auto c = benchmark(ws);
  c.out_dir = ws.file("bench");
  const auto t0 = Clock::now();
  const auto out = harness::cmd_train(c);
  const double secs = seconds_since(t0);
  const double acc = out.test ? out.test->accuracy.value_or(0.0) : 0.0;

  const auto model = mra::Model::load(ws.file("bench/checkpoint.json"));
  const auto test = harness::load_dataset(c.test_path, "", model.schema(), model.config());
  const auto rows = harness::cmd_erase_eval(model, test, c.threshold, 1);
  const double base = *rows[0].metrics.accuracy;
  double key = 1.0, noise = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = *rows[i].metrics.accuracy;
    if (rows[i].modality == "m0") {
      key = a;
    } else {
      noise = std::max(noise, std::abs(a - base));
    }
  }
  Outcome o;
  o.pass = acc >= kSynthAccuracy && secs <= kSynthSeconds && key <= kErasedKeyMax && noise <= kNoiseDeltaMax;
  o.detail = "test acc " + fmt("%.4f", acc) + " >= " + fmt("%.2f", kSynthAccuracy) + " in " + fmt("%.1f", secs) +
             " s <= " + fmt("%.0f", kSynthSeconds) + " s; erase key acc " + fmt("%.4f", key) + " <= " +
             fmt("%.1f", kErasedKeyMax) + "; max noise delta " + fmt("%.4f", noise) + " <= " +
             fmt("%.2f", kNoiseDeltaMax);
  return o;
}

Outcome ablation(const Workspace& ws) {
  auto c = benchmark(ws);
  c.out_dir = ws.file("ablate");
  c.train.epochs = kAblateEpochs;
  c.train.warmup_epochs = 2;
  c.threads = std::max(1u, std::thread::hardware_concurrency());
  harness::AblationSelection all;
  const auto rows = harness::cmd_ablate(c, all);

  std::size_t encoder_only = 0;
  std::vector<std::string> variants;
  double enc_acc = -1.0, full_acc = -1.0;
  for (const auto& r : rows) {
    if (std::find(variants.begin(), variants.end(), r.cell.variant) == variants.end()) variants.push_back(r.cell.variant);
    if (r.cell.variant == "encoder_only") {
      ++encoder_only;
      enc_acc = *r.metrics.accuracy;
    }
    if (r.cell.variant == "both" && r.cell.similarity == mra::Similarity::Additive && r.cell.residual == true) {
      full_acc = *r.metrics.accuracy;
    }
  }

  // Shared seed: every cell starts from the same encoder tables.
  const auto schema = data::ModalitySchema::load(c.schema_path);
  const auto train_set = harness::load_dataset(c.train_path, "", schema, c.model);
  bool shared = true;
  std::vector<double> emb;
  for (const auto& cell : harness::ablation_grid(all)) {
    auto cc = c;
    cc.model.use_intra = cell.use_intra;
    cc.model.use_inter = cell.use_inter;
    if (cell.similarity) cc.model.similarity = *cell.similarity;
    if (cell.residual) cc.model.use_residual = *cell.residual;
    const auto m = harness::build_model(cc, schema, train_set);
    const auto e = vals(m.parameter("embedding"));
    if (emb.empty()) emb = e;
    shared = shared && e == emb;
  }

  Outcome o;
  o.pass = rows.size() == 13 && harness::full_grid_size(all) == 16 && encoder_only == 1 && variants.size() == 4 &&
           shared && full_acc >= enc_acc && full_acc >= 0.0;
  o.detail = std::to_string(rows.size()) + " cells of " + std::to_string(harness::full_grid_size(all)) + ", " +
             std::to_string(variants.size()) + " variants, encoder_only x" + std::to_string(encoder_only) +
             (shared ? ", shared init" : ", init DIFFERS") + "; full acc " + fmt("%.4f", full_acc) +
             " >= encoder-only " + fmt("%.4f", enc_acc) + " (" + std::to_string(kAblateEpochs) + " epochs)";
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const Workspace& ws) {
  auto c = benchmark(ws);
  c.train.epochs = 6;
  c.train.warmup_epochs = 2;
  c.out_dir = ws.file("det_a");
  harness::cmd_train(c);
  c.out_dir = ws.file("det_b");
  harness::cmd_train(c);
  const bool ck = slurp(ws.file("det_a/checkpoint.json")) == slurp(ws.file("det_b/checkpoint.json"));
  const bool lc = slurp(ws.file("det_a/loss_curve.csv")) == slurp(ws.file("det_b/loss_curve.csv"));
  return {ck && lc && !slurp(ws.file("det_a/checkpoint.json")).empty(),
          std::string("checkpoint ") + (ck ? "identical" : "DIFFERS") + ", loss curve " + (lc ? "identical" : "DIFFERS")};
}

void set_grad(const ad::Tensor& theta, const std::vector<double>& g) {
  theta.impl()->grad.clear();
  ad::sum(ad::mul(theta, ad::Tensor::from_values(theta.shape(), g))).backward();
}

Outcome adamw() {
  Rng rng(404);
  const std::size_t n = 9;
  std::vector<double> init(n);
  for (auto& x : init) x = rng.uniform(-1, 1);
  auto theta = ad::Tensor::from_values({n}, init, true);
  train::AdamW opt({{"p", theta, true}}, {0.9, 0.999, 1e-8, 0.0}, {train::ScheduleKind::Constant, 0.002});
  oracle::Adam ref(n, 0.002, 0.9, 0.999, 1e-8);
  auto mirror = init;
  double err = 0.0;
  for (int step = 0; step < 100; ++step) {
    std::vector<double> g(n);
    for (auto& x : g) x = rng.uniform(-3, 3);
    set_grad(theta, g);
    opt.step();
    ref.step(mirror, g);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(theta.at(i) - mirror[i]));
  }

  auto shrink = ad::Tensor::from_values({n}, init, true);
  const double lr = 0.01, lambda = 0.05;
  train::AdamW decay({{"s", shrink, true}}, {0.9, 0.999, 1e-8, lambda}, {train::ScheduleKind::Constant, lr});
  auto expect = init;
  bool exact = true;
  for (int step = 0; step < 20; ++step) {
    set_grad(shrink, std::vector<double>(n, 0.0));
    decay.step();
    for (std::size_t i = 0; i < n; ++i) {
      expect[i] *= 1.0 - lr * lambda;
      exact = exact && shrink.at(i) == expect[i];
    }
  }
  return {err <= kAdamTol && exact, "100 steps max |dAdam| " + fmt("%.2e", err) + " <= " + fmt("%.0e", kAdamTol) +
                                        (exact ? ", decay shrink exact" : ", decay shrink INEXACT")};
}

}  // namespace

int main() {
  Workspace ws;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", gradient_correctness},
      {2, "normalization invariants", normalization},
      {3, "modality-order invariance", order_invariance},
      {4, "closed-form cases", closed_forms},
      {5, "loss and metric oracles", loss_metric_oracles},
      {6, "learning-rate schedule", schedule},
      {7, "synthetic benchmark", [&] { return synthetic_benchmark(ws); }},
      {8, "ablation structure", [&] { return ablation(ws); }},
      {9, "determinism", [&] { return determinism(ws); }},
      {10, "adamw contract", adamw},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
