// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// seqset command-line front end. Everything goes through the C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqset/seqset.h"

namespace {

using json = nlohmann::json;

struct Options {
  std::string config;
  std::optional<long long> seed;
  std::string out;
  std::size_t threads = 0;
  std::string checkpoint, data, hidden;
  std::optional<double> threshold;
  std::string ids, html;
  std::string variants, similarities, residuals;
  std::string similarity, residual, task, fault;
};

// Owns a string returned by the library.
class Owned {
 public:
  Owned() = default;
  ~Owned() { seqset_string_free(p_); }
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  char** slot() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

 private:
  char* p_ = nullptr;
};

int report_failure(seqset_status status) {
  const int code = status == SEQSET_ERR_INPUT ? 2 : status == SEQSET_ERR_NUMERIC ? 3 : 1;
  json err = {{"error", {{"kind", seqset_last_error_kind()}, {"message", seqset_last_error()}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

int usage_error(const std::string& message) {
  json err = {{"error", {{"kind", "config"}, {"message", "config error: " + message}, {"exit_code", 2}}}};
  std::cerr << err.dump() << '\n';
  return 2;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

json overrides_of(const Options& o) {
  json j = json::object();
  if (o.seed) j["seed"] = *o.seed;
  if (!o.out.empty()) j["out"] = o.out;
  if (o.threads) j["threads"] = o.threads;
  return j;
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

std::optional<json> read_json_file(const std::string& path, int& code) {
  std::ifstream in(path);
  if (!in) {
    code = usage_error("config file not found: " + path);
    return std::nullopt;
  }
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    code = usage_error("config file " + path + " is not a JSON object");
    return std::nullopt;
  }
  return doc;
}

// Checkpoint, dataset and threshold for the model-consuming commands. Explicit
// flags win; otherwise the run config supplies the run directory and the test
// split (valid when no test split is configured).
struct ModelInputs {
  std::string checkpoint, data, hidden, out;
  double threshold = 0.5;
  std::size_t threads = 1;
};

std::optional<ModelInputs> model_inputs(const Options& o, int& code) {
  ModelInputs in;
  in.checkpoint = o.checkpoint;
  in.data = o.data;
  in.hidden = o.hidden;
  in.out = o.out;
  in.threads = o.threads ? o.threads : 1;
  if (!o.config.empty()) {
    Owned resolved;
    const auto st = seqset_resolve_config(o.config.c_str(), overrides_of(o).dump().c_str(), resolved.slot());
    if (st != SEQSET_OK) {
      code = report_failure(st);
      return std::nullopt;
    }
    const auto cfg = json::parse(resolved.str());
    const auto out_dir = cfg.at("out").get<std::string>();
    if (in.out.empty()) in.out = out_dir;
    if (in.checkpoint.empty()) in.checkpoint = (std::filesystem::path(out_dir) / "checkpoint.json").string();
    if (in.data.empty()) {
      const bool has_test = !cfg.at("test").get<std::string>().empty();
      in.data = cfg.at(has_test ? "test" : "valid").get<std::string>();
      if (in.hidden.empty()) in.hidden = cfg.at("hidden_states").at(has_test ? "test" : "valid").get<std::string>();
    }
    in.threshold = cfg.at("threshold").get<double>();
    if (!o.threads) in.threads = cfg.at("threads").get<std::size_t>();
  }
  if (o.threshold) in.threshold = *o.threshold;
  if (in.checkpoint.empty()) {
    code = usage_error("no checkpoint given (use --checkpoint or --config)");
    return std::nullopt;
  }
  if (in.data.empty()) {
    code = usage_error("no dataset given (use --data or a config with a test or valid split)");
    return std::nullopt;
  }
  return in;
}

struct ModelHandle {
  seqset_model* p = nullptr;
  ~ModelHandle() { seqset_model_free(p); }
};

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int run_train(const Options& o) {
  if (o.config.empty()) return usage_error("train needs --config");
  Owned out;
  const auto st = seqset_train(o.config.c_str(), overrides_of(o).dump().c_str(), out.slot());
  if (st != SEQSET_OK) return report_failure(st);
  std::cout << out.str() << '\n';
  return 0;
}

int run_model_command(const std::string& name, const Options& o) {
  int code = 0;
  const auto in = model_inputs(o, code);
  if (!in) return code;
  ModelHandle model;
  auto st = seqset_model_load(in->checkpoint.c_str(), &model.p);
  if (st != SEQSET_OK) return report_failure(st);

  Owned primary, secondary;
  if (name == "eval") {
    st = seqset_model_evaluate(model.p, in->data.c_str(), opt(in->hidden), in->threshold, in->threads, primary.slot());
    if (st != SEQSET_OK) return report_failure(st);
    std::cout << primary.str() << '\n';
  } else if (name == "predict") {
    st = seqset_model_predict(model.p, in->data.c_str(), opt(in->hidden), in->threads, primary.slot());
    if (st != SEQSET_OK) return report_failure(st);
    std::cout << primary.str();
  } else if (name == "explain") {
    st = seqset_model_explain(model.p, in->data.c_str(), opt(in->hidden), opt(o.ids), primary.slot(),
                              o.html.empty() ? nullptr : secondary.slot());
    if (st != SEQSET_OK) return report_failure(st);
    if (!o.html.empty() && !write_file(o.html, secondary.str())) return usage_error("cannot write " + o.html);
    std::cout << primary.str() << '\n';
  } else {
    st = seqset_model_erase_eval(model.p, in->data.c_str(), opt(in->hidden), in->threshold, in->threads,
                                 primary.slot(), secondary.slot());
    if (st != SEQSET_OK) return report_failure(st);
    if (!in->out.empty()) {
      const auto path = std::filesystem::path(in->out) / "erase_eval.csv";
      if (!write_file(path, secondary.str())) return usage_error("cannot write " + path.string());
    }
    std::cout << secondary.str();
  }
  return 0;
}

int run_ablate(const Options& o) {
  if (o.config.empty()) return usage_error("ablate needs --config");
  json sel = json::object();
  if (!o.variants.empty()) sel["variants"] = split_csv(o.variants);
  if (!o.similarities.empty()) sel["similarities"] = split_csv(o.similarities);
  if (!o.residuals.empty()) {
    std::vector<bool> r;
    for (const auto& v : split_csv(o.residuals)) {
      if (v != "on" && v != "off") return usage_error("--residuals takes on,off");
      r.push_back(v == "on");
    }
    sel["residuals"] = r;
  }
  Owned out;
  const auto st = seqset_ablate(o.config.c_str(), overrides_of(o).dump().c_str(), sel.dump().c_str(), out.slot());
  if (st != SEQSET_OK) return report_failure(st);
  std::cout << out.str() << '\n';
  return 0;
}

int run_gradcheck(const Options& o) {
  json opts = json::object();
  if (!o.config.empty()) {
    int code = 0;
    auto doc = read_json_file(o.config, code);
    if (!doc) return code;
    opts = *doc;
  }
  if (o.seed) opts["seed"] = *o.seed;
  if (!o.similarity.empty()) opts["similarity"] = o.similarity;
  if (!o.residual.empty()) {
    if (o.residual != "on" && o.residual != "off") return usage_error("--residual takes on or off");
    opts["use_residual"] = o.residual == "on";
  }
  if (!o.task.empty()) opts["task"] = o.task;
  if (!o.fault.empty()) opts["fault"] = o.fault;
  Owned out;
  const auto st = seqset_gradcheck(opts.dump().c_str(), out.slot());
  if (!out.str().empty()) {
    std::cout << out.str() << '\n';
    if (!o.out.empty()) write_file(std::filesystem::path(o.out) / "gradcheck.json", out.str() + "\n");
  }
  if (st != SEQSET_OK) return report_failure(st);
  return 0;
}

int run_synth(const Options& o) {
  json spec = json::object();
  if (!o.config.empty()) {
    int code = 0;
    auto doc = read_json_file(o.config, code);
    if (!doc) return code;
    spec = *doc;
  }
  if (o.seed) spec["seed"] = *o.seed;
  const std::string out_dir = o.out.empty() ? "synth" : o.out;
  Owned out;
  const auto st = seqset_synth(spec.dump().c_str(), out_dir.c_str(), out.slot());
  if (st != SEQSET_OK) return report_failure(st);
  std::cout << out.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqset: set-of-sequences models with modality residual attention"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(seqset_version()));
  Options o;

  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "JSON config file");
    if (config_required) c->required();
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output directory");
  };
  const auto model_flags = [&](CLI::App* sub) {
    sub->add_option("--checkpoint", o.checkpoint, "checkpoint.json (default: <out>/checkpoint.json)");
    sub->add_option("--data", o.data, "JSONL dataset (default: the config's test split)");
    sub->add_option("--hidden", o.hidden, "precomputed hidden states for --data");
    sub->add_option("--threads", o.threads, "evaluation threads");
  };

  auto* train = app.add_subcommand("train", "train a model and write a run directory");
  common(train, true);
  train->add_option("--threads", o.threads, "evaluation threads");

  std::vector<std::pair<std::string, CLI::App*>> model_cmds;
  for (const char* name : {"eval", "predict", "explain", "erase-eval"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " with a trained checkpoint");
    common(sub, false);
    model_flags(sub);
    if (std::string(name) != "predict") sub->add_option("--threshold", o.threshold, "decision threshold");
    if (std::string(name) == "explain") {
      sub->add_option("--ids", o.ids, "comma-separated sample ids (default: all)");
      sub->add_option("--html", o.html, "also write a static HTML heat view here");
    }
    model_cmds.emplace_back(name, sub);
  }

  auto* ablate = app.add_subcommand("ablate", "train and evaluate the attention ablation grid");
  common(ablate, true);
  ablate->add_option("--threads", o.threads, "grid cells run in parallel");
  ablate->add_option("--variants", o.variants, "subset of encoder_only,intra,inter,both");
  ablate->add_option("--similarities", o.similarities, "subset of additive,scaled_dot");
  ablate->add_option("--residuals", o.residuals, "subset of on,off");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every parameter group");
  common(gradcheck, false);
  gradcheck->add_option("--similarity", o.similarity, "additive or scaled_dot");
  gradcheck->add_option("--residual", o.residual, "on or off");
  gradcheck->add_option("--task", o.task, "binary, multilabel or regression");
  gradcheck->add_option("--fault", o.fault, "inject a broken backward rule (tanh_backward)");

  auto* synth = app.add_subcommand("synth", "generate the planted-signal benchmark");
  common(synth, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  if (o.seed && *o.seed < 0) return usage_error("--seed must be non-negative");
  if (train->parsed()) return run_train(o);
  for (const auto& [name, sub] : model_cmds)
    if (sub->parsed()) return run_model_command(name, o);
  if (ablate->parsed()) return run_ablate(o);
  if (gradcheck->parsed()) return run_gradcheck(o);
  return run_synth(o);
}
