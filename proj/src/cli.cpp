// Copyright 2026 The vgrounding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vgrounding/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgrounding/error.hpp"
#include "vgrounding/gradcheck.hpp"
#include "vgrounding/harness.hpp"
#include "vgrounding/synthetic.hpp"

namespace vgrounding {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  SyntheticConfig synth;
  std::string synth_out;

  RunConfig run;
  std::string train_dir, val_dir, test_dir;
  std::string model_path, data_dir, out_path, log_path, table_path;
  std::vector<std::size_t> ks = {8, 16, 32, 48, 64};
  std::vector<std::string> encoder_datasets;

  GradcheckConfig gradcheck;
};

void add_optimizer_flags(CLI::App* cmd, Options& o) {
  OptimizerConfig& opt = o.run.optimizer;
  cmd->add_option("--lr", opt.lr0, "Initial learning rate");
  cmd->add_option("--momentum", opt.momentum, "Nesterov momentum");
  cmd->add_option("--weight-decay", opt.weight_decay, "L2 weight decay on W");
  cmd->add_option("--lr-decay-factor", opt.decay_factor, "Divide the learning rate by this factor ...");
  cmd->add_option("--lr-decay-every", opt.decay_every_epochs, "... every this many epochs");
  cmd->add_option("--epochs", opt.epochs, "Training epochs");
  cmd->add_option("--batch-size", opt.batch_size, "Samples per optimizer step");
  cmd->add_option("--seed", opt.seed, "Seed for initialization and shuffling");
}

void add_eval_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--top-k", o.run.top_k, "Proposals kept per sample, by rpn_score");
  cmd->add_option("--min-gt-iou", o.run.min_gt_iou, "IoU needed to assign a training target");
  cmd->add_option("--strict-ap50", o.run.strict_ap50, "Count a hit only when IoU > 0.5 (false: >= 0.5)");
  cmd->add_option("--threads", o.run.threads, "Worker threads for evaluation (0 = all cores)");
}

void add_config_flag(CLI::App* cmd) {
  // Consumed before parsing; registered so that it shows up in --help.
  cmd->add_option("--config", "JSON object of flag values; explicit flags take precedence");
}

// Expands `--config file.json` into ordinary flags placed before the user's
// own arguments. Keys the user passed explicitly are dropped from the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::string config_path;
  std::set<std::string> explicit_flags;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
      continue;
    }
    if (a.rfind("--", 0) == 0) explicit_flags.insert(a.substr(2, a.find('=') - 2));
    rest.push_back(a);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) fail(ErrorKind::kConfig, fmt::format("{}: cannot read config file", config_path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kConfig, fmt::format("{}: malformed JSON: {}", config_path, e.what()));
  }
  if (!j.is_object()) fail(ErrorKind::kConfig, fmt::format("{}: expected a JSON object", config_path));

  auto scalar = [&](const json& v, const std::string& key) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    fail(ErrorKind::kConfig, fmt::format("{}: unsupported value for '{}'", config_path, key));
  };

  std::vector<std::string> expanded = {args[0]};
  for (const auto& [raw_key, value] : j.items()) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (explicit_flags.contains(key)) continue;
    if (value.is_array()) {
      for (const json& v : value) {
        expanded.push_back("--" + key);
        expanded.push_back(scalar(v, key));
      }
    } else {
      expanded.push_back("--" + key);
      expanded.push_back(scalar(value, key));
    }
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitBadFlags;
    case ErrorKind::kNumeric: return kExitNumeric;
    case ErrorKind::kDataset:
    case ErrorKind::kFormat:
    case ErrorKind::kDimension:
    case ErrorKind::kIo: return kExitDataset;
  }
  return kExitInternal;
}

void print_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << "error: kind=" << kind << " message=" << json(message).dump() << '\n';
}

RunConfig resolve_run(const Options& o) {
  RunConfig run = o.run;
  run.train_dir = o.train_dir;
  run.val_dir = o.val_dir;
  run.test_dir = o.test_dir;
  run.validate();
  return run;
}

void describe_run(const RunConfig& run, std::ostream& err) {
  const OptimizerConfig& opt = run.optimizer;
  err << fmt::format(
      "config: lr={} momentum={} weight_decay={} lr_decay_factor={} lr_decay_every={} "
      "epochs={} batch_size={} seed={} top_k={} min_gt_iou={} strict_ap50={}\n",
      opt.lr0, opt.momentum, opt.weight_decay, opt.decay_factor, opt.decay_every_epochs,
      opt.epochs, opt.batch_size, opt.seed, run.top_k, run.min_gt_iou, run.strict_ap50);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) fail(ErrorKind::kIo, fmt::format("{}: write failed", path));
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  const SyntheticResult r = generate_synthetic(o.synth, o.synth_out);
  err << fmt::format("synth: {} train / {} test samples, {} proposals each\n",
                     o.synth.n_train, o.synth.n_test, o.synth.proposals);
  out << r.train_dir.string() << '\n' << r.test_dir.string() << '\n';
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig run = resolve_run(o);
  run.checkpoint_path = o.out_path;
  describe_run(run, err);

  const auto start = std::chrono::steady_clock::now();
  const TrainResult result = train(run, [&](const EpochLog& e) {
    err << fmt::format("epoch {:>3}  lr {:<8g} loss {:.6f}  val_ap50 {}  skipped {}\n", e.epoch,
                       e.lr, e.mean_train_loss,
                       e.val_ap50 ? fmt::format("{:.4f}", *e.val_ap50) : std::string("-"),
                       e.skipped_samples);
  });
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << fmt::format("trained in {:.2f}s\n", secs);

  if (!run.test_dir.empty()) {
    const EvalReport test = evaluate(result.model, run.test_dir, run);
    err << fmt::format("test ap50 {:.4f} oracle_recall {:.4f} (n={})\n", test.ap50,
                       test.oracle_recall, test.n_samples);
  }
  out << o.out_path << '\n';
  if (!o.log_path.empty()) {
    std::ostringstream csv;
    write_epoch_log_csv(result.epochs, csv);
    write_text_file(o.log_path, csv.str());
    out << o.log_path << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig run = resolve_run(o);
  const Dataset ds = load_dataset(o.data_dir);
  const TransformModel model =
      load_checkpoint(o.model_path, ExpectedDims{ds.meta.d_img, ds.meta.d_txt});
  const EvalReport report = evaluate(model, ds, run);
  err << fmt::format("ap50 {:.4f} oracle_recall {:.4f} n {}\n", report.ap50,
                     report.oracle_recall, report.n_samples);
  out << "ap50,oracle_recall,n_samples\n"
      << fmt::format("{},{},{}\n", report.ap50, report.oracle_recall, report.n_samples);
  if (!o.out_path.empty()) {
    std::ostringstream preds;
    write_predictions(report, preds);
    write_text_file(o.out_path, preds.str());
    out << o.out_path << '\n';
  }
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream&) {
  const RunConfig run = resolve_run(o);
  const Dataset ds = load_dataset(o.data_dir);
  const TransformModel model =
      load_checkpoint(o.model_path, ExpectedDims{ds.meta.d_img, ds.meta.d_txt});
  std::ostringstream preds;
  write_predictions(evaluate(model, ds, run), preds);
  write_text_file(o.out_path, preds.str());
  out << o.out_path << '\n';
  return kExitOk;
}

int emit_ablation(const Options& o, const AblationResult& result, std::ostream& out,
                  std::ostream& err) {
  std::ostringstream table;
  result.write_table(table);
  err << table.str();
  std::ostringstream csv;
  result.write_csv(csv);
  if (o.out_path.empty()) {
    out << csv.str();
  } else {
    write_text_file(o.out_path, csv.str());
    out << o.out_path << '\n';
  }
  if (!o.table_path.empty()) {
    write_text_file(o.table_path, table.str());
    out << o.table_path << '\n';
  }
  return kExitOk;
}

int cmd_ablate_topk(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig run = resolve_run(o);
  describe_run(run, err);
  return emit_ablation(o, ablate_top_k(run, o.ks), out, err);
}

// Accepts "label=root" (expects root/train and root/test) or
// "label=train_dir,eval_dir".
EncoderDataset parse_encoder_dataset(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    fail(ErrorKind::kConfig, fmt::format("--dataset expects label=path, got '{}'", spec));
  }
  EncoderDataset d;
  d.label = spec.substr(0, eq);
  const std::string rhs = spec.substr(eq + 1);
  const auto comma = rhs.find(',');
  if (comma == std::string::npos) {
    d.train_dir = fs::path(rhs) / "train";
    d.eval_dir = fs::path(rhs) / "test";
  } else {
    d.train_dir = rhs.substr(0, comma);
    d.eval_dir = rhs.substr(comma + 1);
  }
  return d;
}

int cmd_ablate_encoders(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig run = resolve_run(o);
  describe_run(run, err);
  std::vector<EncoderDataset> datasets;
  for (const std::string& spec : o.encoder_datasets) datasets.push_back(parse_encoder_dataset(spec));
  return emit_ablation(o, ablate_encoders(datasets, run), out, err);
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const GradcheckReport r = run_gradcheck(o.gradcheck);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << fmt::format("gradcheck: {} trials, {} coordinates, {} failures, {:.2f}s\n", r.trials,
                     r.coordinates, r.failures, secs);
  out << fmt::format("max_rel_error={:.3e} max_abs_error={:.3e}\n", r.max_rel_error,
                     r.max_abs_error);
  if (!r.passed()) {
    print_error(err, "numeric",
                fmt::format("{} gradient coordinates exceed relative tolerance {}", r.failures,
                            o.gradcheck.rel_tol));
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"Proposal-based visual grounding: cosine scoring with softmax cross-entropy",
               "vground"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic train/test dataset directories");
  synth->add_option("--seed", o.synth.seed, "Generator seed");
  synth->add_option("--n-train", o.synth.n_train, "Training samples");
  synth->add_option("--n-test", o.synth.n_test, "Test samples");
  synth->add_option("--p", o.synth.proposals, "Proposals per sample");
  synth->add_option("--d-img", o.synth.d_img, "Image feature dimensionality");
  synth->add_option("--d-txt", o.synth.d_txt, "Text feature dimensionality");
  synth->add_option("--noise", o.synth.noise_sigma, "Feature noise standard deviation");
  synth->add_option("--confusers", o.synth.confusers,
                    "Low-confidence distractors whose features resemble the target");
  synth->add_option("--confuser-spread", o.synth.confuser_spread,
                    "Latent perturbation scale of confusers");
  synth->add_option("--out", o.synth_out, "Output root (train/ and test/ are created)")->required();
  add_config_flag(synth);

  CLI::App* train_cmd = app.add_subcommand("train", "Train the text transform");
  train_cmd->add_option("--train", o.train_dir, "Training dataset directory")->required();
  train_cmd->add_option("--val", o.val_dir, "Validation dataset directory (AP50 logged per epoch)");
  train_cmd->add_option("--test", o.test_dir, "Test dataset directory (AP50 reported at the end)");
  train_cmd->add_option("--out", o.out_path, "Checkpoint output path")->required();
  train_cmd->add_option("--log", o.log_path, "Epoch log CSV output path");
  add_optimizer_flags(train_cmd, o);
  add_eval_flags(train_cmd, o);
  add_config_flag(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Report AP50 and oracle recall");
  eval_cmd->add_option("--model", o.model_path, "Checkpoint path")->required();
  eval_cmd->add_option("--data", o.data_dir, "Dataset directory")->required();
  eval_cmd->add_option("--out", o.out_path, "Optional per-sample predictions (JSONL)");
  add_eval_flags(eval_cmd, o);
  add_config_flag(eval_cmd);

  CLI::App* predict_cmd = app.add_subcommand("predict", "Write one predicted box per sample");
  predict_cmd->add_option("--model", o.model_path, "Checkpoint path")->required();
  predict_cmd->add_option("--data", o.data_dir, "Dataset directory")->required();
  predict_cmd->add_option("--out", o.out_path, "Prediction JSONL output path")->required();
  add_eval_flags(predict_cmd, o);
  add_config_flag(predict_cmd);

  CLI::App* topk_cmd = app.add_subcommand("ablate-topk", "Train and evaluate once per top-k value");
  topk_cmd->add_option("--train", o.train_dir, "Training dataset directory")->required();
  topk_cmd->add_option("--val", o.val_dir, "Evaluation dataset directory")->required();
  topk_cmd->add_option("--ks", o.ks, "Top-k values")->delimiter(',');
  topk_cmd->add_option("--out", o.out_path, "CSV output path (default: standard output)");
  topk_cmd->add_option("--table", o.table_path, "Aligned text table output path");
  add_optimizer_flags(topk_cmd, o);
  add_eval_flags(topk_cmd, o);
  add_config_flag(topk_cmd);

  CLI::App* enc_cmd =
      app.add_subcommand("ablate-encoders", "Train and evaluate once per embedding dataset");
  enc_cmd->add_option("--dataset", o.encoder_datasets,
                      "label=root (root/train, root/test) or label=train_dir,eval_dir; repeatable")
      ->required();
  enc_cmd->add_option("--out", o.out_path, "CSV output path (default: standard output)");
  enc_cmd->add_option("--table", o.table_path, "Aligned text table output path");
  add_optimizer_flags(enc_cmd, o);
  add_eval_flags(enc_cmd, o);
  add_config_flag(enc_cmd);

  CLI::App* grad_cmd =
      app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  grad_cmd->add_option("--trials", o.gradcheck.trials, "Randomized problems");
  grad_cmd->add_option("--seed", o.gradcheck.seed, "Problem generator seed");
  add_config_flag(grad_cmd);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      const auto subs = app.get_subcommands();
      err << (subs.empty() ? app.help() : subs.front()->help());
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      print_error(err, "config", e.what());
      return kExitBadFlags;
    }

    if (synth->parsed()) return cmd_synth(o, out, err);
    if (train_cmd->parsed()) return cmd_train(o, out, err);
    if (eval_cmd->parsed()) return cmd_eval(o, out, err);
    if (predict_cmd->parsed()) return cmd_predict(o, out, err);
    if (topk_cmd->parsed()) return cmd_ablate_topk(o, out, err);
    if (enc_cmd->parsed()) return cmd_ablate_encoders(o, out, err);
    if (grad_cmd->parsed()) return cmd_gradcheck(o, out, err);
    print_error(err, "config", "no subcommand given");
    return kExitBadFlags;
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace vgrounding
