// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "chansel/core_model.h"
#include "chansel/dataio.h"
#include "chansel/eegnet.h"
#include "chansel/error.h"
#include "chansel/eval_cache.h"
#include "chansel/evaluator.h"
#include "chansel/external.h"
#include "chansel/parallel.h"
#include "chansel/report.h"
#include "chansel/selectors.h"

namespace chansel::cli {
namespace {

// Thrown for flag values CLI11 accepts syntactically but we reject.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kBadMagic:
    case ErrorCode::kHeaderParse:
    case ErrorCode::kPayloadLengthMismatch:
    case ErrorCode::kNonFiniteSample:
      return kExitIo;
    case ErrorCode::kSingularCovariance:
    case ErrorCode::kProtocolTimeout:
    case ErrorCode::kProtocolMalformed:
    case ErrorCode::kEvaluatorError:
    case ErrorCode::kAccuracyOutOfRange:
    case ErrorCode::kProcessExited:
      return kExitEvaluator;
    case ErrorCode::kTooManyChannels:
      return kExitGuard;
    default:
      return kExitUsage;
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) parts.push_back(cur.substr(b, e - b + 1));
  }
  return parts;
}

bool parse_int(const std::string& s, int& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<ChannelIndex> parse_index_list(const std::string& text) {
  std::vector<ChannelIndex> out;
  for (const auto& tok : split(text, ',')) {
    int v = 0;
    if (!parse_int(tok, v)) throw UsageError("not a channel index: " + tok);
    out.push_back(v);
  }
  return out;
}

// "all", or comma-separated indices and/or montage labels.
ChannelSubset parse_channels(const std::string& text, const Montage& montage) {
  if (text == "all") return ChannelSubset::full(montage.n_channels());
  std::vector<ChannelIndex> picked;
  const auto& names = montage.channel_names();
  for (const auto& tok : split(text, ',')) {
    int v = 0;
    if (parse_int(tok, v)) {
      picked.push_back(v);
      continue;
    }
    auto it = std::find(names.begin(), names.end(), tok);
    if (it == names.end()) throw Error(ErrorCode::kUnknownName, tok);
    picked.push_back(static_cast<ChannelIndex>(it - names.begin()));
  }
  return ChannelSubset::canonicalize(picked, montage.n_channels());
}

std::vector<FrequencyBand> parse_bands(const std::string& text) {
  std::vector<FrequencyBand> bands;
  if (text == "broadband" || text.empty()) return bands;
  for (const auto& tok : split(text, ',')) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) throw UsageError("band needs low-high: " + tok);
    try {
      std::size_t used = 0;
      const double lo = std::stod(tok.substr(0, dash), &used);
      const double hi = std::stod(tok.substr(dash + 1));
      bands.push_back({lo, hi});
    } catch (const std::logic_error&) {
      throw UsageError("bad band: " + tok);
    }
  }
  return bands;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct EvaluatorFlags {
  std::string kind = "builtin";
  int folds = 5;
  double gamma = 0.1;
  std::string bands = "4-8,8-13,13-30";
  bool no_fallback = false;
  std::uint64_t seed = 0;
  std::string oracle_informative;
  double oracle_base = 0.5;
  double oracle_gain = 0.1;
  double oracle_penalty = 0.01;
  std::string command;
  double timeout_s = 600.0;
  int pool = 0;  // 0: same as --jobs

  void add_to(CLI::App& app) {
    app.add_option("--evaluator", kind, "builtin | oracle | external")
        ->check(CLI::IsMember({"builtin", "oracle", "external"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "Evaluation seed (fold assignment, external seed)")
        ->capture_default_str();
    app.add_option("--folds", folds, "Cross-validation folds (builtin)")
        ->capture_default_str();
    app.add_option("--gamma", gamma, "Shrinkage in [0,1] (builtin)")
        ->capture_default_str();
    app.add_option("--bands", bands,
                   "Bands as lo-hi,lo-hi Hz, or 'broadband' (builtin)")
        ->capture_default_str();
    app.add_flag("--no-broadband-fallback", no_fallback,
                 "Fail instead of using broadband features when bands exceed fs/2");
    app.add_option("--oracle-informative", oracle_informative,
                   "Informative channel indices (oracle)");
    app.add_option("--oracle-base", oracle_base)->capture_default_str();
    app.add_option("--oracle-gain", oracle_gain)->capture_default_str();
    app.add_option("--oracle-penalty", oracle_penalty)->capture_default_str();
    app.add_option("--eval-cmd", command,
                   "Evaluator command line, run with /bin/sh -c (external)");
    app.add_option("--timeout", timeout_s, "Seconds per external request")
        ->capture_default_str();
    app.add_option("--pool", pool, "External evaluator processes (default: --jobs)");
  }

  void echo(std::vector<std::pair<std::string, std::string>>& cfg) const {
    cfg.emplace_back("evaluator", kind);
    cfg.emplace_back("seed", std::to_string(seed));
    if (kind == "builtin") {
      cfg.emplace_back("folds", std::to_string(folds));
      cfg.emplace_back("gamma", std::to_string(gamma));
      cfg.emplace_back("bands", bands);
      cfg.emplace_back("broadband_fallback", no_fallback ? "off" : "on");
    } else if (kind == "oracle") {
      cfg.emplace_back("oracle_informative", oracle_informative);
      cfg.emplace_back("oracle_base", std::to_string(oracle_base));
      cfg.emplace_back("oracle_gain", std::to_string(oracle_gain));
      cfg.emplace_back("oracle_penalty", std::to_string(oracle_penalty));
    } else {
      cfg.emplace_back("eval_cmd", command);
    }
  }

  std::shared_ptr<SubsetEvaluator> build(
      const std::shared_ptr<const TrialSet>& trials,
      const std::filesystem::path& dataset_path, int jobs) const {
    if (kind == "builtin") {
      BuiltinEvalConfig cfg;
      cfg.n_folds = folds;
      cfg.shrinkage_gamma = gamma;
      cfg.bands = parse_bands(bands);
      cfg.broadband_fallback = !no_fallback;
      return std::make_shared<BuiltinEvaluator>(trials, cfg);
    }
    if (kind == "oracle") {
      OracleSpec spec;
      spec.informative = parse_index_list(oracle_informative);
      spec.base = oracle_base;
      spec.gain = oracle_gain;
      spec.penalty = oracle_penalty;
      return std::make_shared<OracleEvaluator>(spec);
    }
    if (command.empty()) throw UsageError("--evaluator external needs --eval-cmd");
    return std::make_shared<ExternalEvaluator>(shell_command(command), dataset_path,
                                               pool > 0 ? pool : jobs, timeout_s);
  }
};

std::shared_ptr<EvalCache> make_cache() {
  if (auto file = EvalCache::record_file_from_env()) {
    return std::make_shared<EvalCache>(*file);
  }
  return std::make_shared<EvalCache>();
}

// synth

struct SynthFlags {
  SynthSpec spec;
  std::string informative = "7,9,11";
  std::string names;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SynthSpec spec = f.spec;
  spec.informative_channels = parse_index_list(f.informative);
  if (!f.names.empty()) spec.channel_names = split(f.names, ',');
  const TrialSet trials = synth(spec, f.seed);
  write_ets_file(trials, f.out);
  out << fingerprint(trials) << "\n";
  return kExitOk;
}

// convert

struct ConvertFlags {
  std::string csv;
  double fs_hz = 250.0;
  std::string names;
  std::string out;
};

int cmd_convert(const ConvertFlags& f, std::ostream& out) {
  std::ifstream in(f.csv);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + f.csv);
  const TrialSet trials = import_csv(in, f.fs_hz, split(f.names, ','));
  write_ets_file(trials, f.out);
  out << fingerprint(trials) << "\n";
  return kExitOk;
}

// eval

struct EvalFlags {
  std::string dataset;
  std::string channels;
  EvaluatorFlags evaluator;
};

int cmd_eval(const EvalFlags& f, std::ostream& out) {
  auto trials = std::make_shared<const TrialSet>(read_ets_file(f.dataset));
  const ChannelSubset subset = parse_channels(f.channels, trials->montage());
  auto backend = f.evaluator.build(trials, f.dataset, 1);
  CachedEvaluator evaluator(backend, make_cache(), fingerprint(*trials));
  const EvalResult r = evaluator.evaluate(subset, f.evaluator.seed);
  out << fmt4(r.accuracy) << "\n";
  return kExitOk;
}

// select

struct SelectFlags {
  std::string method;
  std::string dataset;
  std::string out;
  std::string curve;
  int jobs = default_jobs();
  bool mask_timing = false;
  EvaluatorFlags evaluator;
  // exhaustive
  int max_channels = kExhaustiveGuard;
  bool allow_large = false;
  // random
  int k = 0;
  double p_include = 0.5;
  std::uint64_t sample_seed = 0;
  int target_size = 0;
  std::string score_mode = "raw_sum";
  // task
  std::string prefixes = "FC,C,CP";
  std::string names;
  bool evaluate = false;
};

int cmd_select(const SelectFlags& f, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  auto trials = std::make_shared<const TrialSet>(read_ets_file(f.dataset));
  const int c = trials->n_channels();
  const auto& names = trials->montage().channel_names();

  RunReport report;
  report.dataset_digest = fingerprint(*trials);
  report.channel_names = names;
  report.config.emplace_back("method", f.method);
  report.config.emplace_back("dataset", std::filesystem::path(f.dataset).filename().string());

  std::shared_ptr<CachedEvaluator> evaluator;
  const bool needs_evaluator = f.method != "task" || f.evaluate;
  if (needs_evaluator) {
    f.evaluator.echo(report.config);
    auto backend = f.evaluator.build(trials, f.dataset, f.jobs);
    evaluator = std::make_shared<CachedEvaluator>(backend, make_cache(),
                                                  report.dataset_digest);
  }
  const std::uint64_t seed = f.evaluator.seed;
  const EvaluateFn evaluate = [&](const ChannelSubset& s) {
    return evaluator->evaluate(s, seed);
  };

  if (f.method == "exhaustive") {
    report.method = SearchMethod::kExhaustive;
    const int guard = f.allow_large ? kExhaustiveHardLimit : f.max_channels;
    report.config.emplace_back("max_channels", std::to_string(guard));
    // Check the guard before any evaluation.
    if (c > guard || c > kExhaustiveHardLimit) {
      throw Error(ErrorCode::kTooManyChannels,
                  std::to_string(c) + " channels exceeds the exhaustive-search guard of " +
                      std::to_string(guard) + " (use --allow-large)");
    }
    report.trace = exhaustive_search(evaluate, c, guard, f.jobs);
  } else if (f.method == "greedy") {
    report.method = SearchMethod::kGreedy;
    report.trace = greedy_forward_search(evaluate, c, f.jobs);
  } else if (f.method == "random") {
    report.method = SearchMethod::kWeightedRandom;
    WeightedRandomConfig cfg;
    cfg.k = f.k;
    cfg.p_include = f.p_include;
    cfg.seed = f.sample_seed;
    if (f.target_size > 0) cfg.target_size = f.target_size;
    cfg.score_mode = f.score_mode == "occurrence_mean" ? ScoreMode::kOccurrenceMean
                                                       : ScoreMode::kRawSum;
    report.config.emplace_back("k", std::to_string(cfg.k));
    report.config.emplace_back("p_include", std::to_string(cfg.p_include));
    report.config.emplace_back("sample_seed", std::to_string(cfg.seed));
    report.config.emplace_back("target_size", std::to_string(f.target_size));
    report.config.emplace_back("score_mode", f.score_mode);
    auto result = weighted_random_search(evaluate, c, cfg, f.jobs);
    report.trace = std::move(result.trace);
    report.scores = std::move(result.scores);
    report.ranking = std::move(result.ranking);
    report.selected = std::move(result.selected);
  } else {
    report.method = SearchMethod::kTaskBased;
    RegionSpec region;
    region.row_prefixes = split(f.prefixes, ',');
    region.explicit_names = split(f.names, ',');
    report.config.emplace_back("prefixes", f.prefixes);
    report.config.emplace_back("names", f.names);
    const ChannelSubset subset = task_based_subset(trials->montage(), region);
    report.trace.method = SearchMethod::kTaskBased;
    if (f.evaluate) {
      report.trace.steps.push_back({subset, evaluate(subset).accuracy, 1});
      report.trace.update_best_step();
    }
    report.selected = subset;
  }

  if (report.trace.error) {
    err << "error: " << *report.trace.error << "\n";
    err << "partial trace: " << report.trace.steps.size() << " completed step(s)\n";
    for (const auto& s : report.trace.steps) {
      err << "  " << subset_names(s.subset, names, "+") << " " << fmt4(s.accuracy)
          << "\n";
    }
    return kExitEvaluator;
  }
  if (!report.selected && report.trace.best_step >= 0) {
    report.selected = report.trace.best().subset;
  }
  if (!report.trace.steps.empty()) report.curve = accuracy_curve(report.trace);
  if (evaluator) {
    report.total_evaluations = evaluator->requests();
    report.backend_calls = evaluator->backend_calls();
    report.cache_hits = evaluator->cache_hits();
  }
  report.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();

  if (!f.out.empty()) {
    std::string curve_path = f.curve;
    if (curve_path.empty()) {
      curve_path = std::filesystem::path(f.out).replace_extension(".curve.csv").string();
    }
    write_file_atomic(f.out, render_report(report, f.mask_timing));
    write_file_atomic(curve_path, render_curve_csv(report.curve, names));
  } else if (!f.curve.empty()) {
    write_file_atomic(f.curve, render_curve_csv(report.curve, names));
  }

  out << "selected: " << subset_names(*report.selected, names, ",");
  if (report.trace.best_step >= 0) {
    // The selected subset's own accuracy, when it was evaluated.
    for (auto it = report.trace.steps.rbegin(); it != report.trace.steps.rend(); ++it) {
      if (it->subset == *report.selected) {
        out << " accuracy=" << fmt4(it->accuracy);
        break;
      }
    }
  }
  out << "\n";
  return kExitOk;
}

// params

struct ParamsFlags {
  EegnetArch arch;
  std::string count_mode = "trainable_only";
};

int cmd_params(const ParamsFlags& f, std::ostream& out) {
  EegnetArch arch = f.arch;
  arch.count_mode = f.count_mode == "all_batchnorm" ? BatchNormCount::kAll
                                                    : BatchNormCount::kTrainableOnly;
  const std::int64_t n = eegnet_param_count(arch);
  out << n << " " << format_thousands(n) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Wrapper-based EEG channel-subset selection"};
  app.name(args.empty() ? "chansel" : std::filesystem::path(args[0]).filename().string());
  app.require_subcommand(1);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic trial set with planted channels");
  synth_cmd->add_option("--trials", synth_flags.spec.n_trials)->capture_default_str();
  synth_cmd->add_option("--channels", synth_flags.spec.n_channels)->capture_default_str();
  synth_cmd->add_option("--samples", synth_flags.spec.n_samples)->capture_default_str();
  synth_cmd->add_option("--classes", synth_flags.spec.n_classes)->capture_default_str();
  synth_cmd->add_option("--informative", synth_flags.informative,
                        "Planted channel indices")->capture_default_str();
  synth_cmd->add_option("--separation", synth_flags.spec.separation)->capture_default_str();
  synth_cmd->add_option("--noise-sigma", synth_flags.spec.noise_sigma)->capture_default_str();
  synth_cmd->add_option("--fs", synth_flags.spec.fs_hz)->capture_default_str();
  synth_cmd->add_option("--names", synth_flags.names, "Comma-separated channel labels");
  synth_cmd->add_option("--seed", synth_flags.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_flags.out, "Output ETS file")->required();

  ConvertFlags convert_flags;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a CSV trial table to ETS");
  convert_cmd->add_option("--csv", convert_flags.csv)->required();
  convert_cmd->add_option("--fs", convert_flags.fs_hz)->capture_default_str();
  convert_cmd->add_option("--names", convert_flags.names,
                          "Comma-separated channel labels")->required();
  convert_cmd->add_option("--out", convert_flags.out)->required();

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate one channel subset");
  eval_cmd->add_option("--dataset", eval_flags.dataset)->required();
  eval_cmd->add_option("--channels", eval_flags.channels,
                       "'all' or comma-separated indices/labels")->required();
  eval_flags.evaluator.add_to(*eval_cmd);

  SelectFlags select_flags;
  auto* select_cmd = app.add_subcommand("select", "Run a channel-selection search");
  select_cmd->add_option("--method", select_flags.method)
      ->check(CLI::IsMember({"exhaustive", "greedy", "random", "task"}))
      ->required();
  select_cmd->add_option("--dataset", select_flags.dataset)->required();
  select_cmd->add_option("--out", select_flags.out, "Report file (JSON)");
  select_cmd->add_option("--curve", select_flags.curve,
                         "Curve CSV (default: <out>.curve.csv)");
  select_cmd->add_option("--jobs", select_flags.jobs, "Concurrent evaluations")
      ->capture_default_str();
  select_cmd->add_flag("--mask-timing", select_flags.mask_timing,
                       "Write 0 for wall-time fields");
  select_cmd->add_option("--max-channels", select_flags.max_channels,
                         "Exhaustive-search guard")->capture_default_str();
  select_cmd->add_flag("--allow-large", select_flags.allow_large,
                       "Lift the exhaustive-search guard");
  select_cmd->add_option("--k", select_flags.k, "Random subsets to sample");
  select_cmd->add_option("--p-include", select_flags.p_include)->capture_default_str();
  select_cmd->add_option("--sample-seed", select_flags.sample_seed)->capture_default_str();
  select_cmd->add_option("--target-size", select_flags.target_size,
                         "Channels to keep after scoring (0: none)");
  select_cmd->add_option("--score-mode", select_flags.score_mode)
      ->check(CLI::IsMember({"raw_sum", "occurrence_mean"}))
      ->capture_default_str();
  select_cmd->add_option("--prefixes", select_flags.prefixes,
                         "10-20 rows for task-based selection")->capture_default_str();
  select_cmd->add_option("--names", select_flags.names,
                         "Explicit channel labels for task-based selection");
  select_cmd->add_flag("--evaluate", select_flags.evaluate,
                       "Evaluate the task-based subset");
  select_flags.evaluator.add_to(*select_cmd);

  ParamsFlags params_flags;
  auto* params_cmd = app.add_subcommand("params", "EEGNet parameter count for an input size");
  auto& a = params_flags.arch;
  params_cmd->add_option("--channels", a.channels)->capture_default_str();
  params_cmd->add_option("--samples", a.samples)->capture_default_str();
  params_cmd->add_option("--f1", a.f1)->capture_default_str();
  params_cmd->add_option("--depth", a.depth)->capture_default_str();
  params_cmd->add_option("--f2", a.f2)->capture_default_str();
  params_cmd->add_option("--kern-len", a.kern_len)->capture_default_str();
  params_cmd->add_option("--sep-kern", a.sep_kern)->capture_default_str();
  params_cmd->add_option("--pool1", a.pool1)->capture_default_str();
  params_cmd->add_option("--pool2", a.pool2)->capture_default_str();
  params_cmd->add_option("--classes", a.n_classes)->capture_default_str();
  params_cmd->add_option("--count-mode", params_flags.count_mode)
      ->check(CLI::IsMember({"trainable_only", "all_batchnorm"}))
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth_flags, out);
    if (convert_cmd->parsed()) return cmd_convert(convert_flags, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_flags, out);
    if (select_cmd->parsed()) return cmd_select(select_flags, out, err);
    if (params_cmd->parsed()) return cmd_params(params_flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace chansel::cli
