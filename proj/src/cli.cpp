#include "offlang/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "offlang/config.hpp"
#include "offlang/diagnostics.hpp"
#include "offlang/metrics.hpp"
#include "offlang/pipeline.hpp"

namespace offlang::cli {
namespace {

// Config keys settable from the command line, plus --config/--preset.
struct ConfigOptions {
  std::string config_file;
  std::string preset;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value config file");
    app.add_option("--preset", preset, "shipped preset: official-a-svm, official-b, official-c");
    for (auto key : config_keys()) {
      const std::string name(key);
      // Subcommand-specific options of the same name take precedence.
      if (key == "preset" || app.get_option_no_throw("--" + name) != nullptr) continue;
      options[name] = app.add_option("--" + name, flags[name], "config key '" + name + "'");
    }
  }

  KeyValues merged() const {
    KeyValues file;
    if (!config_file.empty()) file = load_key_values(config_file);
    std::string preset_name = preset;
    if (preset_name.empty()) {
      if (const auto it = file.find("preset"); it != file.end()) preset_name = it->second;
    }
    KeyValues kv;
    if (!preset_name.empty()) {
      const auto text = preset_text(preset_name);
      if (!text) throw Error("unknown preset '" + preset_name + "'");
      std::istringstream in{std::string(*text)};
      kv = parse_key_values(in, preset_name);
    }
    for (const auto& [k, v] : file) {
      if (k != "preset") kv[k] = v;
    }
    for (const auto& [k, opt] : options) {
      if (opt->count() > 0) kv[k] = flags.at(k);
    }
    return kv;
  }

  RunConfig run_config() const { return RunConfig::from_key_values(merged()); }
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

Corpus load_training(const RunConfig& cfg) {
  auto train = parse_olid(cfg.train, cfg.task);
  if (cfg.also_train.empty()) return train;
  const auto extra = parse_olid(cfg.also_train, cfg.task);
  auto instances = train.instances();
  instances.insert(instances.end(), extra.begin(), extra.end());
  return Corpus(cfg.task, std::move(instances));
}

void emit_report(const EvalReport& report, const std::string& format, const std::string& report_path,
                 std::ostream& out) {
  if (format == "text") {
    write_report_text(out, report);
  } else if (format == "kv") {
    write_report_kv(out, report);
  } else {
    throw Error("unknown report format '" + format + "' (expected kv or text)");
  }
  if (!report_path.empty()) {
    auto file = open_output(report_path);
    write_report_kv(file, report);
  }
}

int cmd_train(const ConfigOptions& opts, std::ostream& out) {
  const auto cfg = opts.run_config();
  cfg.validate(true);
  const auto resources = LoadedResources::load(cfg);
  auto train = load_training(cfg);

  std::optional<Corpus> held_out;
  if (cfg.holdout > 0.0) {
    auto [kept, held] = split(train, cfg.holdout, cfg.svm.seed);
    train = std::move(kept);
    held_out = std::move(held);
  }

  const auto trained = train_pipeline(train, cfg, resources.view());
  trained.space.save(cfg.space_path());
  trained.model.save(cfg.model);

  out << "task " << to_string(cfg.task) << '\n';
  out << "instances " << train.size() << '\n';
  out << "dimension " << trained.model.dimension() << '\n';
  out << "model " << cfg.model.string() << '\n';
  out << "space " << cfg.space_path().string() << '\n';
  if (held_out) {
    const auto rows = predict_corpus(trained.model, trained.space, *held_out, cfg.features, resources.view(),
                                     cfg.resolved_threads());
    out << "held_out " << held_out->size() << '\n';
    write_report_kv(out, evaluate(*held_out, to_prediction_map(rows)));
  }
  return 0;
}

int cmd_predict(const ConfigOptions& opts, const std::string& input, const std::string& output,
                std::ostream& out) {
  const auto cfg = opts.run_config();
  cfg.validate(false);
  if (cfg.model.empty()) throw Error("config key 'model' is required");
  const std::filesystem::path in_path = input.empty() ? cfg.eval : std::filesystem::path(input);
  const std::filesystem::path out_path = output.empty() ? cfg.predictions : std::filesystem::path(output);
  if (in_path.empty()) throw Error("no input file (use --input or config key 'eval')");
  if (out_path.empty()) throw Error("no output file (use --output or config key 'predictions')");

  const auto model = SvmModel::load(cfg.model);
  const auto space = FeatureSpace::load(cfg.space_path());
  check_space_matches(space, cfg.features);
  const auto classes = task_classes(cfg.task);
  if (!std::equal(model.classes().begin(), model.classes().end(), classes.begin(), classes.end())) {
    throw Error("model classes do not match task " + std::string(to_string(cfg.task)));
  }
  const auto resources = LoadedResources::load(cfg);
  const auto corpus = parse_olid(in_path, cfg.task);
  const auto rows = predict_corpus(model, space, corpus, cfg.features, resources.view(), cfg.resolved_threads());
  auto file = open_output(out_path);
  write_predictions(file, rows);
  if (!file) throw Error("write failed for '" + out_path.string() + "'");
  out << "predictions " << rows.size() << ' ' << out_path.string() << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string gold;
  std::string predictions;
  std::string task;
  std::string baseline;
  std::string permute;
  std::string format = "kv";
  std::string report;
};

int cmd_evaluate(const ConfigOptions& opts, const EvaluateArgs& args, std::ostream& out) {
  auto cfg = opts.run_config();
  if (!args.task.empty()) cfg.task = parse_task(args.task);
  const std::filesystem::path gold_path = args.gold.empty() ? cfg.eval : std::filesystem::path(args.gold);
  if (gold_path.empty()) throw Error("no gold file (use --gold or config key 'eval')");
  const auto gold = parse_olid(gold_path, cfg.task);

  EvalReport report = [&] {
    if (!args.baseline.empty()) return constant_baseline(gold, args.baseline);
    const std::filesystem::path pred_path =
        args.predictions.empty() ? cfg.predictions : std::filesystem::path(args.predictions);
    if (pred_path.empty()) throw Error("no predictions file (use --predictions or config key 'predictions')");
    return evaluate(gold, to_prediction_map(read_predictions(pred_path)));
  }();
  if (!args.permute.empty()) {
    report = report_from_confusion(permute_labels(report.confusion, parse_label_mapping(args.permute)));
  }
  emit_report(report, args.format, args.report, out);
  return 0;
}

int cmd_select(const ConfigOptions& opts, const std::string& output, std::ostream& out) {
  auto cfg = opts.run_config();
  cfg.validate(false);
  if (cfg.train.empty()) throw Error("config key 'train' is required");
  const auto ranked = rank_candidates(load_training(cfg), cfg, cfg.resolved_threads());
  const auto write = [&](std::ostream& os) {
    os << "rank\tngram\tgain\tdf\n";
    const auto n = std::min(ranked.size(), static_cast<std::size_t>(cfg.k));
    for (std::size_t i = 0; i < n; ++i) {
      char gain[32];
      const auto r = std::to_chars(gain, gain + sizeof gain, ranked[i].gain);
      os << i + 1 << '\t' << ranked[i].feature << '\t' << std::string_view(gain, r.ptr) << '\t'
         << ranked[i].document_frequency << '\n';
    }
  };
  if (output.empty()) {
    write(out);
  } else {
    auto file = open_output(output);
    write(file);
  }
  return 0;
}

int cmd_baseline(const ConfigOptions& opts, const EvaluateArgs& args, std::ostream& out) {
  auto cfg = opts.run_config();
  if (!args.task.empty()) cfg.task = parse_task(args.task);
  const std::filesystem::path gold_path = args.gold.empty() ? cfg.eval : std::filesystem::path(args.gold);
  if (gold_path.empty()) throw Error("no gold file (use --gold or config key 'eval')");
  const auto gold = parse_olid(gold_path, cfg.task);
  if (!args.baseline.empty()) {
    emit_report(constant_baseline(gold, args.baseline), args.format, args.report, out);
    return 0;
  }
  for (auto label : task_classes(cfg.task)) {
    const auto r = constant_baseline(gold, label);
    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << "baseline " << label << " macro_f1 " << r.macro_f1
         << " accuracy " << r.accuracy << '\n';
    out << line.str();
  }
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offensive-language classification toolkit: character n-gram SVM and evaluation", "offlang"};
  app.require_subcommand(1);

  ConfigOptions train_opts, predict_opts, eval_opts, select_opts, baseline_opts;
  std::string input, output, select_output;
  EvaluateArgs eval_args, baseline_args;

  auto* train = app.add_subcommand("train", "select features and train the SVM; writes model and space files");
  train_opts.attach(*train);

  auto* predict = app.add_subcommand("predict", "write id,label predictions for an OLID TSV file");
  predict_opts.attach(*predict);
  predict->add_option("--input", input, "OLID TSV to classify (default: config key 'eval')");
  predict->add_option("--output", output, "prediction CSV (default: config key 'predictions')");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a prediction file against gold labels");
  evaluate_cmd->add_option("--gold", eval_args.gold, "gold OLID TSV (default: config key 'eval')");
  evaluate_cmd->add_option("--predictions", eval_args.predictions, "prediction CSV");
  evaluate_cmd->add_option("--task", eval_args.task, "A, B or C");
  evaluate_cmd->add_option("--baseline", eval_args.baseline, "score the constant prediction LABEL instead");
  evaluate_cmd->add_option("--permute", eval_args.permute, "relabel predictions, e.g. OFF=NOT,NOT=OFF");
  evaluate_cmd->add_option("--format", eval_args.format, "kv (default) or text");
  evaluate_cmd->add_option("--report", eval_args.report, "also write the key-value report to this file");
  eval_opts.attach(*evaluate_cmd);

  auto* select = app.add_subcommand("select", "emit the information-gain ranked n-gram list (top k)");
  select_opts.attach(*select);
  select->add_option("--output", select_output, "TSV destination (default: stdout)");

  auto* baseline = app.add_subcommand("baseline", "score constant-prediction baselines");
  baseline->add_option("--gold", baseline_args.gold, "gold OLID TSV (default: config key 'eval')");
  baseline->add_option("--task", baseline_args.task, "A, B or C");
  baseline->add_option("--label", baseline_args.baseline, "single class to report in full");
  baseline->add_option("--format", baseline_args.format, "kv (default) or text");
  baseline->add_option("--report", baseline_args.report, "also write the key-value report to this file");
  baseline_opts.attach(*baseline);

  std::vector<std::string> argv_storage{"offlang"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (train->parsed()) return cmd_train(train_opts, out);
    if (predict->parsed()) return cmd_predict(predict_opts, input, output, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(eval_opts, eval_args, out);
    if (select->parsed()) return cmd_select(select_opts, select_output, out);
    if (baseline->parsed()) return cmd_baseline(baseline_opts, baseline_args, out);
  } catch (const std::exception& e) {
    err << "offlang: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace offlang::cli
