#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simulseg/harness.h"

using namespace simulseg;

namespace {

struct ExtractArgs {
  std::string trees;
  std::string out;
  std::string dev_out;
  double dev_fraction = 0.0;
  std::uint32_t seed = 1;
};

void cmd_extract(const ExtractArgs& args) {
  ParsedTreebank bank = parse_trees(read_text_file(args.trees));
  if (bank.trees.empty()) throw Error("no usable trees in " + args.trees);

  std::vector<std::vector<PrefixInstance>> per_tree;
  per_tree.reserve(bank.trees.size());
  for (std::size_t i = 0; i < bank.trees.size(); ++i)
    per_tree.push_back(extract_instances(bank.trees[i], std::to_string(i + 1)));

  auto gather = [&](const std::vector<std::size_t>& indices) {
    std::vector<PrefixInstance> out;
    for (std::size_t i : indices)
      out.insert(out.end(), per_tree[i].begin(), per_tree[i].end());
    return out;
  };

  if (args.dev_fraction > 0.0) {
    TreebankSplit split =
        split_treebank(bank.trees.size(), args.dev_fraction, args.seed);
    std::string dev_path = args.dev_out.empty() ? args.out + ".dev" : args.dev_out;
    std::vector<PrefixInstance> train = gather(split.train);
    std::vector<PrefixInstance> dev = gather(split.dev);
    write_text_file(args.out, instances_to_tsv(train));
    write_text_file(dev_path, instances_to_tsv(dev));
    std::cout << "trees: " << bank.trees.size() << " (skipped "
              << bank.skipped_empty << " empty)\n"
              << "train: " << split.train.size() << " trees, " << train.size()
              << " instances -> " << args.out << "\n"
              << "dev: " << split.dev.size() << " trees, " << dev.size()
              << " instances -> " << dev_path << "\n";
  } else {
    std::vector<PrefixInstance> all;
    for (const std::vector<PrefixInstance>& instances : per_tree)
      all.insert(all.end(), instances.begin(), instances.end());
    write_text_file(args.out, instances_to_tsv(all));
    std::cout << "trees: " << bank.trees.size() << " (skipped "
              << bank.skipped_empty << " empty)\n"
              << "instances: " << all.size() << " -> " << args.out << "\n";
  }
}

struct IclpArgs {
  std::string instances;
  std::string model;
  std::string out;
  std::size_t epochs = 10;
  std::uint32_t seed = 1;
  bool no_lookahead = false;
};

std::vector<PrefixInstance> load_instances(const IclpArgs& args) {
  std::vector<PrefixInstance> instances =
      instances_from_tsv(read_text_file(args.instances));
  if (args.no_lookahead) instances = strip_lookahead(instances);
  if (instances.empty()) throw Error("no instances in " + args.instances);
  return instances;
}

void cmd_iclp_train(const IclpArgs& args) {
  std::vector<PrefixInstance> instances = load_instances(args);
  TrainOptions options;
  options.epochs = args.epochs;
  options.seed = args.seed;
  IclpModel model = train_perceptron(instances, options);
  save_model(model, args.model);
  std::cout << "instances: " << instances.size() << "\n"
            << "labels: " << model.inventory.size() << "\n"
            << "epochs: " << options.epochs << " seed: " << options.seed << "\n"
            << "model -> " << args.model << "\n";
}

std::string eval_report_text(const EvalReport& report) {
  std::string out = "label\ttp\tfp\tfn\tprecision\trecall\tf1\n";
  for (const LabelScore& score : report.per_label) {
    out += score.label;
    out += '\t' + std::to_string(score.tp);
    out += '\t' + std::to_string(score.fp);
    out += '\t' + std::to_string(score.fn);
    out += '\t' + format_fixed(score.precision, 4);
    out += '\t' + format_fixed(score.recall, 4);
    out += '\t' + format_fixed(score.f1, 4);
    out += '\n';
  }
  out += "accuracy\t" + format_fixed(report.accuracy, 4) + "\t(" +
         std::to_string(report.correct) + "/" + std::to_string(report.total) +
         ")\n";
  return out;
}

void cmd_iclp_eval(const IclpArgs& args) {
  std::vector<PrefixInstance> instances = load_instances(args);
  IclpModel model = load_model(args.model);
  std::vector<PredictionRecord> records = predict_instances(model, instances);
  if (!args.out.empty()) write_text_file(args.out, predictions_to_tsv(records));
  std::cout << eval_report_text(evaluate(records));
}

void cmd_iclp_predict(const IclpArgs& args) {
  std::vector<PrefixInstance> instances = load_instances(args);
  IclpModel model = load_model(args.model);
  std::string tsv = predictions_to_tsv(predict_instances(model, instances));
  if (args.out.empty()) std::cout << tsv;
  else write_text_file(args.out, tsv);
}

struct SegmentArgs {
  std::string policy;
  std::string trees;
  std::string sentences;
  std::string labels = "S,VP";
  std::string unit = "word";
  std::string merges;
  std::string out;
  std::size_t min_len = 1;
  std::size_t f = 1;
  std::size_t k = 1;
};

void cmd_segment(const SegmentArgs& args) {
  if (args.trees.empty() == args.sentences.empty())
    throw ConfigError("segment needs exactly one of --trees / --sentences");

  std::vector<Sentence> corpus;
  if (!args.trees.empty()) {
    ParsedTreebank bank = parse_trees(read_text_file(args.trees));
    for (std::size_t i = 0; i < bank.trees.size(); ++i) {
      Sentence s;
      s.id = std::to_string(i + 1);
      s.words = bank.trees[i].words();
      for (std::size_t p = 1; p <= bank.trees[i].size(); ++p)
        s.labels.push_back(bank.trees[i].next_constituent_label(p));
      corpus.push_back(std::move(s));
    }
  } else {
    std::vector<std::string> lines =
        split_char(read_text_file(args.sentences), '\n');
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      std::vector<std::string> words = split_ws(lines[ln]);
      if (words.empty()) continue;
      Sentence s;
      s.id = std::to_string(ln + 1);
      s.words = std::move(words);
      corpus.push_back(std::move(s));
    }
  }

  MergeTable merges;
  if (args.policy == "fixed" && args.unit == "subword") {
    if (args.merges.empty())
      throw ConfigError("--unit subword requires --merges");
    merges = merges_from_text(read_text_file(args.merges));
  }
  std::vector<std::string> boundary_labels = split_char(args.labels, ',');

  std::string out;
  for (const Sentence& s : corpus) {
    Segmentation seg;
    if (args.policy == "rule") {
      if (s.labels.empty())
        throw ConfigError("the rule policy needs --trees input for labels");
      seg = segment_rule_based(s.labels, boundary_labels, args.min_len);
    } else if (args.policy == "fixed") {
      seg = args.unit == "subword"
                ? segment_fixed_subwords(s.words, args.f, merges)
                : segment_fixed(s.words.size(), args.f);
    } else if (args.policy == "waitk") {
      seg.source_len = s.words.size();
      for (std::size_t b = std::min(args.k, s.words.size());
           b <= s.words.size(); ++b)
        seg.boundaries.push_back(b);
    } else {
      throw ConfigError("unknown policy name: " + args.policy);
    }

    nlohmann::json j;
    j["sentence_id"] = s.id;
    j["boundaries"] = seg.boundaries;
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& [begin, end] : seg.chunks())
      chunks.push_back(nlohmann::json::array({begin, end}));
    j["chunks"] = std::move(chunks);
    out += j.dump();
    out += '\n';
  }

  if (args.out.empty()) std::cout << out;
  else write_text_file(args.out, out);
}

struct OverrideArgs {
  std::string trees;
  std::string sentences;
  std::string references;
  std::string merges;
  std::string output_dir;
  std::string policy;
  std::string unit;
  std::string labels;
  std::string translator;
  std::string dictionary;
  std::string command;
  std::string latency_unit;
  std::string bleu_unit;
  std::size_t k = 0;        // 0 = not given
  std::size_t f = 0;
  std::size_t min_len = 0;
  std::int64_t threads = -1;
  bool smooth = false;
};

std::string effective_policy_type(const nlohmann::json& j) {
  if (j.contains("policy") && j.at("policy").contains("type"))
    return j.at("policy").at("type").get<std::string>();
  return "waitk";
}

nlohmann::json default_policy_json(const std::string& type) {
  if (type == "waitk") return {{"type", "waitk"}, {"k", 1}};
  if (type == "fixed") return {{"type", "fixed"}, {"size", 1}, {"unit", "word"}};
  if (type == "rule")
    return {{"type", "rule"},
            {"boundary_labels", nlohmann::json::array({"S", "VP"})},
            {"min_len", 1}};
  throw ConfigError("unknown policy name: " + type);
}

void apply_overrides(nlohmann::json& j, const OverrideArgs& args) {
  if (!args.trees.empty()) j["input"] = {{"trees", args.trees}};
  if (!args.sentences.empty()) j["input"] = {{"sentences", args.sentences}};
  if (!args.references.empty()) j["references"] = args.references;
  if (!args.merges.empty()) j["subword_merges"] = args.merges;
  if (!args.output_dir.empty()) j["output_dir"] = args.output_dir;
  if (args.threads >= 0) j["threads"] = static_cast<std::size_t>(args.threads);

  if (!args.policy.empty() && effective_policy_type(j) != args.policy)
    j["policy"] = default_policy_json(args.policy);
  auto needs = [&](const char* flag, const std::string& type) {
    if (effective_policy_type(j) != type)
      throw ConfigError(std::string(flag) + " applies to the " + type +
                        " policy (use --policy " + type + ")");
    if (!j.contains("policy")) j["policy"] = default_policy_json(type);
  };
  if (args.k > 0) {
    needs("--k", "waitk");
    j["policy"]["k"] = args.k;
  }
  if (args.f > 0) {
    needs("--f", "fixed");
    j["policy"]["size"] = args.f;
  }
  if (!args.unit.empty()) {
    needs("--unit", "fixed");
    j["policy"]["unit"] = args.unit;
  }
  if (args.min_len > 0) {
    needs("--min-len", "rule");
    j["policy"]["min_len"] = args.min_len;
  }
  if (!args.labels.empty()) {
    needs("--labels", "rule");
    j["policy"]["boundary_labels"] = split_char(args.labels, ',');
  }

  if (!args.translator.empty()) j["translator"]["type"] = args.translator;
  if (!args.dictionary.empty()) j["translator"]["dictionary"] = args.dictionary;
  if (!args.command.empty()) j["translator"]["command"] = args.command;
  if (!args.latency_unit.empty()) j["metrics"]["latency_unit"] = args.latency_unit;
  if (!args.bleu_unit.empty()) j["metrics"]["bleu_unit"] = args.bleu_unit;
  if (args.smooth) j["metrics"]["smooth_bleu"] = true;
}

void add_override_flags(CLI::App* cmd, OverrideArgs& args) {
  cmd->add_option("--trees", args.trees, "Bracketed treebank input (overrides config)");
  cmd->add_option("--sentences", args.sentences, "Plain-text sentence input (overrides config)");
  cmd->add_option("--references", args.references, "Reference translations, one per sentence");
  cmd->add_option("--merges", args.merges, "Subword merge table");
  cmd->add_option("--output-dir", args.output_dir, "Directory for reports and logs");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = one per hardware thread)");
  cmd->add_option("--translator", args.translator, "Translator: echo, sov, or external");
  cmd->add_option("--dictionary", args.dictionary, "Gloss dictionary for the sov translator");
  cmd->add_option("--command", args.command, "Shell command for the external translator");
  cmd->add_option("--latency-unit", args.latency_unit, "Latency unit: word or character");
  cmd->add_option("--bleu-unit", args.bleu_unit, "BLEU unit: word or character");
  cmd->add_flag("--smooth-bleu", args.smooth, "Add-floor smoothing for zero n-gram counts");
}

struct PipelineArgs {
  std::string config_path;
  OverrideArgs overrides;
};

void cmd_pipeline(const PipelineArgs& args) {
  nlohmann::json j = load_config_file(args.config_path);
  apply_overrides(j, args.overrides);
  PipelineConfig config = pipeline_config_from_json(j);
  PipelineResult result = run_pipeline(config);
  if (!config.output_dir.empty()) write_pipeline_outputs(result, config);
  std::cout << pipeline_report_text(result, config);
}

struct SweepArgs {
  std::string config_path;
  std::string policy;
  std::string range;
  OverrideArgs overrides;
};

std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts = split_char(text, ':');
    if (parts.size() != 3)
      throw ConfigError("--range start:end:step needs three fields");
    std::size_t start = parse_size(parts[0]);
    std::size_t end = parse_size(parts[1]);
    std::size_t step = parse_size(parts[2]);
    if (step < 1 || start < 1 || end < start)
      throw ConfigError("--range needs 1 <= start <= end and step >= 1");
    for (std::size_t v = start; v <= end; v += step) values.push_back(v);
  } else {
    for (const std::string& part : split_char(text, ',')) {
      std::size_t v = parse_size(part);
      if (v < 1) throw ConfigError("--range values must be >= 1");
      values.push_back(v);
    }
  }
  if (values.empty()) throw ConfigError("--range is empty");
  return values;
}

void cmd_sweep(const SweepArgs& args) {
  if (args.policy.empty() != args.range.empty())
    throw ConfigError("--policy and --range go together");

  nlohmann::json j = load_config_file(args.config_path);
  apply_overrides(j, args.overrides);

  std::vector<SweepSpec> specs;
  if (!args.policy.empty()) {
    SweepSpec spec;
    spec.base = effective_policy_type(j) == args.policy && j.contains("policy")
                    ? policy_from_json(j.at("policy"))
                    : policy_from_json(default_policy_json(args.policy));
    spec.values = parse_range(args.range);
    specs.push_back(std::move(spec));
  } else {
    if (!j.contains("sweep"))
      throw ConfigError("config has no sweep section; pass --policy and --range");
    specs = sweep_specs_from_json(j.at("sweep"));
  }

  PipelineConfig base = pipeline_config_from_json(j);
  for (const SweepSpec& spec : specs) {
    if (std::holds_alternative<RuleBased>(spec.base) &&
        base.label_source == LabelSource::None) {
      if (base.trees_path.empty())
        throw ConfigError("sweeping the rule policy needs labels (trees input "
                          "or a labels section)");
      base.label_source = LabelSource::Oracle;
    }
    if (const FixedSize* fixed = std::get_if<FixedSize>(&spec.base)) {
      if (fixed->unit == SegmentUnit::Subword && base.merges_path.empty())
        throw ConfigError("sweeping fixed subword segments requires subword_merges");
    }
  }

  std::vector<Sentence> corpus = load_corpus(base);
  SweepResult result = run_sweep(corpus, base, specs);

  if (!base.output_dir.empty()) {
    std::filesystem::create_directories(base.output_dir);
    std::filesystem::path dir(base.output_dir);
    write_text_file((dir / "sweep.csv").string(), sweep_to_csv(result));
    write_text_file((dir / "sweep.svg").string(), sweep_to_svg(result));
    std::cout << "runs: " << result.runs << " (failed " << result.failed_runs
              << ")\n"
              << "sweep.csv, sweep.svg -> " << base.output_dir << "\n";
  } else {
    std::cout << sweep_to_csv(result);
  }
  if (result.runs > 0 && result.failed_runs == result.runs)
    throw Error("all sweep runs failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chunk segmentation and evaluation tools for simultaneous translation"};
  app.require_subcommand(1);

  ExtractArgs extract_args;
  CLI::App* treebank = app.add_subcommand("treebank", "Treebank utilities");
  treebank->require_subcommand(1);
  CLI::App* extract = treebank->add_subcommand(
      "extract", "Extract prefix-label instances from bracketed trees");
  extract->add_option("--trees", extract_args.trees, "Bracketed treebank file")
      ->required();
  extract->add_option("--out", extract_args.out, "Output instance TSV")->required();
  extract->add_option("--dev-out", extract_args.dev_out,
                      "Dev instance TSV (default: <out>.dev)");
  extract->add_option("--dev-fraction", extract_args.dev_fraction,
                      "Fraction of trees held out for dev");
  extract->add_option("--seed", extract_args.seed, "Split shuffle seed");
  extract->callback([&] { cmd_extract(extract_args); });

  IclpArgs iclp_args;
  CLI::App* iclp = app.add_subcommand("iclp", "Incremental constituent label prediction");
  iclp->require_subcommand(1);
  CLI::App* train = iclp->add_subcommand("train", "Train the averaged perceptron");
  CLI::App* eval = iclp->add_subcommand("eval", "Score predictions against gold labels");
  CLI::App* predict = iclp->add_subcommand("predict", "Write predictions as TSV");
  for (CLI::App* sub : {train, eval, predict}) {
    sub->add_option("--instances", iclp_args.instances, "Instance TSV")->required();
    sub->add_option("--model", iclp_args.model, "Model file")->required();
    sub->add_flag("--no-lookahead", iclp_args.no_lookahead,
                  "Drop the newest word from each prefix");
  }
  train->add_option("--epochs", iclp_args.epochs, "Training epochs");
  train->add_option("--seed", iclp_args.seed, "Shuffle seed");
  eval->add_option("--out", iclp_args.out, "Also write predictions TSV here");
  predict->add_option("--out", iclp_args.out, "Output TSV (default: stdout)");
  train->callback([&] { cmd_iclp_train(iclp_args); });
  eval->callback([&] { cmd_iclp_eval(iclp_args); });
  predict->callback([&] { cmd_iclp_predict(iclp_args); });

  SegmentArgs segment_args;
  CLI::App* segment =
      app.add_subcommand("segment", "Segment sentences and print chunk JSONL");
  segment->add_option("--policy", segment_args.policy, "rule, fixed, or waitk")
      ->required();
  segment->add_option("--trees", segment_args.trees, "Bracketed treebank input");
  segment->add_option("--sentences", segment_args.sentences, "Plain-text input");
  segment->add_option("--labels", segment_args.labels,
                      "Boundary labels for the rule policy (comma-separated)");
  segment->add_option("--min-len", segment_args.min_len, "Minimum chunk length");
  segment->add_option("--f", segment_args.f, "Fixed segment size");
  segment->add_option("--unit", segment_args.unit, "Fixed-size unit: word or subword");
  segment->add_option("--merges", segment_args.merges, "Subword merge table");
  segment->add_option("--k", segment_args.k, "Wait-k offset");
  segment->add_option("--out", segment_args.out, "Output JSONL (default: stdout)");
  segment->callback([&] { cmd_segment(segment_args); });

  PipelineArgs pipeline_args;
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "Run one end-to-end evaluation");
  pipeline->add_option("--config", pipeline_args.config_path, "JSON config file")
      ->required();
  add_override_flags(pipeline, pipeline_args.overrides);
  OverrideArgs& po = pipeline_args.overrides;
  pipeline->add_option("--policy", po.policy, "Policy: waitk, fixed, or rule");
  pipeline->add_option("--k", po.k, "Wait-k offset");
  pipeline->add_option("--f", po.f, "Fixed segment size");
  pipeline->add_option("--unit", po.unit, "Fixed-size unit: word or subword");
  pipeline->add_option("--min-len", po.min_len, "Minimum chunk length");
  pipeline->add_option("--labels", po.labels, "Boundary labels (comma-separated)");
  pipeline->callback([&] { cmd_pipeline(pipeline_args); });

  SweepArgs sweep_args;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a hyperparameter sweep and write the curve");
  sweep->add_option("--config", sweep_args.config_path, "JSON config file")
      ->required();
  sweep->add_option("--policy", sweep_args.policy,
                    "Sweep this policy instead of the config's sweep section");
  sweep->add_option("--range", sweep_args.range,
                    "Values: comma list (2,4,6) or start:end:step (2:30:2)");
  add_override_flags(sweep, sweep_args.overrides);
  sweep->callback([&] { cmd_sweep(sweep_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
