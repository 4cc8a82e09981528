#include "simulseg/harness.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <thread>

namespace simulseg {

namespace {

LatencyUnit latency_unit_from_string(const std::string& name) {
  if (name == "word") return LatencyUnit::Word;
  if (name == "character") return LatencyUnit::Character;
  throw ConfigError("unknown latency unit: " + name);
}

TextUnit text_unit_from_string(const std::string& name) {
  if (name == "word") return TextUnit::Word;
  if (name == "character") return TextUnit::Character;
  throw ConfigError("unknown text unit: " + name);
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  int schema = j.value("schema_version", 1);
  if (schema != 1)
    throw ConfigError("unsupported schema_version " + std::to_string(schema));

  PipelineConfig config;
  if (j.contains("input")) {
    const nlohmann::json& input = j.at("input");
    if (input.contains("trees")) config.trees_path = input.at("trees").get<std::string>();
    if (input.contains("sentences"))
      config.sentences_path = input.at("sentences").get<std::string>();
  }
  if (config.trees_path.empty() == config.sentences_path.empty())
    throw ConfigError("config needs exactly one of input.trees / input.sentences");

  if (j.contains("labels")) {
    const nlohmann::json& labels = j.at("labels");
    std::string source = labels.value("source", "oracle");
    if (source == "oracle") config.label_source = LabelSource::Oracle;
    else if (source == "model") config.label_source = LabelSource::Model;
    else if (source == "file") config.label_source = LabelSource::File;
    else throw ConfigError("unknown label source: " + source);
    config.model_path = labels.value("model", std::string());
    config.predictions_path = labels.value("file", std::string());
  }

  if (j.contains("policy")) {
    try {
      config.policy = policy_from_json(j.at("policy"));
    } catch (const Error& e) {
      throw ConfigError(std::string("bad policy: ") + e.what());
    }
  }

  if (j.contains("translator")) {
    const nlohmann::json& tr = j.at("translator");
    std::string type = tr.value("type", "echo");
    if (type == "echo") config.translator = TranslatorKind::Echo;
    else if (type == "sov") config.translator = TranslatorKind::Sov;
    else if (type == "external") config.translator = TranslatorKind::External;
    else throw ConfigError("unknown translator type: " + type);
    config.dictionary_path = tr.value("dictionary", std::string());
    config.external_command = tr.value("command", std::string());
  }

  config.references_path = j.value("references", std::string());
  config.merges_path = j.value("subword_merges", std::string());

  if (j.contains("metrics")) {
    const nlohmann::json& m = j.at("metrics");
    config.metrics.latency_unit =
        latency_unit_from_string(m.value("latency_unit", "word"));
    config.metrics.bleu_unit = text_unit_from_string(m.value("bleu_unit", "word"));
    config.metrics.smooth_bleu = m.value("smooth_bleu", false);
  }

  config.output_dir = j.value("output_dir", std::string());
  config.threads = j.value("threads", std::size_t{0});

  if (config.label_source == LabelSource::Model && config.model_path.empty())
    throw ConfigError("labels.source=model requires labels.model");
  if (config.label_source == LabelSource::File && config.predictions_path.empty())
    throw ConfigError("labels.source=file requires labels.file");
  if (std::holds_alternative<RuleBased>(config.policy)) {
    if (config.label_source == LabelSource::None && config.trees_path.empty())
      throw ConfigError("the rule policy needs labels (trees input or a labels section)");
    if (config.label_source == LabelSource::None)
      config.label_source = LabelSource::Oracle;
    if (config.label_source == LabelSource::Oracle && config.trees_path.empty())
      throw ConfigError("oracle labels require input.trees");
  }
  if (const FixedSize* fixed = std::get_if<FixedSize>(&config.policy)) {
    if (fixed->unit == SegmentUnit::Subword && config.merges_path.empty())
      throw ConfigError("fixed subword segmentation requires subword_merges");
  }
  if (config.translator == TranslatorKind::Sov && config.dictionary_path.empty())
    throw ConfigError("the sov translator requires translator.dictionary");
  if (config.translator == TranslatorKind::External && config.external_command.empty())
    throw ConfigError("the external translator requires translator.command");
  return config;
}

std::vector<Sentence> load_corpus(const PipelineConfig& config) {
  std::vector<Sentence> corpus;

  std::vector<ParseTree> trees;
  if (!config.trees_path.empty()) {
    ParsedTreebank bank = parse_trees(read_text_file(config.trees_path));
    trees = std::move(bank.trees);
    for (std::size_t i = 0; i < trees.size(); ++i) {
      Sentence s;
      s.id = std::to_string(i + 1);
      s.words = trees[i].words();
      corpus.push_back(std::move(s));
    }
  } else {
    std::vector<std::string> lines = split_char(read_text_file(config.sentences_path), '\n');
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      std::vector<std::string> words = split_ws(lines[ln]);
      if (words.empty()) continue;
      Sentence s;
      s.id = std::to_string(ln + 1);
      s.words = std::move(words);
      corpus.push_back(std::move(s));
    }
  }

  switch (config.label_source) {
    case LabelSource::None:
      break;
    case LabelSource::Oracle: {
      if (trees.empty() && !corpus.empty())
        throw ConfigError("oracle labels require input.trees");
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t p = 1; p <= trees[i].size(); ++p)
          corpus[i].labels.push_back(trees[i].next_constituent_label(p));
      }
      break;
    }
    case LabelSource::Model: {
      IclpModel model = load_model(config.model_path);
      for (Sentence& s : corpus) {
        std::vector<std::string> prefix;
        for (const std::string& word : s.words) {
          prefix.push_back(word);
          s.labels.push_back(model.predict(prefix));
        }
      }
      break;
    }
    case LabelSource::File: {
      std::vector<PredictionRecord> records =
          predictions_from_tsv(read_text_file(config.predictions_path));
      std::map<std::string, std::map<std::size_t, std::string>> by_sentence;
      for (const PredictionRecord& rec : records)
        by_sentence[rec.sentence_id][rec.position] = rec.predicted;
      for (Sentence& s : corpus) {
        auto it = by_sentence.find(s.id);
        if (it == by_sentence.end()) continue;  // leaves labels empty; session fails
        bool complete = true;
        for (std::size_t p = 1; p <= s.words.size(); ++p) {
          if (!it->second.count(p)) {
            complete = false;
            break;
          }
        }
        if (!complete) continue;
        for (std::size_t p = 1; p <= s.words.size(); ++p)
          s.labels.push_back(it->second.at(p));
      }
      break;
    }
  }

  if (!config.references_path.empty()) {
    std::vector<std::string> lines =
        split_char(read_text_file(config.references_path), '\n');
    std::vector<std::vector<std::string>> refs;
    for (const std::string& line : lines) {
      std::vector<std::string> tokens = split_ws(line);
      if (!tokens.empty()) refs.push_back(std::move(tokens));
    }
    if (refs.size() != corpus.size())
      throw ConfigError("reference count (" + std::to_string(refs.size()) +
                        ") does not match corpus size (" +
                        std::to_string(corpus.size()) + ")");
    for (std::size_t i = 0; i < corpus.size(); ++i)
      corpus[i].reference = std::move(refs[i]);
  }
  return corpus;
}

std::unique_ptr<Translator> make_translator(const PipelineConfig& config) {
  switch (config.translator) {
    case TranslatorKind::Echo:
      return std::make_unique<EchoTranslator>();
    case TranslatorKind::Sov:
      return std::make_unique<SovToyTranslator>(
          GlossDictionary::from_tsv_file(config.dictionary_path));
    case TranslatorKind::External:
      return std::make_unique<ExternalProcessTranslator>(config.external_command);
  }
  throw ConfigError("bad translator kind");
}

namespace {

struct SessionOutcome {
  SessionLog log;
  std::vector<std::string> reference;
};

SessionOutcome simulate_one(const Sentence& sentence, const PipelineConfig& config,
                            Translator& translator, const MergeTable* merges) {
  SessionOutcome outcome;
  try {
    if (const WaitK* waitk = std::get_if<WaitK>(&config.policy)) {
      outcome.log =
          run_waitk_session(sentence.id, sentence.words, waitk->k, translator);
    } else if (const FixedSize* fixed = std::get_if<FixedSize>(&config.policy)) {
      if (fixed->unit == SegmentUnit::Word) {
        outcome.log = run_fixed_session(sentence.id, sentence.words, *fixed, translator);
      } else {
        Segmentation seg =
            segment_fixed_subwords(sentence.words, fixed->size, *merges);
        outcome.log = run_chunk_session(sentence.id, sentence.words, seg,
                                        /*lookahead_delay=*/false,
                                        PolicyConfig{*fixed}, translator);
      }
    } else {
      const RuleBased& rule = std::get<RuleBased>(config.policy);
      if (sentence.labels.size() != sentence.words.size())
        throw Error("no complete label sequence for sentence " + sentence.id);
      outcome.log = run_rule_session(sentence.id, sentence.words, sentence.labels,
                                     rule, translator);
    }
  } catch (const Error& e) {
    outcome.log.sentence_id = sentence.id;
    outcome.log.source = sentence.words;
    outcome.log.policy = config.policy;
    outcome.log.failed = true;
    outcome.log.error = e.what();
  }

  if (!sentence.reference.empty()) {
    outcome.reference = sentence.reference;
  } else if (!outcome.log.failed) {
    try {
      outcome.reference = translator.translate(sentence.words, {});
    } catch (const TranslatorError& e) {
      outcome.log.failed = true;
      outcome.log.error = std::string("reference translation failed: ") + e.what();
    }
  }
  return outcome;
}

}  // namespace

PipelineResult run_pipeline_on(const std::vector<Sentence>& corpus,
                               const PipelineConfig& config) {
  if (corpus.empty()) throw Error("corpus is empty");

  std::unique_ptr<Translator> translator = make_translator(config);
  MergeTable merges;
  const MergeTable* merges_ptr = nullptr;
  if (const FixedSize* fixed = std::get_if<FixedSize>(&config.policy)) {
    if (fixed->unit == SegmentUnit::Subword) {
      merges = merges_from_text(read_text_file(config.merges_path));
      merges_ptr = &merges;
    }
  }

  std::vector<SessionOutcome> outcomes(corpus.size());
  std::size_t n_threads = config.threads == 0
                              ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                              : config.threads;
  n_threads = std::min(n_threads, corpus.size());

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      outcomes[i] = simulate_one(corpus[i], config, *translator, merges_ptr);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          std::size_t i = cursor.fetch_add(1);
          if (i >= corpus.size()) break;
          outcomes[i] = simulate_one(corpus[i], config, *translator, merges_ptr);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  PipelineResult result;
  result.sentences = corpus.size();
  std::vector<std::vector<std::string>> hyps;
  std::vector<std::vector<std::string>> refs;
  for (SessionOutcome& outcome : outcomes) {
    if (outcome.log.failed) {
      ++result.failures;
    } else {
      hyps.push_back(outcome.log.target);
      refs.push_back(outcome.reference);
      result.total_chunks += outcome.log.chunks.size();
    }
    result.references.push_back(std::move(outcome.reference));
    result.logs.push_back(std::move(outcome.log));
  }
  if (hyps.empty()) throw Error("all sessions failed");

  result.quality = corpus_bleu(hyps, refs, 4, config.metrics.bleu_unit,
                               config.metrics.smooth_bleu);
  result.latency = latency_report(result.logs, config.metrics.latency_unit);
  result.len_ratio = length_ratio(hyps, refs, config.metrics.bleu_unit);
  result.histogram = segment_length_distribution(result.logs, merges_ptr);
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  return run_pipeline_on(load_corpus(config), config);
}

std::string pipeline_report_text(const PipelineResult& result,
                                 const PipelineConfig& config) {
  std::string out;
  out += "sentences: " + std::to_string(result.sentences) + "\n";
  out += "failed sessions: " + std::to_string(result.failures) + "\n";
  out += "policy: " + policy_to_json(config.policy).dump() + "\n";
  out += "BLEU: " + format_fixed(result.quality.bleu, 4) + "\n";
  out += "ngram precisions:";
  for (double p : result.quality.precisions) out += " " + format_fixed(p, 6);
  out += "\n";
  out += "brevity penalty: " + format_fixed(result.quality.brevity_penalty, 6) + "\n";
  out += "length ratio: " + format_fixed(result.len_ratio, 6) + "\n";
  out += std::string("average lagging (") +
         (result.latency.unit == LatencyUnit::Word ? "word" : "character") +
         "): " + format_fixed(result.latency.mean_al, 6) + "\n";
  out += "latency-scored sentences: " + std::to_string(result.latency.scored) +
         " (excluded " + std::to_string(result.latency.excluded) + ")\n";
  return out;
}

std::string pipeline_report_csv(const PipelineResult& result,
                                const PipelineConfig& config) {
  std::string out =
      "policy,bleu,p1,p2,p3,p4,brevity_penalty,length_ratio,al,al_unit,"
      "sentences,failures\n";
  out += policy_name(config.policy);
  out += ',' + format_fixed(result.quality.bleu, 4);
  for (double p : result.quality.precisions) out += ',' + format_fixed(p, 6);
  out += ',' + format_fixed(result.quality.brevity_penalty, 6);
  out += ',' + format_fixed(result.len_ratio, 6);
  out += ',' + format_fixed(result.latency.mean_al, 6);
  out += result.latency.unit == LatencyUnit::Word ? ",word" : ",character";
  out += ',' + std::to_string(result.sentences);
  out += ',' + std::to_string(result.failures);
  out += '\n';
  return out;
}

void write_pipeline_outputs(const PipelineResult& result,
                            const PipelineConfig& config) {
  if (config.output_dir.empty()) throw ConfigError("output_dir is not set");
  std::filesystem::create_directories(config.output_dir);
  std::filesystem::path dir(config.output_dir);
  write_text_file((dir / "sessions.jsonl").string(), sessions_to_jsonl(result.logs));
  write_text_file((dir / "report.txt").string(),
                  pipeline_report_text(result, config));
  write_text_file((dir / "report.csv").string(),
                  pipeline_report_csv(result, config));
  write_text_file((dir / "segment_lengths.csv").string(),
                  histogram_to_csv(result.histogram));
}

PolicyConfig policy_with_value(const PolicyConfig& base, std::size_t value) {
  PolicyConfig policy = base;
  if (WaitK* waitk = std::get_if<WaitK>(&policy)) {
    waitk->k = value;
  } else if (FixedSize* fixed = std::get_if<FixedSize>(&policy)) {
    fixed->size = value;
  } else {
    std::get<RuleBased>(policy).min_len = value;
  }
  return policy;
}

std::vector<SweepSpec> sweep_specs_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("sweep must be a non-empty array");
  std::vector<SweepSpec> specs;
  for (const nlohmann::json& entry : j) {
    SweepSpec spec;
    try {
      spec.base = policy_from_json(entry.at("policy"));
    } catch (const Error& e) {
      throw ConfigError(std::string("bad sweep policy: ") + e.what());
    }
    if (!entry.contains("values") || !entry.at("values").is_array() ||
        entry.at("values").empty())
      throw ConfigError("sweep entry needs a non-empty values array");
    for (const nlohmann::json& v : entry.at("values")) {
      std::size_t value = v.get<std::size_t>();
      if (value < 1) throw ConfigError("sweep values must be >= 1");
      spec.values.push_back(value);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

SweepResult run_sweep(const std::vector<Sentence>& corpus,
                      const PipelineConfig& base_config,
                      const std::vector<SweepSpec>& specs) {
  SweepResult result;
  for (const SweepSpec& spec : specs) {
    for (std::size_t value : spec.values) {
      ++result.runs;
      PipelineConfig config = base_config;
      config.policy = policy_with_value(spec.base, value);
      SweepRow row;
      row.policy = policy_name(config.policy);
      row.value = value;
      row.sentences = corpus.size();
      try {
        PipelineResult run = run_pipeline_on(corpus, config);
        row.bleu = run.quality.bleu;
        row.al = run.latency.mean_al;
        row.len_ratio = run.len_ratio;
        row.failures = run.failures;
        row.chunks = run.total_chunks;
        if (!base_config.output_dir.empty()) {
          std::filesystem::path dir =
              std::filesystem::path(base_config.output_dir) / "runs";
          std::filesystem::create_directories(dir);
          std::string stem = row.policy + "-" + std::to_string(value);
          write_text_file((dir / (stem + ".sessions.jsonl")).string(),
                          sessions_to_jsonl(run.logs));
          write_text_file((dir / (stem + ".report.txt")).string(),
                          pipeline_report_text(run, config));
        }
      } catch (const Error&) {
        row.failures = corpus.size();
        ++result.failed_runs;
      }
      result.rows.push_back(row);
    }
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.al != b.al) return a.al < b.al;
              if (a.policy != b.policy) return a.policy < b.policy;
              return a.value < b.value;
            });
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "policy,value,bleu,al,length_ratio,sentences,failures,chunks\n";
  for (const SweepRow& row : result.rows) {
    out += row.policy;
    out += ',' + std::to_string(row.value);
    out += ',' + format_fixed(row.bleu, 4);
    out += ',' + format_fixed(row.al, 6);
    out += ',' + format_fixed(row.len_ratio, 6);
    out += ',' + std::to_string(row.sentences);
    out += ',' + std::to_string(row.failures);
    out += ',' + std::to_string(row.chunks);
    out += '\n';
  }
  return out;
}

std::string sweep_to_svg(const SweepResult& result) {
  const double width = 640, height = 480;
  const double left = 60, right = 20, top = 20, bottom = 50;

  double min_al = 0.0, max_al = 1.0, min_bleu = 0.0, max_bleu = 100.0;
  if (!result.rows.empty()) {
    min_al = max_al = result.rows.front().al;
    for (const SweepRow& row : result.rows) {
      min_al = std::min(min_al, row.al);
      max_al = std::max(max_al, row.al);
    }
    if (max_al - min_al < 1e-9) {
      min_al -= 0.5;
      max_al += 0.5;
    }
  }

  auto x_of = [&](double al) {
    return left + (al - min_al) / (max_al - min_al) * (width - left - right);
  };
  auto y_of = [&](double bleu) {
    return height - bottom -
           (bleu - min_bleu) / (max_bleu - min_bleu) * (height - top - bottom);
  };

  const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#9467bd", "#ff7f0e"};
  std::vector<std::string> seen_policies;
  auto color_of = [&](const std::string& policy) {
    for (std::size_t i = 0; i < seen_policies.size(); ++i) {
      if (seen_policies[i] == policy) return palette[i % palette.size()];
    }
    seen_policies.push_back(policy);
    return palette[(seen_policies.size() - 1) % palette.size()];
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                    "height=\"480\" viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + format_fixed(left, 1) + "\" y1=\"" +
         format_fixed(height - bottom, 1) + "\" x2=\"" +
         format_fixed(width - right, 1) + "\" y2=\"" +
         format_fixed(height - bottom, 1) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_fixed(left, 1) + "\" y1=\"" + format_fixed(top, 1) +
         "\" x2=\"" + format_fixed(left, 1) + "\" y2=\"" +
         format_fixed(height - bottom, 1) + "\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    double al = min_al + (max_al - min_al) * tick / 4.0;
    double bleu = min_bleu + (max_bleu - min_bleu) * tick / 4.0;
    svg += "<text x=\"" + format_fixed(x_of(al), 1) + "\" y=\"" +
           format_fixed(height - bottom + 18, 1) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + format_fixed(al, 2) +
           "</text>\n";
    svg += "<text x=\"" + format_fixed(left - 8, 1) + "\" y=\"" +
           format_fixed(y_of(bleu) + 4, 1) +
           "\" font-size=\"11\" text-anchor=\"end\">" + format_fixed(bleu, 0) +
           "</text>\n";
  }
  svg += "<text x=\"" + format_fixed((left + width - right) / 2, 1) + "\" y=\"" +
         format_fixed(height - 12, 1) +
         "\" font-size=\"13\" text-anchor=\"middle\">average lagging</text>\n";
  svg += "<text x=\"14\" y=\"" + format_fixed((top + height - bottom) / 2, 1) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         format_fixed((top + height - bottom) / 2, 1) + ")\">BLEU</text>\n";

  for (const SweepRow& row : result.rows) {
    svg += "<circle cx=\"" + format_fixed(x_of(row.al), 1) + "\" cy=\"" +
           format_fixed(y_of(row.bleu), 1) + "\" r=\"4\" fill=\"" +
           color_of(row.policy) + "\"><title>" + row.policy + " " +
           std::to_string(row.value) + "</title></circle>\n";
  }

  double legend_y = top + 10;
  for (std::size_t i = 0; i < seen_policies.size(); ++i) {
    svg += "<circle cx=\"" + format_fixed(width - right - 110, 1) + "\" cy=\"" +
           format_fixed(legend_y, 1) + "\" r=\"4\" fill=\"" +
           palette[i % palette.size()] + "\"/>\n";
    svg += "<text x=\"" + format_fixed(width - right - 100, 1) + "\" y=\"" +
           format_fixed(legend_y + 4, 1) + "\" font-size=\"12\">" +
           seen_policies[i] + "</text>\n";
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace simulseg
