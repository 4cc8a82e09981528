#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "simulseg/iclp.h"
#include "simulseg/metrics.h"
#include "simulseg/segmenter.h"
#include "simulseg/simulator.h"
#include "simulseg/subword.h"
#include "simulseg/translator.h"
#include "simulseg/treebank.h"

namespace simulseg {

struct ConfigError : Error {
  using Error::Error;
};

struct Sentence {
  std::string id;
  std::vector<std::string> words;
  std::vector<std::string> labels;     // empty when the policy needs none
  std::vector<std::string> reference;  // empty -> full translation is used
};

enum class LabelSource { None, Oracle, Model, File };
enum class TranslatorKind { Echo, Sov, External };

struct MetricOptions {
  LatencyUnit latency_unit = LatencyUnit::Word;
  TextUnit bleu_unit = TextUnit::Word;
  bool smooth_bleu = false;
};

struct PipelineConfig {
  std::string trees_path;
  std::string sentences_path;
  LabelSource label_source = LabelSource::None;
  std::string model_path;
  std::string predictions_path;
  PolicyConfig policy = WaitK{1};
  TranslatorKind translator = TranslatorKind::Echo;
  std::string dictionary_path;
  std::string external_command;
  std::string references_path;
  std::string merges_path;
  MetricOptions metrics;
  std::string output_dir;
  std::size_t threads = 0;  // 0 = one per hardware thread
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json load_config_file(const std::string& path);

// Corpus loading per the config's input/labels/references settings.
std::vector<Sentence> load_corpus(const PipelineConfig& config);

std::unique_ptr<Translator> make_translator(const PipelineConfig& config);

struct PipelineResult {
  std::vector<SessionLog> logs;
  std::vector<std::vector<std::string>> references;  // aligned with logs
  QualityReport quality;
  LatencyReport latency;
  double len_ratio = 0.0;
  std::map<std::size_t, std::size_t> histogram;
  std::size_t sentences = 0;
  std::size_t failures = 0;
  std::size_t total_chunks = 0;
};

// Runs one session per sentence (work is spread over threads; the merge
// order is by sentence index, so results are reproducible) and scores the
// surviving sessions.
PipelineResult run_pipeline_on(const std::vector<Sentence>& corpus,
                               const PipelineConfig& config);
PipelineResult run_pipeline(const PipelineConfig& config);

std::string pipeline_report_text(const PipelineResult& result,
                                 const PipelineConfig& config);
std::string pipeline_report_csv(const PipelineResult& result,
                                const PipelineConfig& config);
void write_pipeline_outputs(const PipelineResult& result,
                            const PipelineConfig& config);

struct SweepSpec {
  PolicyConfig base = WaitK{1};
  std::vector<std::size_t> values;
};

struct SweepRow {
  std::string policy;
  std::size_t value = 0;
  double bleu = 0.0;
  double al = 0.0;
  double len_ratio = 0.0;
  std::size_t sentences = 0;
  std::size_t failures = 0;
  std::size_t chunks = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by AL
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
};

std::vector<SweepSpec> sweep_specs_from_json(const nlohmann::json& j);

// One pipeline run per (spec, value). A run that cannot be scored at all
// still gets a row (every sentence marked failed, metrics zero) and bumps
// failed_runs; one bad setting never sinks the rest of the sweep.
SweepResult run_sweep(const std::vector<Sentence>& corpus,
                      const PipelineConfig& base_config,
                      const std::vector<SweepSpec>& specs);

std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_svg(const SweepResult& result);

// Applies a sweep value to the policy's hyperparameter (k, size, or min_len).
PolicyConfig policy_with_value(const PolicyConfig& base, std::size_t value);

}  // namespace simulseg
