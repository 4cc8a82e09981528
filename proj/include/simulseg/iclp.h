#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "simulseg/treebank.h"
#include "simulseg/util.h"

namespace simulseg {

// Incremental constituent-label prediction: classify, from a growing word
// prefix, the label of the constituent starting at the newest word.

struct LabelInventory {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t add(const std::string& label);
  std::optional<std::size_t> find(const std::string& label) const;
  std::size_t size() const { return labels.size(); }

  bool operator==(const LabelInventory& other) const {
    return labels == other.labels;
  }
};

struct FeatureSpec {
  std::vector<std::string> templates;

  static FeatureSpec all();
  bool has(const std::string& name) const;

  bool operator==(const FeatureSpec&) const = default;
};

// Sparse features over the prefix: last 1/2/3 words, byte suffixes of the
// last word (lengths 2..4), a prefix-length bucket, and a bias.
std::vector<std::string> extract_features(const FeatureSpec& spec,
                                          const std::vector<std::string>& prefix);

struct TrainOptions {
  std::size_t epochs = 10;
  std::uint32_t seed = 1;
};

struct IclpModel {
  LabelInventory inventory;
  FeatureSpec features;
  TrainOptions meta;
  // weights[label_id][feature] -> averaged weight
  std::vector<std::unordered_map<std::string, double>> weights;

  double score(std::size_t label_id, const std::vector<std::string>& feats) const;
  // Highest score wins; exact ties go to the lowest label id.
  std::string predict(const std::vector<std::string>& prefix) const;
};

// Averaged multiclass perceptron; the label inventory is built from the
// instances in first-seen order, and epoch order is shuffled from the seed.
IclpModel train_perceptron(const std::vector<PrefixInstance>& instances,
                           const TrainOptions& options,
                           const FeatureSpec& spec = FeatureSpec::all());

std::string model_to_text(const IclpModel& model);
IclpModel model_from_text(const std::string& text);
void save_model(const IclpModel& model, const std::string& path);
IclpModel load_model(const std::string& path);

// Drops the newest word from each prefix so the label must be predicted
// before its first word is read; position-1 instances vanish.
std::vector<PrefixInstance> strip_lookahead(const std::vector<PrefixInstance>& instances);

struct PredictionRecord {
  std::string sentence_id;
  std::size_t position = 0;
  std::string predicted;
  std::string gold;     // empty when absent
  bool has_gold = false;

  bool operator==(const PredictionRecord&) const = default;
};

struct LabelScore {
  std::string label;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct EvalReport {
  std::vector<LabelScore> per_label;  // sorted by label
  double accuracy = 0.0;
  std::size_t total = 0;
  std::size_t correct = 0;
};

EvalReport evaluate(const std::vector<PredictionRecord>& records);

// Tab-separated: sentence_id, position, predicted label, optional gold.
std::string predictions_to_tsv(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> predictions_from_tsv(const std::string& text);

std::vector<PredictionRecord> predict_instances(
    const IclpModel& model, const std::vector<PrefixInstance>& instances);

}  // namespace simulseg
