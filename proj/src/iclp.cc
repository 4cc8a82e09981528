#include "simulseg/iclp.h"

#include <algorithm>
#include <map>

namespace simulseg {

std::size_t LabelInventory::add(const std::string& label) {
  auto it = index.find(label);
  if (it != index.end()) return it->second;
  std::size_t id = labels.size();
  labels.push_back(label);
  index.emplace(label, id);
  return id;
}

std::optional<std::size_t> LabelInventory::find(const std::string& label) const {
  auto it = index.find(label);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

FeatureSpec FeatureSpec::all() {
  return FeatureSpec{{"last1", "last2", "last3", "suffix2", "suffix3", "suffix4",
                      "lenbucket", "bias"}};
}

bool FeatureSpec::has(const std::string& name) const {
  return std::find(templates.begin(), templates.end(), name) != templates.end();
}

namespace {

std::string length_bucket(std::size_t n) {
  if (n <= 3) return std::to_string(n);
  if (n <= 6) return "4-6";
  if (n <= 10) return "7-10";
  return "11+";
}

// Suffix of the last `len` bytes, only for words strictly longer than it.
std::optional<std::string> byte_suffix(const std::string& word, std::size_t len) {
  if (word.size() <= len) return std::nullopt;
  return word.substr(word.size() - len);
}

}  // namespace

std::vector<std::string> extract_features(const FeatureSpec& spec,
                                          const std::vector<std::string>& prefix) {
  if (prefix.empty()) throw Error("cannot featurize an empty prefix");
  std::vector<std::string> feats;
  const std::string& last = prefix.back();
  auto at_back = [&](std::size_t back) -> const std::string& {
    static const std::string bos = "<s>";
    if (back >= prefix.size()) return bos;
    return prefix[prefix.size() - 1 - back];
  };

  if (spec.has("last1")) feats.push_back("w1=" + last);
  if (spec.has("last2")) feats.push_back("w2=" + at_back(1) + " " + last);
  if (spec.has("last3"))
    feats.push_back("w3=" + at_back(2) + " " + at_back(1) + " " + last);
  for (std::size_t len : {std::size_t{2}, std::size_t{3}, std::size_t{4}}) {
    if (!spec.has("suffix" + std::to_string(len))) continue;
    if (auto suf = byte_suffix(last, len)) {
      feats.push_back("s" + std::to_string(len) + "=" + *suf);
    }
  }
  if (spec.has("lenbucket")) feats.push_back("len=" + length_bucket(prefix.size()));
  if (spec.has("bias")) feats.push_back("bias");
  return feats;
}

double IclpModel::score(std::size_t label_id,
                        const std::vector<std::string>& feats) const {
  const auto& w = weights[label_id];
  double total = 0.0;
  for (const std::string& f : feats) {
    auto it = w.find(f);
    if (it != w.end()) total += it->second;
  }
  return total;
}

std::string IclpModel::predict(const std::vector<std::string>& prefix) const {
  if (inventory.size() == 0) throw Error("model has no labels");
  std::vector<std::string> feats = extract_features(features, prefix);
  std::size_t best = 0;
  double best_score = score(0, feats);
  for (std::size_t id = 1; id < inventory.size(); ++id) {
    double s = score(id, feats);
    if (s > best_score) {
      best = id;
      best_score = s;
    }
  }
  return inventory.labels[best];
}

IclpModel train_perceptron(const std::vector<PrefixInstance>& instances,
                           const TrainOptions& options, const FeatureSpec& spec) {
  if (instances.empty()) throw Error("cannot train on an empty instance set");

  IclpModel model;
  model.features = spec;
  model.meta = options;
  for (const PrefixInstance& inst : instances) model.inventory.add(inst.label);
  std::size_t n_labels = model.inventory.size();

  std::vector<std::vector<std::string>> feats(instances.size());
  std::vector<std::size_t> gold(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    feats[i] = extract_features(spec, instances[i].prefix);
    gold[i] = *model.inventory.find(instances[i].label);
  }

  std::vector<std::unordered_map<std::string, double>> w(n_labels);
  std::vector<std::unordered_map<std::string, double>> accum(n_labels);
  double step = 1.0;

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 gen(options.seed);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    deterministic_shuffle(order, gen);
    for (std::size_t idx : order) {
      const std::vector<std::string>& f = feats[idx];
      std::size_t best = 0;
      double best_score = 0.0;
      for (std::size_t id = 0; id < n_labels; ++id) {
        double s = 0.0;
        const auto& wid = w[id];
        for (const std::string& feat : f) {
          auto it = wid.find(feat);
          if (it != wid.end()) s += it->second;
        }
        if (id == 0 || s > best_score) {
          best = id;
          best_score = s;
        }
      }
      if (best != gold[idx]) {
        for (const std::string& feat : f) {
          w[gold[idx]][feat] += 1.0;
          accum[gold[idx]][feat] += step;
          w[best][feat] -= 1.0;
          accum[best][feat] -= step;
        }
      }
      step += 1.0;
    }
  }

  // Average over all update steps: w_avg = w - accum / step.
  model.weights.assign(n_labels, {});
  for (std::size_t id = 0; id < n_labels; ++id) {
    for (const auto& [feat, value] : w[id]) {
      double averaged = value - accum[id][feat] / step;
      if (averaged != 0.0) model.weights[id][feat] = averaged;
    }
  }
  return model;
}

std::string model_to_text(const IclpModel& model) {
  std::string out = "simulseg-labels v1\n";
  out += "labels " + std::to_string(model.inventory.size()) + "\n";
  for (const std::string& label : model.inventory.labels) out += label + "\n";
  out += "features " + join(model.features.templates, ",") + "\n";
  out += "meta epochs=" + std::to_string(model.meta.epochs) +
         " seed=" + std::to_string(model.meta.seed) + "\n";

  // Weights sorted by (label id, feature) so serialization is canonical.
  std::size_t count = 0;
  std::string body;
  for (std::size_t id = 0; id < model.weights.size(); ++id) {
    std::map<std::string, double> sorted(model.weights[id].begin(),
                                         model.weights[id].end());
    for (const auto& [feat, value] : sorted) {
      body += std::to_string(id);
      body += '\t';
      body += feat;
      body += '\t';
      body += format_exact(value);
      body += '\n';
      ++count;
    }
  }
  out += "weights " + std::to_string(count) + "\n";
  out += body;
  return out;
}

IclpModel model_from_text(const std::string& text) {
  std::vector<std::string> lines = split_char(text, '\n');
  std::size_t ln = 0;
  auto next_line = [&]() -> const std::string& {
    if (ln >= lines.size()) throw Error("model file truncated");
    return lines[ln++];
  };

  if (next_line() != "simulseg-labels v1")
    throw Error("unrecognized model file header");

  IclpModel model;
  {
    std::vector<std::string> parts = split_ws(next_line());
    if (parts.size() != 2 || parts[0] != "labels")
      throw Error("model file: expected label count");
    std::size_t n = parse_size(parts[1]);
    for (std::size_t i = 0; i < n; ++i) model.inventory.add(next_line());
    if (model.inventory.size() != n) throw Error("model file: duplicate label");
  }
  {
    std::vector<std::string> parts = split_ws(next_line());
    if (parts.size() != 2 || parts[0] != "features")
      throw Error("model file: expected feature list");
    model.features.templates = split_char(parts[1], ',');
  }
  {
    std::vector<std::string> parts = split_ws(next_line());
    if (parts.size() != 3 || parts[0] != "meta")
      throw Error("model file: expected meta line");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      std::vector<std::string> kv = split_char(parts[i], '=');
      if (kv.size() != 2) throw Error("model file: malformed meta entry");
      if (kv[0] == "epochs") model.meta.epochs = parse_size(kv[1]);
      if (kv[0] == "seed")
        model.meta.seed = static_cast<std::uint32_t>(parse_size(kv[1]));
    }
  }
  model.weights.assign(model.inventory.size(), {});
  {
    std::vector<std::string> parts = split_ws(next_line());
    if (parts.size() != 2 || parts[0] != "weights")
      throw Error("model file: expected weight count");
    std::size_t n = parse_size(parts[1]);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> fields = split_char(next_line(), '\t');
      if (fields.size() != 3) throw Error("model file: malformed weight line");
      std::size_t id = parse_size(fields[0]);
      if (id >= model.weights.size()) throw Error("model file: label id out of range");
      model.weights[id][fields[1]] = parse_double(fields[2]);
    }
  }
  return model;
}

void save_model(const IclpModel& model, const std::string& path) {
  write_text_file(path, model_to_text(model));
}

IclpModel load_model(const std::string& path) {
  return model_from_text(read_text_file(path));
}

std::vector<PrefixInstance> strip_lookahead(
    const std::vector<PrefixInstance>& instances) {
  std::vector<PrefixInstance> out;
  out.reserve(instances.size());
  for (const PrefixInstance& inst : instances) {
    if (inst.prefix.size() < 2) continue;
    PrefixInstance copy = inst;
    copy.prefix.pop_back();
    out.push_back(std::move(copy));
  }
  return out;
}

EvalReport evaluate(const std::vector<PredictionRecord>& records) {
  EvalReport report;
  std::map<std::string, LabelScore> scores;
  for (const PredictionRecord& rec : records) {
    if (!rec.has_gold)
      throw Error("cannot evaluate a prediction without a gold label");
    ++report.total;
    if (rec.predicted == rec.gold) {
      ++report.correct;
      ++scores[rec.gold].tp;
    } else {
      ++scores[rec.predicted].fp;
      ++scores[rec.gold].fn;
    }
  }
  for (auto& [label, score] : scores) {
    score.label = label;
    std::size_t p_den = score.tp + score.fp;
    std::size_t r_den = score.tp + score.fn;
    score.precision = p_den == 0 ? 0.0 : static_cast<double>(score.tp) / p_den;
    score.recall = r_den == 0 ? 0.0 : static_cast<double>(score.tp) / r_den;
    double pr = score.precision + score.recall;
    score.f1 = pr == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / pr;
    report.per_label.push_back(score);
  }
  report.accuracy =
      report.total == 0 ? 0.0 : static_cast<double>(report.correct) / report.total;
  return report;
}

std::string predictions_to_tsv(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const PredictionRecord& rec : records) {
    out += rec.sentence_id;
    out += '\t';
    out += std::to_string(rec.position);
    out += '\t';
    out += rec.predicted;
    if (rec.has_gold) {
      out += '\t';
      out += rec.gold;
    }
    out += '\n';
  }
  return out;
}

std::vector<PredictionRecord> predictions_from_tsv(const std::string& text) {
  std::vector<PredictionRecord> out;
  std::vector<std::string> lines = split_char(text, '\n');
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty()) continue;
    std::vector<std::string> fields = split_char(line, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw Error("prediction line " + std::to_string(ln + 1) +
                  ": expected 3 or 4 fields, got " + std::to_string(fields.size()));
    PredictionRecord rec;
    rec.sentence_id = fields[0];
    rec.position = parse_size(fields[1]);
    if (rec.position < 1)
      throw Error("prediction line " + std::to_string(ln + 1) + ": position must be >= 1");
    rec.predicted = fields[2];
    if (rec.predicted.empty())
      throw Error("prediction line " + std::to_string(ln + 1) + ": empty label");
    if (fields.size() == 4) {
      rec.gold = fields[3];
      rec.has_gold = true;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PredictionRecord> predict_instances(
    const IclpModel& model, const std::vector<PrefixInstance>& instances) {
  std::vector<PredictionRecord> out;
  out.reserve(instances.size());
  for (const PrefixInstance& inst : instances) {
    PredictionRecord rec;
    rec.sentence_id = inst.sentence_id;
    rec.position = inst.position;
    rec.predicted = model.predict(inst.prefix);
    rec.gold = inst.label;
    rec.has_gold = true;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace simulseg
