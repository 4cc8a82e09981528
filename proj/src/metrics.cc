#include "simulseg/metrics.h"

#include <algorithm>
#include <cmath>

namespace simulseg {

double average_lagging(const std::vector<std::size_t>& g, std::size_t source_len) {
  if (source_len == 0) throw Error("average lagging needs a non-empty source");
  if (g.empty()) throw Error("average lagging needs a non-empty target");
  for (std::size_t t = 0; t < g.size(); ++t) {
    if (g[t] < 1 || g[t] > source_len)
      throw Error("read count out of range at step " + std::to_string(t + 1));
    if (t > 0 && g[t] < g[t - 1])
      throw Error("read counts must be monotone non-decreasing");
  }

  std::size_t tau = g.size();
  for (std::size_t t = 0; t < g.size(); ++t) {
    if (g[t] == source_len) {
      tau = t + 1;
      break;
    }
  }

  double gamma = static_cast<double>(g.size()) / static_cast<double>(source_len);
  double sum = 0.0;
  for (std::size_t t = 1; t <= tau; ++t) {
    sum += static_cast<double>(g[t - 1]) - static_cast<double>(t - 1) / gamma;
  }
  return sum / static_cast<double>(tau);
}

std::vector<std::size_t> expand_reads_to_characters(
    const std::vector<std::string>& target, const std::vector<std::size_t>& g) {
  if (target.size() != g.size())
    throw Error("target token count does not match read schedule");
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < target.size(); ++t) {
    std::size_t chars = utf8_length(target[t]);
    for (std::size_t c = 0; c < chars; ++c) out.push_back(g[t]);
  }
  return out;
}

LatencyReport latency_report(const std::vector<SessionLog>& logs, LatencyUnit unit) {
  LatencyReport report;
  report.unit = unit;
  double sum = 0.0;
  for (const SessionLog& log : logs) {
    if (log.failed || log.target.empty() || log.source.empty()) {
      ++report.excluded;
      continue;
    }
    std::vector<std::size_t> g = log.reads;
    if (unit == LatencyUnit::Character)
      g = expand_reads_to_characters(log.target, log.reads);
    if (g.empty()) {
      ++report.excluded;
      continue;
    }
    double al = average_lagging(g, log.source.size());
    report.per_sentence.push_back(al);
    sum += al;
    ++report.scored;
  }
  report.mean_al = report.scored == 0 ? 0.0 : sum / static_cast<double>(report.scored);
  return report;
}

namespace {

std::vector<std::string> to_units(const std::vector<std::string>& tokens, TextUnit unit) {
  if (unit == TextUnit::Word) return tokens;
  std::vector<std::string> chars;
  for (const std::string& token : tokens) {
    std::vector<std::string> cps = utf8_codepoints(token);
    chars.insert(chars.end(), cps.begin(), cps.end());
  }
  return chars;
}

// Joined n-gram keys; tokens never contain the separator byte '\x1f'.
std::map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& units,
                                                std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (units.size() < n) return counts;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) key += '\x1f';
      key += units[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

QualityReport corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                          const std::vector<std::vector<std::string>>& references,
                          std::size_t max_n, TextUnit unit, bool smooth) {
  if (hypotheses.size() != references.size())
    throw Error("hypothesis and reference counts differ");
  if (hypotheses.empty()) throw Error("cannot score an empty corpus");
  if (max_n < 1) throw Error("BLEU needs max_n >= 1");

  std::vector<std::size_t> matches(max_n, 0);
  std::vector<std::size_t> totals(max_n, 0);
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    std::vector<std::string> hyp = to_units(hypotheses[s], unit);
    std::vector<std::string> ref = to_units(references[s], unit);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      std::map<std::string, std::size_t> hyp_counts = ngram_counts(hyp, n);
      std::map<std::string, std::size_t> ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        std::size_t clipped = it == ref_counts.end() ? 0 : std::min(count, it->second);
        matches[n - 1] += clipped;
      }
      if (hyp.size() >= n) totals[n - 1] += hyp.size() - n + 1;
    }
  }

  QualityReport report;
  report.hyp_len = hyp_len;
  report.ref_len = ref_len;
  report.hyp_ref_ratio =
      ref_len == 0 ? 0.0 : static_cast<double>(hyp_len) / static_cast<double>(ref_len);

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    double m = static_cast<double>(matches[n - 1]);
    double t = static_cast<double>(totals[n - 1]);
    double p = 0.0;
    if (t > 0.0 && m > 0.0) {
      p = m / t;
    } else if (t > 0.0 && smooth) {
      p = 0.01 / t;  // add-floor for zero-match orders
    }
    if (n - 1 < report.precisions.size()) report.precisions[n - 1] = p;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p) / static_cast<double>(max_n);
    }
  }

  report.brevity_penalty =
      (hyp_len == 0 || hyp_len >= ref_len)
          ? (hyp_len == 0 ? 0.0 : 1.0)
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  report.bleu = zero ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum);
  return report;
}

double length_ratio(const std::vector<std::vector<std::string>>& hypotheses,
                    const std::vector<std::vector<std::string>>& references,
                    TextUnit unit) {
  if (hypotheses.size() != references.size())
    throw Error("hypothesis and reference counts differ");
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += to_units(hypotheses[s], unit).size();
    ref_len += to_units(references[s], unit).size();
  }
  if (ref_len == 0) throw Error("reference corpus is empty");
  return static_cast<double>(hyp_len) / static_cast<double>(ref_len);
}

std::map<std::size_t, std::size_t> segment_length_distribution(
    const std::vector<SessionLog>& logs, const MergeTable* table) {
  std::map<std::size_t, std::size_t> histogram;
  for (const SessionLog& log : logs) {
    if (log.failed || log.source.empty()) continue;

    auto span_length = [&](std::size_t begin, std::size_t end) {
      std::size_t len = 0;
      for (std::size_t i = begin; i < end; ++i) {
        len += table == nullptr ? 1 : subword_count(*table, log.source[i]);
      }
      return len;
    };

    // Fold empty-output chunks forward into the next chunk; a trailing run
    // of empty chunks joins the last chunk that produced output.
    std::vector<std::size_t> lengths;
    std::size_t pending = 0;
    if (log.chunks.empty()) {
      pending = span_length(0, log.source.size());
    }
    for (const ChunkRecord& chunk : log.chunks) {
      std::size_t len = span_length(chunk.src_begin, chunk.src_end);
      if (chunk.tgt_end == chunk.tgt_begin) {
        pending += len;
      } else {
        lengths.push_back(pending + len);
        pending = 0;
      }
    }
    if (pending > 0) {
      if (lengths.empty()) {
        lengths.push_back(pending);
      } else {
        lengths.back() += pending;
      }
    }
    for (std::size_t len : lengths) ++histogram[len];
  }
  return histogram;
}

std::string histogram_to_csv(const std::map<std::size_t, std::size_t>& histogram) {
  std::string out = "length,count\n";
  for (const auto& [length, count] : histogram) {
    out += std::to_string(length);
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

}  // namespace simulseg
