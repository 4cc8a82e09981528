#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "simulseg/simulator.h"
#include "simulseg/subword.h"
#include "simulseg/util.h"

namespace simulseg {

// Average lagging over a read schedule. g[t] is the 1-based count of source
// tokens read when target unit t was emitted; it must be monotone and reach
// source_len. gamma = |Y| / |X|; tau is the first step that has read the
// whole source (falling back to |Y| if no emission happened at the end);
// AL = (1/tau) * sum_{t=1..tau} (g(t) - (t-1)/gamma).
double average_lagging(const std::vector<std::size_t>& g, std::size_t source_len);

// Expands token-level read counts to character-level ones: each target
// token contributes one unit per UTF-8 code point, inheriting its g value.
std::vector<std::size_t> expand_reads_to_characters(
    const std::vector<std::string>& target, const std::vector<std::size_t>& g);

enum class LatencyUnit { Word, Character };

struct LatencyReport {
  LatencyUnit unit = LatencyUnit::Word;
  double mean_al = 0.0;
  std::vector<double> per_sentence;
  std::size_t scored = 0;
  std::size_t excluded = 0;  // failed or empty sessions
};

LatencyReport latency_report(const std::vector<SessionLog>& logs, LatencyUnit unit);

enum class TextUnit { Word, Character };

struct QualityReport {
  double bleu = 0.0;  // percent
  std::array<double, 4> precisions{0.0, 0.0, 0.0, 0.0};
  double brevity_penalty = 1.0;
  double hyp_ref_ratio = 0.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

// Corpus-level BLEU with clipped n-gram counts (n = 1..max_n), geometric
// mean, and the standard brevity penalty. Unsmoothed: any zero precision
// zeroes the score unless add-floor smoothing is enabled.
QualityReport corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                          const std::vector<std::vector<std::string>>& references,
                          std::size_t max_n = 4, TextUnit unit = TextUnit::Word,
                          bool smooth = false);

double length_ratio(const std::vector<std::vector<std::string>>& hypotheses,
                    const std::vector<std::vector<std::string>>& references,
                    TextUnit unit = TextUnit::Word);

// Distribution of source chunk lengths across sessions. A chunk that
// produced no target tokens is folded into the following chunk (a trailing
// one into the preceding chunk) before counting. Lengths are in source
// words, or in subwords when a merge table is supplied.
std::map<std::size_t, std::size_t> segment_length_distribution(
    const std::vector<SessionLog>& logs, const MergeTable* table = nullptr);

std::string histogram_to_csv(const std::map<std::size_t, std::size_t>& histogram);

}  // namespace simulseg
