#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "simulseg/util.h"

namespace simulseg {

// Ordered byte-pair merge table. Symbols are UTF-8 code points initially;
// the word-final symbol carries the end-of-word suffix marker.
struct MergeTable {
  static constexpr const char* kEndOfWord = "</w>";

  std::vector<std::pair<std::string, std::string>> merges;

  bool operator==(const MergeTable&) const = default;
};

struct Subword {
  std::string text;     // marker stripped
  bool word_end = false;

  bool operator==(const Subword&) const = default;
};

// Learns up to num_merges merges from the corpus: at each step the most
// frequent adjacent symbol pair is merged, ties broken by lexicographic
// order on (left, right). Stops early when no pair remains.
MergeTable learn_merges(const std::vector<std::string>& corpus_words,
                        std::size_t num_merges);

std::vector<Subword> apply_merges(const MergeTable& table, const std::string& word);
std::vector<Subword> apply_merges(const MergeTable& table,
                                  const std::vector<std::string>& words);

// Reassembles words from a subword stream (inverse of apply_merges).
std::vector<std::string> reassemble_words(const std::vector<Subword>& subwords);

std::size_t subword_count(const MergeTable& table, const std::string& word);

// One merge per line, two space-separated symbols, in learned order.
std::string merges_to_text(const MergeTable& table);
MergeTable merges_from_text(const std::string& text);

}  // namespace simulseg
