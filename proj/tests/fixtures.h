#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simulseg/translator.h"
#include "simulseg/treebank.h"

namespace simulseg::fixtures {

// "You can save time by doing this ." with a modal chain, an embedded
// gerund clause, and a sentence-final period.
extern const char* kSaveTimeTree;

// "I bought a pen ." — the five-word sentence used throughout the
// reordering tests.
extern const char* kPenTree;

// Gloss dictionary for the pen sentence: subject-marker and object-marker
// tokens ride along with their head word, the article has no gloss, and the
// verb is tagged so it reorders to the end.
extern const char* kToyDictionaryTsv;
GlossDictionary toy_dictionary();

ParseTree parse_single_tree(const std::string& text);

// Deterministic generated treebank: simple declarative frames over a small
// vocabulary, with three deliberately unpredictable continuation points
// (after "by", after an object noun, and after "the") so that prefixes
// ending one word earlier cannot always determine the next label.
std::string fixture_treebank(std::size_t sentence_count, std::uint32_t seed);

// Glosses covering every word the generator can emit; articles map to
// nothing, verb-like tags reorder, punctuation stays put.
GlossDictionary fixture_dictionary();

// Plain token sequences with lengths drawn uniformly from [min_len, max_len].
std::vector<std::vector<std::string>> random_sentences(std::size_t count,
                                                       std::size_t min_len,
                                                       std::size_t max_len,
                                                       std::uint32_t seed);

std::vector<std::string> words(const std::string& space_joined);

// Second opinion on corpus BLEU, written the slow way: n-grams are compared
// token by token with nested loops, the geometric mean is a pow over the
// product, and UTF-8 is decoded by hand. Kept deliberately free of the
// library's counting machinery so the two can check each other.
struct ReferenceBleu {
  double bleu = 0.0;
  std::vector<double> precisions;
  double brevity_penalty = 1.0;
};

ReferenceBleu reference_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                             const std::vector<std::vector<std::string>>& references,
                             std::size_t max_n, bool char_unit, bool smooth);

// Scratch directory removed on destruction.
struct TempDir {
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const;

  std::string path;
};

}  // namespace simulseg::fixtures
