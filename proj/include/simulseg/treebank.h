#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simulseg/util.h"

namespace simulseg {

struct TreeParseError : Error {
  TreeParseError(const std::string& message, std::size_t byte_offset);
  std::size_t offset;
};

// A constituency tree node. A node carries either children or a terminal
// word, never both; terminals keep their part-of-speech tag as the label.
struct ParseNode {
  std::string label;
  std::vector<ParseNode> children;
  std::string word;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const ParseNode&) const = default;
};

// Immutable tree over a tokenized sentence. Construction walks the tree
// once to record, for every word position, the label of the first node in
// pre-order (root excluded) whose leftmost terminal is that word.
class ParseTree {
 public:
  explicit ParseTree(ParseNode root);

  const ParseNode& root() const { return root_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }

  // i is 1-based; throws on i out of range.
  const std::string& next_constituent_label(std::size_t i) const;

  std::string to_bracketed() const;

 private:
  ParseNode root_;
  std::vector<std::string> words_;
  std::vector<std::string> labels_;
};

struct ParsedTreebank {
  std::vector<ParseTree> trees;
  std::size_t skipped_empty = 0;  // trees whose terminals were all traces
};

// Reads zero or more bracketed trees. Function tags and coindices are
// stripped from labels (first '-' or '=', labels starting with '-' such as
// -NONE- and -LRB- stay whole), trace subtrees under -NONE- are removed
// along with any internal node left childless, and an unlabeled wrapping
// pair around a single tree is unwrapped.
ParsedTreebank parse_trees(const std::string& text);

// One classification instance: the word prefix w_1..w_i paired with the
// label of the constituent starting at w_i.
struct PrefixInstance {
  std::string sentence_id;
  std::size_t position = 0;  // 1-based word index i
  std::vector<std::string> prefix;
  std::string label;

  bool operator==(const PrefixInstance&) const = default;
};

std::vector<PrefixInstance> extract_instances(const ParseTree& tree,
                                              const std::string& sentence_id);

// Tab-separated: sentence_id, position, label, space-joined prefix.
std::string instances_to_tsv(const std::vector<PrefixInstance>& instances);
std::vector<PrefixInstance> instances_from_tsv(const std::string& text);

struct TreebankSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
};

// Random sentence-level held-out split; round(fraction * n) trees go to dev.
TreebankSplit split_treebank(std::size_t tree_count, double dev_fraction,
                             std::uint32_t seed);

}  // namespace simulseg
