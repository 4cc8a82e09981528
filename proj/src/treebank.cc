#include "simulseg/treebank.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

namespace simulseg {

TreeParseError::TreeParseError(const std::string& message, std::size_t byte_offset)
    : Error(message + " (byte " + std::to_string(byte_offset) + ")"),
      offset(byte_offset) {}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() const { return text[pos]; }
  std::string atom() {
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos;
    }
    if (pos == start) throw TreeParseError("expected token", start);
    return text.substr(start, pos - start);
  }
};

ParseNode parse_node(Cursor& cur) {
  cur.skip_ws();
  if (cur.pos >= cur.text.size() || cur.peek() != '(')
    throw TreeParseError("expected '('", cur.pos);
  ++cur.pos;
  cur.skip_ws();
  if (cur.pos >= cur.text.size()) throw TreeParseError("unexpected end of input", cur.pos);

  ParseNode node;
  if (cur.peek() != '(' && cur.peek() != ')') node.label = cur.atom();

  cur.skip_ws();
  if (cur.pos >= cur.text.size()) throw TreeParseError("unexpected end of input", cur.pos);

  if (cur.peek() == '(') {
    while (true) {
      cur.skip_ws();
      if (cur.pos >= cur.text.size()) throw TreeParseError("missing ')'", cur.pos);
      if (cur.peek() == ')') break;
      if (cur.peek() != '(')
        throw TreeParseError("unexpected token among subtrees", cur.pos);
      node.children.push_back(parse_node(cur));
    }
  } else if (cur.peek() != ')') {
    node.word = cur.atom();
    cur.skip_ws();
    if (cur.pos < cur.text.size() && cur.peek() != ')')
      throw TreeParseError("expected ')' after terminal", cur.pos);
  } else {
    throw TreeParseError("empty constituent", cur.pos);
  }

  if (cur.pos >= cur.text.size() || cur.peek() != ')')
    throw TreeParseError("missing ')'", cur.pos);
  ++cur.pos;
  return node;
}

std::string normalize_label(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  std::size_t cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

void normalize_labels(ParseNode& node) {
  node.label = normalize_label(node.label);
  for (ParseNode& child : node.children) normalize_labels(child);
}

// Removes trace subtrees and any internal node left without children.
// Returns false when the node itself vanishes.
bool prune_traces(ParseNode& node) {
  if (node.label == "-NONE-") return false;
  if (node.is_leaf()) return true;
  std::vector<ParseNode> kept;
  for (ParseNode& child : node.children) {
    if (prune_traces(child)) kept.push_back(std::move(child));
  }
  node.children = std::move(kept);
  return !node.children.empty();
}

void collect_words(const ParseNode& node, std::vector<std::string>& words) {
  if (node.is_leaf()) {
    words.push_back(node.word);
    return;
  }
  for (const ParseNode& child : node.children) collect_words(child, words);
}

void render(const ParseNode& node, std::string& out) {
  out += '(';
  out += node.label;
  if (node.is_leaf()) {
    out += ' ';
    out += node.word;
  } else {
    for (const ParseNode& child : node.children) {
      out += ' ';
      render(child, out);
    }
  }
  out += ')';
}

}  // namespace

ParseTree::ParseTree(ParseNode root) : root_(std::move(root)) {
  collect_words(root_, words_);
  labels_.assign(words_.size(), std::string());
  std::vector<bool> filled(words_.size(), false);

  // Pre-order walk; when a node is visited the counter equals the 1-based
  // index of its leftmost terminal.
  std::size_t counter = 1;
  std::function<void(const ParseNode&, bool)> visit =
      [&](const ParseNode& node, bool is_root) {
        std::size_t idx = counter;
        if (!is_root && idx <= words_.size() && !filled[idx - 1]) {
          labels_[idx - 1] = node.label;
          filled[idx - 1] = true;
        }
        if (node.is_leaf()) {
          ++counter;
          return;
        }
        for (const ParseNode& child : node.children) visit(child, false);
      };
  visit(root_, true);

  // A single-terminal tree has no non-root node; fall back to the root.
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) labels_[i] = root_.label;
  }
}

const std::string& ParseTree::next_constituent_label(std::size_t i) const {
  if (i < 1 || i > words_.size())
    throw Error("word index " + std::to_string(i) + " out of range (sentence has " +
                std::to_string(words_.size()) + " words)");
  return labels_[i - 1];
}

std::string ParseTree::to_bracketed() const {
  std::string out;
  render(root_, out);
  return out;
}

ParsedTreebank parse_trees(const std::string& text) {
  ParsedTreebank result;
  Cursor cur{text};
  while (!cur.done()) {
    ParseNode node = parse_node(cur);
    if (node.label.empty() && node.children.size() == 1)
      node = std::move(node.children.front());
    normalize_labels(node);
    if (!prune_traces(node)) {
      ++result.skipped_empty;
      continue;
    }
    result.trees.emplace_back(std::move(node));
  }
  return result;
}

std::vector<PrefixInstance> extract_instances(const ParseTree& tree,
                                              const std::string& sentence_id) {
  std::vector<PrefixInstance> out;
  const std::vector<std::string>& words = tree.words();
  std::vector<std::string> prefix;
  prefix.reserve(words.size());
  for (std::size_t i = 1; i <= words.size(); ++i) {
    prefix.push_back(words[i - 1]);
    out.push_back({sentence_id, i, prefix, tree.next_constituent_label(i)});
  }
  return out;
}

std::string instances_to_tsv(const std::vector<PrefixInstance>& instances) {
  std::string out;
  for (const PrefixInstance& inst : instances) {
    out += inst.sentence_id;
    out += '\t';
    out += std::to_string(inst.position);
    out += '\t';
    out += inst.label;
    out += '\t';
    out += join(inst.prefix, " ");
    out += '\n';
  }
  return out;
}

std::vector<PrefixInstance> instances_from_tsv(const std::string& text) {
  std::vector<PrefixInstance> out;
  std::vector<std::string> lines = split_char(text, '\n');
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty()) continue;
    std::vector<std::string> fields = split_char(line, '\t');
    if (fields.size() != 4)
      throw Error("instance line " + std::to_string(ln + 1) + ": expected 4 fields, got " +
                  std::to_string(fields.size()));
    PrefixInstance inst;
    inst.sentence_id = fields[0];
    inst.position = parse_size(fields[1]);
    if (inst.position < 1)
      throw Error("instance line " + std::to_string(ln + 1) + ": position must be >= 1");
    inst.label = fields[2];
    inst.prefix = split_ws(fields[3]);
    if (inst.label.empty())
      throw Error("instance line " + std::to_string(ln + 1) + ": empty label");
    if (inst.prefix.empty())
      throw Error("instance line " + std::to_string(ln + 1) + ": empty prefix");
    out.push_back(std::move(inst));
  }
  return out;
}

TreebankSplit split_treebank(std::size_t tree_count, double dev_fraction,
                             std::uint32_t seed) {
  if (dev_fraction < 0.0 || dev_fraction > 1.0)
    throw Error("dev fraction must be within [0, 1]");
  std::vector<std::size_t> order(tree_count);
  for (std::size_t i = 0; i < tree_count; ++i) order[i] = i;
  std::mt19937 gen(seed);
  deterministic_shuffle(order, gen);

  std::size_t dev_count =
      static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(tree_count)));
  if (dev_count > tree_count) dev_count = tree_count;

  TreebankSplit split;
  split.dev.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(dev_count));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(dev_count), order.end());
  std::sort(split.dev.begin(), split.dev.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

}  // namespace simulseg
