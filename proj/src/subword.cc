#include "simulseg/subword.h"

#include <map>

namespace simulseg {

namespace {

std::vector<std::string> initial_symbols(const std::string& word) {
  std::vector<std::string> symbols = utf8_codepoints(word);
  if (symbols.empty()) throw Error("cannot split empty word into symbols");
  symbols.back() += MergeTable::kEndOfWord;
  return symbols;
}

void merge_in_place(std::vector<std::string>& symbols,
                    const std::pair<std::string, std::string>& merge) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == merge.first &&
        symbols[i + 1] == merge.second) {
      out.push_back(merge.first + merge.second);
      i += 2;
    } else {
      out.push_back(symbols[i]);
      ++i;
    }
  }
  symbols = std::move(out);
}

}  // namespace

MergeTable learn_merges(const std::vector<std::string>& corpus_words,
                        std::size_t num_merges) {
  // Word-type frequencies keep each step linear in the vocabulary.
  std::map<std::string, std::size_t> freq;
  for (const std::string& word : corpus_words) {
    if (word.empty()) continue;
    ++freq[word];
  }

  std::vector<std::pair<std::vector<std::string>, std::size_t>> vocab;
  vocab.reserve(freq.size());
  for (const auto& [word, count] : freq) {
    vocab.emplace_back(initial_symbols(word), count);
  }

  MergeTable table;
  for (std::size_t step = 0; step < num_merges; ++step) {
    std::map<std::pair<std::string, std::string>, std::size_t> pair_freq;
    for (const auto& [symbols, count] : vocab) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        pair_freq[{symbols[i], symbols[i + 1]}] += count;
      }
    }
    if (pair_freq.empty()) break;

    // Ordered map scan: the first entry with maximal count is the
    // lexicographically smallest of the most frequent pairs.
    auto best = pair_freq.begin();
    for (auto it = pair_freq.begin(); it != pair_freq.end(); ++it) {
      if (it->second > best->second) best = it;
    }

    table.merges.push_back(best->first);
    for (auto& [symbols, count] : vocab) {
      merge_in_place(symbols, best->first);
    }
  }
  return table;
}

std::vector<Subword> apply_merges(const MergeTable& table, const std::string& word) {
  std::vector<std::string> symbols = initial_symbols(word);
  for (const auto& merge : table.merges) {
    if (symbols.size() < 2) break;
    merge_in_place(symbols, merge);
  }

  const std::string marker = MergeTable::kEndOfWord;
  std::vector<Subword> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    std::string text = symbols[i];
    bool word_end = false;
    if (text.size() >= marker.size() &&
        text.compare(text.size() - marker.size(), marker.size(), marker) == 0) {
      text.erase(text.size() - marker.size());
      word_end = true;
    }
    out.push_back({std::move(text), word_end});
  }
  return out;
}

std::vector<Subword> apply_merges(const MergeTable& table,
                                  const std::vector<std::string>& words) {
  std::vector<Subword> out;
  for (const std::string& word : words) {
    std::vector<Subword> pieces = apply_merges(table, word);
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return out;
}

std::vector<std::string> reassemble_words(const std::vector<Subword>& subwords) {
  std::vector<std::string> out;
  std::string current;
  for (const Subword& piece : subwords) {
    current += piece.text;
    if (piece.word_end) {
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty())
    throw Error("subword stream ends inside a word");
  return out;
}

std::size_t subword_count(const MergeTable& table, const std::string& word) {
  return apply_merges(table, word).size();
}

std::string merges_to_text(const MergeTable& table) {
  std::string out;
  for (const auto& [left, right] : table.merges) {
    out += left;
    out += ' ';
    out += right;
    out += '\n';
  }
  return out;
}

MergeTable merges_from_text(const std::string& text) {
  MergeTable table;
  std::vector<std::string> lines = split_char(text, '\n');
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    std::vector<std::string> parts = split_ws(lines[ln]);
    if (parts.size() != 2)
      throw Error("merge line " + std::to_string(ln + 1) +
                  ": expected two space-separated symbols");
    table.merges.emplace_back(parts[0], parts[1]);
  }
  return table;
}

}  // namespace simulseg
