#include "simulseg/segmenter.h"

#include <algorithm>

namespace simulseg {

std::string policy_name(const PolicyConfig& policy) {
  if (std::holds_alternative<WaitK>(policy)) return "waitk";
  if (std::holds_alternative<FixedSize>(policy)) return "fixed";
  return "rule";
}

std::vector<std::pair<std::size_t, std::size_t>> Segmentation::chunks() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 1;
  for (std::size_t end : boundaries) {
    out.emplace_back(begin, end);
    begin = end + 1;
  }
  return out;
}

Segmentation segment_rule_based(const std::vector<std::string>& labels,
                                const std::vector<std::string>& boundary_labels,
                                std::size_t min_len) {
  if (min_len < 1) throw Error("minimum chunk length must be >= 1");
  auto is_boundary_label = [&](const std::string& label) {
    return std::find(boundary_labels.begin(), boundary_labels.end(), label) !=
           boundary_labels.end();
  };

  Segmentation seg;
  seg.source_len = labels.size();
  if (labels.empty()) return seg;

  std::size_t last = 0;  // index of the last placed boundary
  for (std::size_t i = 2; i <= labels.size(); ++i) {
    if (!is_boundary_label(labels[i - 1])) continue;
    if (is_boundary_label(labels[i - 2])) continue;
    if ((i - 1) - last < min_len) continue;
    seg.boundaries.push_back(i - 1);
    last = i - 1;
  }
  seg.boundaries.push_back(labels.size());
  return seg;
}

Segmentation segment_fixed(std::size_t source_len, std::size_t size) {
  if (size < 1) throw Error("fixed segment size must be >= 1");
  Segmentation seg;
  seg.source_len = source_len;
  if (source_len == 0) return seg;
  for (std::size_t b = size; b < source_len; b += size) seg.boundaries.push_back(b);
  seg.boundaries.push_back(source_len);
  return seg;
}

Segmentation segment_fixed_subwords(const std::vector<std::string>& words,
                                    std::size_t size, const MergeTable& table) {
  if (size < 1) throw Error("fixed segment size must be >= 1");
  Segmentation seg;
  seg.source_len = words.size();
  if (words.empty()) return seg;
  std::size_t cum = 0;
  std::size_t next = size;
  for (std::size_t j = 1; j <= words.size(); ++j) {
    cum += subword_count(table, words[j - 1]);
    if (next <= cum) {
      seg.boundaries.push_back(j);
      while (next <= cum) next += size;
    }
  }
  if (seg.boundaries.empty() || seg.boundaries.back() != words.size())
    seg.boundaries.push_back(words.size());
  return seg;
}

std::vector<std::size_t> waitk_read_schedule(std::size_t k, std::size_t source_len,
                                             std::size_t target_len) {
  if (k < 1) throw Error("wait-k requires k >= 1");
  if (source_len == 0) throw Error("wait-k schedule needs a non-empty source");
  std::vector<std::size_t> g(target_len);
  for (std::size_t t = 1; t <= target_len; ++t) {
    g[t - 1] = std::min(k + t - 1, source_len);
  }
  return g;
}

}  // namespace simulseg
