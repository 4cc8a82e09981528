#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "simulseg/subword.h"
#include "simulseg/util.h"

namespace simulseg {

enum class SegmentUnit { Word, Subword };

struct WaitK {
  std::size_t k = 1;
};

struct FixedSize {
  std::size_t size = 1;
  SegmentUnit unit = SegmentUnit::Word;
};

struct RuleBased {
  std::vector<std::string> boundary_labels;  // e.g. {"VP", "S"}
  std::size_t min_len = 1;
};

using PolicyConfig = std::variant<WaitK, FixedSize, RuleBased>;

std::string policy_name(const PolicyConfig& policy);

// A partition of a token sequence into contiguous chunks. Boundaries are
// 1-based token indices marking chunk ends; the last boundary is always the
// sequence length.
struct Segmentation {
  std::size_t source_len = 0;
  std::vector<std::size_t> boundaries;

  // 1-based inclusive (begin, end) spans, in order.
  std::vector<std::pair<std::size_t, std::size_t>> chunks() const;
};

// Places a boundary just before token i (2 <= i <= n) when labels[i-1] is a
// boundary label, labels[i-2] is not, and the chunk being closed has at
// least min_len tokens. The final boundary at n is unconditional.
Segmentation segment_rule_based(const std::vector<std::string>& labels,
                                const std::vector<std::string>& boundary_labels,
                                std::size_t min_len);

// Boundary after every `size` tokens plus the unconditional final boundary.
Segmentation segment_fixed(std::size_t source_len, std::size_t size);

// Fixed-size segmentation counted in subwords but snapped to word ends: a
// boundary goes after the word containing each multiple of `size`. A word
// longer than `size` subwords yields one oversized chunk, and later
// boundaries resume at the next multiple past it.
Segmentation segment_fixed_subwords(const std::vector<std::string>& words,
                                    std::size_t size, const MergeTable& table);

// Per-target-token source read counts for a wait-k schedule:
// g(t) = min(k + t - 1, source_len), t = 1..target_len.
std::vector<std::size_t> waitk_read_schedule(std::size_t k, std::size_t source_len,
                                             std::size_t target_len);

}  // namespace simulseg
