#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "simulseg/segmenter.h"
#include "simulseg/translator.h"

namespace simulseg {

// Spans are 0-based half-open over the session's source/target tokens.
struct ChunkRecord {
  std::size_t src_begin = 0;
  std::size_t src_end = 0;
  std::size_t tgt_begin = 0;
  std::size_t tgt_end = 0;

  bool operator==(const ChunkRecord&) const = default;
};

// Full trace of one incremental translation session.
struct SessionLog {
  std::string sentence_id;
  std::vector<std::string> source;
  std::vector<std::string> target;
  // reads[t]: source tokens read when target token t was emitted (1-based count).
  std::vector<std::size_t> reads;
  std::vector<ChunkRecord> chunks;
  PolicyConfig policy;
  bool failed = false;
  std::string error;
  std::size_t forced_reads = 0;
};

// Chunk-wise incremental decoding: for each chunk ending at source token b,
// the translator sees source w_1..w_b and the previously emitted target as
// a forced prefix, and its whole continuation is committed. When
// lookahead_delay is set, a non-final chunk's tokens count b+1 source reads
// (the boundary was triggered by looking at the next word); otherwise b.
// The final chunk always counts the full source.
SessionLog run_chunk_session(const std::string& sentence_id,
                             const std::vector<std::string>& words,
                             const Segmentation& segmentation, bool lookahead_delay,
                             const PolicyConfig& policy, Translator& translator);

// Boundaries before every label in the policy's boundary set, rule-filtered.
SessionLog run_rule_session(const std::string& sentence_id,
                            const std::vector<std::string>& words,
                            const std::vector<std::string>& labels,
                            const RuleBased& policy, Translator& translator);

// Word-unit fixed-size chunks.
SessionLog run_fixed_session(const std::string& sentence_id,
                             const std::vector<std::string>& words,
                             const FixedSize& policy, Translator& translator);

// Test-time wait-k: read k tokens, then alternate one write with one read.
// Writes emit from the most recent continuation; a fresh continuation is
// requested (source w_1..w_j, forced prefix = emitted tokens) whenever the
// cached one runs out. An empty continuation before source exhaustion
// forces a read instead of a write. Once the source is exhausted the cache
// and one final continuation are emitted with every token counting |X|.
SessionLog run_waitk_session(const std::string& sentence_id,
                             const std::vector<std::string>& words, std::size_t k,
                             Translator& translator);

nlohmann::json policy_to_json(const PolicyConfig& policy);
PolicyConfig policy_from_json(const nlohmann::json& j);

nlohmann::json session_to_json(const SessionLog& log);
SessionLog session_from_json(const nlohmann::json& j);

// One JSON object per line.
std::string sessions_to_jsonl(const std::vector<SessionLog>& logs);
std::vector<SessionLog> sessions_from_jsonl(const std::string& text);

}  // namespace simulseg
