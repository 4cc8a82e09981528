#include "simulseg/simulator.h"

#include <algorithm>
#include <deque>

namespace simulseg {

namespace {

std::vector<std::string> window(const std::vector<std::string>& words, std::size_t n) {
  return {words.begin(), words.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

SessionLog run_chunk_session(const std::string& sentence_id,
                             const std::vector<std::string>& words,
                             const Segmentation& segmentation, bool lookahead_delay,
                             const PolicyConfig& policy, Translator& translator) {
  if (segmentation.source_len != words.size())
    throw Error("segmentation does not cover the sentence");

  SessionLog log;
  log.sentence_id = sentence_id;
  log.source = words;
  log.policy = policy;
  if (words.empty()) return log;

  std::size_t n = words.size();
  try {
    std::size_t src_begin = 0;
    for (std::size_t b : segmentation.boundaries) {
      std::vector<std::string> continuation =
          translator.translate(window(words, b), log.target);
      std::size_t reads = b;
      if (b < n && lookahead_delay) reads = b + 1;
      if (b == n) reads = n;

      ChunkRecord chunk;
      chunk.src_begin = src_begin;
      chunk.src_end = b;
      chunk.tgt_begin = log.target.size();
      for (std::string& token : continuation) {
        log.target.push_back(std::move(token));
        log.reads.push_back(reads);
      }
      chunk.tgt_end = log.target.size();
      log.chunks.push_back(chunk);
      src_begin = b;
    }
  } catch (const TranslatorError& e) {
    log.failed = true;
    log.error = e.what();
  }
  return log;
}

SessionLog run_rule_session(const std::string& sentence_id,
                            const std::vector<std::string>& words,
                            const std::vector<std::string>& labels,
                            const RuleBased& policy, Translator& translator) {
  if (labels.size() != words.size())
    throw Error("label sequence does not cover the sentence");
  Segmentation seg =
      segment_rule_based(labels, policy.boundary_labels, policy.min_len);
  return run_chunk_session(sentence_id, words, seg, /*lookahead_delay=*/true,
                           PolicyConfig{policy}, translator);
}

SessionLog run_fixed_session(const std::string& sentence_id,
                             const std::vector<std::string>& words,
                             const FixedSize& policy, Translator& translator) {
  Segmentation seg = segment_fixed(words.size(), policy.size);
  return run_chunk_session(sentence_id, words, seg, /*lookahead_delay=*/false,
                           PolicyConfig{policy}, translator);
}

SessionLog run_waitk_session(const std::string& sentence_id,
                             const std::vector<std::string>& words, std::size_t k,
                             Translator& translator) {
  if (k < 1) throw Error("wait-k requires k >= 1");

  SessionLog log;
  log.sentence_id = sentence_id;
  log.source = words;
  log.policy = WaitK{k};
  if (words.empty()) return log;

  std::size_t n = words.size();
  std::size_t j = std::min(k, n);
  std::deque<std::string> cache;
  ChunkRecord open_chunk;
  bool chunk_open = false;

  auto close_chunk = [&]() {
    if (chunk_open) {
      open_chunk.tgt_end = log.target.size();
      log.chunks.push_back(open_chunk);
      chunk_open = false;
    }
  };

  try {
    while (j < n) {
      if (cache.empty()) {
        std::vector<std::string> continuation =
            translator.translate(window(words, j), log.target);
        if (continuation.empty()) {
          ++log.forced_reads;
          ++j;
          continue;
        }
        close_chunk();
        open_chunk = ChunkRecord{};
        open_chunk.src_begin = log.chunks.empty() ? 0 : log.chunks.back().src_end;
        open_chunk.src_end = j;
        open_chunk.tgt_begin = log.target.size();
        chunk_open = true;
        cache.assign(continuation.begin(), continuation.end());
      }
      log.target.push_back(cache.front());
      log.reads.push_back(j);
      cache.pop_front();
      ++j;
    }

    // Source exhausted: flush the cache, then complete the translation.
    while (!cache.empty()) {
      log.target.push_back(cache.front());
      log.reads.push_back(n);
      cache.pop_front();
    }
    close_chunk();
    std::vector<std::string> continuation = translator.translate(words, log.target);
    if (!continuation.empty()) {
      ChunkRecord chunk;
      chunk.src_begin = log.chunks.empty() ? 0 : log.chunks.back().src_end;
      chunk.src_end = n;
      chunk.tgt_begin = log.target.size();
      for (std::string& token : continuation) {
        log.target.push_back(std::move(token));
        log.reads.push_back(n);
      }
      chunk.tgt_end = log.target.size();
      log.chunks.push_back(chunk);
    } else if (!log.chunks.empty() && log.chunks.back().src_end < n) {
      log.chunks.back().src_end = n;
    }
  } catch (const TranslatorError& e) {
    close_chunk();
    log.failed = true;
    log.error = e.what();
  }
  return log;
}

nlohmann::json policy_to_json(const PolicyConfig& policy) {
  nlohmann::json j;
  if (const WaitK* p = std::get_if<WaitK>(&policy)) {
    j["type"] = "waitk";
    j["k"] = p->k;
  } else if (const FixedSize* p = std::get_if<FixedSize>(&policy)) {
    j["type"] = "fixed";
    j["size"] = p->size;
    j["unit"] = p->unit == SegmentUnit::Word ? "word" : "subword";
  } else {
    const RuleBased& r = std::get<RuleBased>(policy);
    j["type"] = "rule";
    j["boundary_labels"] = r.boundary_labels;
    j["min_len"] = r.min_len;
  }
  return j;
}

PolicyConfig policy_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw Error("policy must be an object with a \"type\" field");
  std::string type = j.at("type").get<std::string>();
  if (type == "waitk") {
    WaitK p;
    p.k = j.at("k").get<std::size_t>();
    return p;
  }
  if (type == "fixed") {
    FixedSize p;
    p.size = j.at("size").get<std::size_t>();
    if (j.contains("unit")) {
      std::string unit = j.at("unit").get<std::string>();
      if (unit == "word") p.unit = SegmentUnit::Word;
      else if (unit == "subword") p.unit = SegmentUnit::Subword;
      else throw Error("unknown segment unit: " + unit);
    }
    return p;
  }
  if (type == "rule") {
    RuleBased p;
    p.boundary_labels = j.at("boundary_labels").get<std::vector<std::string>>();
    p.min_len = j.value("min_len", std::size_t{1});
    return p;
  }
  throw Error("unknown policy type: " + type);
}

nlohmann::json session_to_json(const SessionLog& log) {
  nlohmann::json j;
  j["schema"] = 1;
  j["sentence_id"] = log.sentence_id;
  j["source"] = log.source;
  j["target"] = log.target;
  j["reads"] = log.reads;
  nlohmann::json chunks = nlohmann::json::array();
  for (const ChunkRecord& c : log.chunks) {
    chunks.push_back({{"src_begin", c.src_begin},
                      {"src_end", c.src_end},
                      {"tgt_begin", c.tgt_begin},
                      {"tgt_end", c.tgt_end}});
  }
  j["chunks"] = chunks;
  j["policy"] = policy_to_json(log.policy);
  j["failed"] = log.failed;
  if (log.failed) j["error"] = log.error;
  if (log.forced_reads > 0) j["forced_reads"] = log.forced_reads;
  return j;
}

SessionLog session_from_json(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1) throw Error("unsupported session schema");
  SessionLog log;
  log.sentence_id = j.at("sentence_id").get<std::string>();
  log.source = j.at("source").get<std::vector<std::string>>();
  log.target = j.at("target").get<std::vector<std::string>>();
  log.reads = j.at("reads").get<std::vector<std::size_t>>();
  for (const nlohmann::json& c : j.at("chunks")) {
    ChunkRecord chunk;
    chunk.src_begin = c.at("src_begin").get<std::size_t>();
    chunk.src_end = c.at("src_end").get<std::size_t>();
    chunk.tgt_begin = c.at("tgt_begin").get<std::size_t>();
    chunk.tgt_end = c.at("tgt_end").get<std::size_t>();
    log.chunks.push_back(chunk);
  }
  log.policy = policy_from_json(j.at("policy"));
  log.failed = j.value("failed", false);
  log.error = j.value("error", std::string());
  log.forced_reads = j.value("forced_reads", std::size_t{0});
  return log;
}

std::string sessions_to_jsonl(const std::vector<SessionLog>& logs) {
  std::string out;
  for (const SessionLog& log : logs) {
    out += session_to_json(log).dump();
    out += '\n';
  }
  return out;
}

std::vector<SessionLog> sessions_from_jsonl(const std::string& text) {
  std::vector<SessionLog> out;
  std::vector<std::string> lines = split_char(text, '\n');
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    try {
      out.push_back(session_from_json(nlohmann::json::parse(lines[ln])));
    } catch (const nlohmann::json::exception& e) {
      throw Error("session log line " + std::to_string(ln + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace simulseg
