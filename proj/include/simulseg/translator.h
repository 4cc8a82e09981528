#pragma once

#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "simulseg/util.h"

namespace simulseg {

struct TranslatorError : Error {
  using Error::Error;
};

// The forced prefix cannot be aligned to the source glosses.
struct AmbiguousPrefixError : TranslatorError {
  using TranslatorError::TranslatorError;
};

// Incremental translation contract: given the currently available source
// tokens and the target tokens already committed, return the continuation.
// Implementations must be deterministic and must not mutate the prefix.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::vector<std::string> translate(
      const std::vector<std::string>& source,
      const std::vector<std::string>& forced_prefix) = 0;
};

// Emits the source tokens themselves; the prefix must be a token-for-token
// prefix of the source.
class EchoTranslator : public Translator {
 public:
  std::vector<std::string> translate(const std::vector<std::string>& source,
                                     const std::vector<std::string>& forced_prefix) override;
};

enum class WordCategory { Verb, Other, Punct };

WordCategory word_category_from_string(const std::string& name);
std::string word_category_to_string(WordCategory category);

struct GlossEntry {
  std::vector<std::string> gloss;  // may be empty (e.g. articles)
  WordCategory category = WordCategory::Other;
};

// Word-to-gloss dictionary, loaded from tab-separated lines:
// source_word <TAB> category <TAB> space-joined gloss (may be empty).
class GlossDictionary {
 public:
  static GlossDictionary from_tsv_text(const std::string& text);
  static GlossDictionary from_tsv_file(const std::string& path);

  void add(const std::string& word, WordCategory category,
           std::vector<std::string> gloss);
  bool contains(const std::string& word) const;
  const GlossEntry& lookup(const std::string& word) const;
  std::string to_tsv_text() const;

 private:
  std::map<std::string, GlossEntry> entries_;
};

// Deterministic head-final toy translator. The ideal target for the
// available source keeps non-verb glosses in source order, then verbs, then
// punctuation; the forced prefix is aligned greedily against whole glosses
// (earliest in ideal order first), a trailing partial gloss is completed at
// the start of the continuation, and empty-gloss words are consumed for
// free once every earlier non-verb source word is consumed.
class SovToyTranslator : public Translator {
 public:
  explicit SovToyTranslator(GlossDictionary dictionary);
  std::vector<std::string> translate(const std::vector<std::string>& source,
                                     const std::vector<std::string>& forced_prefix) override;

  const GlossDictionary& dictionary() const { return dict_; }

 private:
  GlossDictionary dict_;
};

// Bridges to a line-delimited subprocess protocol. Request:
//   id <TAB> space-joined source <TAB> space-joined prefix
// Response:
//   id <TAB> space-joined continuation
// The child is spawned once via /bin/sh and reused; calls are serialized.
class ExternalProcessTranslator : public Translator {
 public:
  explicit ExternalProcessTranslator(const std::string& command);
  ~ExternalProcessTranslator() override;

  ExternalProcessTranslator(const ExternalProcessTranslator&) = delete;
  ExternalProcessTranslator& operator=(const ExternalProcessTranslator&) = delete;

  std::vector<std::string> translate(const std::vector<std::string>& source,
                                     const std::vector<std::string>& forced_prefix) override;

 private:
  std::FILE* to_child_ = nullptr;
  std::FILE* from_child_ = nullptr;
  long child_pid_ = -1;
  std::size_t next_id_ = 1;
  std::mutex mutex_;
};

}  // namespace simulseg
