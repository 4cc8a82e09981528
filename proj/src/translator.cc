#include "simulseg/translator.h"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <csignal>
#include <mutex>
#include <optional>

namespace simulseg {

std::vector<std::string> EchoTranslator::translate(
    const std::vector<std::string>& source,
    const std::vector<std::string>& forced_prefix) {
  if (forced_prefix.size() > source.size())
    throw AmbiguousPrefixError("echo prefix longer than source");
  for (std::size_t i = 0; i < forced_prefix.size(); ++i) {
    if (forced_prefix[i] != source[i])
      throw AmbiguousPrefixError("echo prefix diverges from source at token " +
                                 std::to_string(i + 1));
  }
  return {source.begin() + static_cast<std::ptrdiff_t>(forced_prefix.size()),
          source.end()};
}

WordCategory word_category_from_string(const std::string& name) {
  if (name == "verb") return WordCategory::Verb;
  if (name == "other") return WordCategory::Other;
  if (name == "punct") return WordCategory::Punct;
  throw Error("unknown word category: " + name);
}

std::string word_category_to_string(WordCategory category) {
  switch (category) {
    case WordCategory::Verb: return "verb";
    case WordCategory::Other: return "other";
    case WordCategory::Punct: return "punct";
  }
  throw Error("bad word category value");
}

GlossDictionary GlossDictionary::from_tsv_text(const std::string& text) {
  GlossDictionary dict;
  std::vector<std::string> lines = split_char(text, '\n');
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_char(line, '\t');
    if (fields.size() != 3)
      throw Error("dictionary line " + std::to_string(ln + 1) +
                  ": expected 3 tab-separated fields");
    if (fields[0].empty())
      throw Error("dictionary line " + std::to_string(ln + 1) + ": empty source word");
    dict.add(fields[0], word_category_from_string(fields[1]), split_ws(fields[2]));
  }
  return dict;
}

GlossDictionary GlossDictionary::from_tsv_file(const std::string& path) {
  return from_tsv_text(read_text_file(path));
}

void GlossDictionary::add(const std::string& word, WordCategory category,
                          std::vector<std::string> gloss) {
  entries_[word] = GlossEntry{std::move(gloss), category};
}

bool GlossDictionary::contains(const std::string& word) const {
  return entries_.count(word) > 0;
}

const GlossEntry& GlossDictionary::lookup(const std::string& word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    throw TranslatorError("word missing from dictionary: " + word);
  return it->second;
}

std::string GlossDictionary::to_tsv_text() const {
  std::string out;
  for (const auto& [word, entry] : entries_) {
    out += word;
    out += '\t';
    out += word_category_to_string(entry.category);
    out += '\t';
    out += join(entry.gloss, " ");
    out += '\n';
  }
  return out;
}

SovToyTranslator::SovToyTranslator(GlossDictionary dictionary)
    : dict_(std::move(dictionary)) {}

namespace {

struct SourceWordState {
  const GlossEntry* entry = nullptr;
  bool consumed = false;
};

// Indices of the source words in ideal target order: non-verbs first, then
// verbs, then punctuation, each group in source order.
std::vector<std::size_t> ideal_order(const std::vector<SourceWordState>& words) {
  std::vector<std::size_t> order;
  order.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].entry->category == WordCategory::Other) order.push_back(i);
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].entry->category == WordCategory::Verb) order.push_back(i);
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].entry->category == WordCategory::Punct) order.push_back(i);
  return order;
}

// Empty-gloss words vanish from the target; treat one as consumed as soon
// as every earlier non-verb source word has been consumed.
void consume_free_words(std::vector<SourceWordState>& words) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i].consumed || !words[i].entry->gloss.empty()) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (words[j].entry->category != WordCategory::Verb && !words[j].consumed) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        words[i].consumed = true;
        changed = true;
      }
    }
  }
}

bool gloss_matches_at(const std::vector<std::string>& prefix, std::size_t pos,
                      const std::vector<std::string>& gloss) {
  if (pos + gloss.size() > prefix.size()) return false;
  for (std::size_t i = 0; i < gloss.size(); ++i) {
    if (prefix[pos + i] != gloss[i]) return false;
  }
  return true;
}

// True when the remainder of the prefix is a proper prefix of the gloss.
bool gloss_starts_with_rest(const std::vector<std::string>& prefix, std::size_t pos,
                            const std::vector<std::string>& gloss) {
  std::size_t rest = prefix.size() - pos;
  if (rest == 0 || rest >= gloss.size()) return false;
  for (std::size_t i = 0; i < rest; ++i) {
    if (prefix[pos + i] != gloss[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> SovToyTranslator::translate(
    const std::vector<std::string>& source,
    const std::vector<std::string>& forced_prefix) {
  std::vector<SourceWordState> words(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    words[i].entry = &dict_.lookup(source[i]);
  }
  std::vector<std::size_t> order = ideal_order(words);

  // Align the forced prefix: whole glosses, earliest in ideal order first;
  // the prefix may end inside one gloss.
  std::size_t pos = 0;
  std::optional<std::pair<std::size_t, std::size_t>> partial;  // word idx, offset
  consume_free_words(words);
  while (pos < forced_prefix.size()) {
    bool advanced = false;
    for (std::size_t idx : order) {
      if (words[idx].consumed) continue;
      const std::vector<std::string>& gloss = words[idx].entry->gloss;
      if (gloss.empty()) continue;
      if (gloss_matches_at(forced_prefix, pos, gloss)) {
        words[idx].consumed = true;
        pos += gloss.size();
        consume_free_words(words);
        advanced = true;
        break;
      }
    }
    if (advanced) continue;
    for (std::size_t idx : order) {
      if (words[idx].consumed) continue;
      const std::vector<std::string>& gloss = words[idx].entry->gloss;
      if (gloss.empty()) continue;
      if (gloss_starts_with_rest(forced_prefix, pos, gloss)) {
        partial = {idx, forced_prefix.size() - pos};
        pos = forced_prefix.size();
        advanced = true;
        break;
      }
    }
    if (!advanced)
      throw AmbiguousPrefixError(
          "forced prefix token '" + forced_prefix[pos] +
          "' does not continue any available gloss (prefix position " +
          std::to_string(pos + 1) + ")");
  }

  std::vector<std::string> continuation;
  if (partial) {
    const std::vector<std::string>& gloss = words[partial->first].entry->gloss;
    continuation.insert(continuation.end(),
                        gloss.begin() + static_cast<std::ptrdiff_t>(partial->second),
                        gloss.end());
    words[partial->first].consumed = true;
    consume_free_words(words);
  }
  for (std::size_t idx : order) {
    if (words[idx].consumed) continue;
    const std::vector<std::string>& gloss = words[idx].entry->gloss;
    continuation.insert(continuation.end(), gloss.begin(), gloss.end());
    words[idx].consumed = true;
  }
  return continuation;
}

ExternalProcessTranslator::ExternalProcessTranslator(const std::string& command) {
  // A subprocess that exits must surface as a TranslatorError on the next
  // request, not end this process via SIGPIPE.
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw TranslatorError("pipe creation failed");

  pid_t pid = fork();
  if (pid < 0) throw TranslatorError("fork failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  to_child_ = fdopen(to_child[1], "w");
  from_child_ = fdopen(from_child[0], "r");
  child_pid_ = pid;
  if (to_child_ == nullptr || from_child_ == nullptr)
    throw TranslatorError("fdopen failed for translator subprocess");
}

ExternalProcessTranslator::~ExternalProcessTranslator() {
  if (to_child_ != nullptr) std::fclose(to_child_);
  if (from_child_ != nullptr) std::fclose(from_child_);
  if (child_pid_ > 0) {
    int status = 0;
    waitpid(static_cast<pid_t>(child_pid_), &status, 0);
  }
}

std::vector<std::string> ExternalProcessTranslator::translate(
    const std::vector<std::string>& source,
    const std::vector<std::string>& forced_prefix) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string request = std::to_string(next_id_);
  request += '\t';
  request += join(source, " ");
  request += '\t';
  request += join(forced_prefix, " ");
  request += '\n';
  if (std::fputs(request.c_str(), to_child_) == EOF || std::fflush(to_child_) != 0)
    throw TranslatorError("failed to send request to translator subprocess");

  std::string line;
  int c;
  while ((c = std::fgetc(from_child_)) != EOF && c != '\n') {
    line += static_cast<char>(c);
  }
  if (line.empty() && c == EOF)
    throw TranslatorError("translator subprocess closed its output");

  std::vector<std::string> fields = split_char(line, '\t');
  if (fields.size() != 2)
    throw TranslatorError("malformed translator response: " + line);
  if (fields[0] != std::to_string(next_id_))
    throw TranslatorError("translator response id mismatch: expected " +
                          std::to_string(next_id_) + ", got " + fields[0]);
  ++next_id_;
  return split_ws(fields[1]);
}

}  // namespace simulseg
