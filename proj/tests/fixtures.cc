#include "fixtures.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>

#include "simulseg/util.h"

namespace simulseg::fixtures {

const char* kSaveTimeTree =
    "(S (NP (PRP You))"
    " (VP (MD can)"
    "  (VP (VB save)"
    "   (NP (NN time))"
    "   (PP (IN by)"
    "    (S (VP (VBG doing) (NP (DT this)))))))"
    " (. .))";

const char* kPenTree =
    "(S (NP (PRP I)) (VP (VBD bought) (NP (DT a) (NN pen))) (. .))";

const char* kToyDictionaryTsv =
    "I\tother\twatashi wa\n"
    "bought\tverb\tkatta\n"
    "a\tother\t\n"
    "pen\tother\tpen wo\n"
    ".\tpunct\t.\n";

GlossDictionary toy_dictionary() {
  return GlossDictionary::from_tsv_text(kToyDictionaryTsv);
}

ParseTree parse_single_tree(const std::string& text) {
  ParsedTreebank bank = parse_trees(text);
  if (bank.trees.size() != 1)
    throw Error("expected exactly one tree in fixture text");
  return std::move(bank.trees.front());
}

namespace {

const std::vector<std::string> kPronouns = {"You", "He", "She", "We", "They"};
const std::vector<std::string> kNouns = {"man",  "dog",  "book", "garden",
                                         "idea", "car",  "pen",  "letter",
                                         "song", "time"};
const std::vector<std::string> kPastVerbs = {"bought", "saw", "liked", "made",
                                             "found"};
const std::vector<std::string> kModals = {"can", "may", "will"};
const std::vector<std::string> kBaseVerbs = {"save", "buy", "read", "find",
                                             "keep"};
const std::vector<std::string> kGerunds = {"doing", "reading", "walking",
                                           "singing"};
const std::vector<std::string> kAdjectives = {"old", "red", "quick", "small"};
const std::vector<std::string> kPlainPreps = {"with", "near"};

const std::string& pick(const std::vector<std::string>& pool, std::mt19937& gen) {
  return pool[gen() % pool.size()];
}

std::string noun_phrase(std::mt19937& gen, bool allow_adjective) {
  std::uint32_t shape = gen() % 3;
  if (shape == 0) return "(NP (PRP " + pick(kPronouns, gen) + "))";
  if (shape == 1 || !allow_adjective)
    return "(NP (DT the) (NN " + pick(kNouns, gen) + "))";
  // After "the" the next word is an adjective or a noun at even odds, so a
  // prefix ending at "the" cannot decide between JJ and NN.
  return "(NP (DT the) (JJ " + pick(kAdjectives, gen) + ") (NN " +
         pick(kNouns, gen) + "))";
}

std::string object_phrase(std::mt19937& gen) {
  if (gen() % 2 == 0) return "(NP (DT a) (NN " + pick(kNouns, gen) + "))";
  return noun_phrase(gen, true);
}

// What follows "by" is a gerund clause or a plain noun phrase at even odds,
// so a prefix ending at "by" cannot decide between S and NP.
std::string by_phrase(std::mt19937& gen) {
  if (gen() % 2 == 0)
    return "(PP (IN by) (S (VP (VBG " + pick(kGerunds, gen) + ") " +
           object_phrase(gen) + ")))";
  return "(PP (IN by) " + noun_phrase(gen, false) + ")";
}

// What follows an object noun is sentence-final punctuation, a "by" phrase,
// a plain prepositional phrase, or an adverb, so a prefix ending at the
// noun cannot decide among ".", PP, and ADVP.
std::string tail(std::mt19937& gen) {
  std::uint32_t shape = gen() % 4;
  if (shape == 0) return "";
  if (shape == 1) return " " + by_phrase(gen);
  if (shape == 2)
    return " (PP (IN " + pick(kPlainPreps, gen) + ") " + noun_phrase(gen, false) +
           ")";
  return " (ADVP (RB " + std::string(gen() % 2 == 0 ? "quickly" : "slowly") +
         "))";
}

std::string predicate(std::mt19937& gen) {
  if (gen() % 2 == 0)
    return "(VP (VBD " + pick(kPastVerbs, gen) + ") " + object_phrase(gen) +
           tail(gen) + ")";
  return "(VP (MD " + pick(kModals, gen) + ") (VP (VB " + pick(kBaseVerbs, gen) +
         ") " + object_phrase(gen) + tail(gen) + "))";
}

std::string sentence_tree(std::mt19937& gen) {
  std::string opener;
  if (gen() % 4 == 0)
    opener = "(PP (IN in) " + noun_phrase(gen, false) + ") (, ,) ";
  return "(S " + opener + noun_phrase(gen, true) + " " + predicate(gen) +
         " (. .))";
}

}  // namespace

std::string fixture_treebank(std::size_t sentence_count, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::string out;
  for (std::size_t i = 0; i < sentence_count; ++i) {
    out += sentence_tree(gen);
    out += '\n';
  }
  return out;
}

GlossDictionary fixture_dictionary() {
  GlossDictionary dict;
  auto add_all = [&](const std::vector<std::string>& pool,
                     const std::string& prefix, WordCategory category) {
    for (const std::string& word : pool)
      dict.add(word, category, {prefix + word});
  };
  add_all(kPronouns, "g_", WordCategory::Other);
  add_all(kNouns, "g_", WordCategory::Other);
  add_all(kAdjectives, "g_", WordCategory::Other);
  add_all(kPlainPreps, "g_", WordCategory::Other);
  add_all(kPastVerbs, "v_", WordCategory::Verb);
  add_all(kModals, "v_", WordCategory::Verb);
  add_all(kBaseVerbs, "v_", WordCategory::Verb);
  add_all(kGerunds, "v_", WordCategory::Verb);
  dict.add("by", WordCategory::Other, {"g_by"});
  dict.add("in", WordCategory::Other, {"g_in"});
  dict.add("quickly", WordCategory::Other, {"g_quickly"});
  dict.add("slowly", WordCategory::Other, {"g_slowly"});
  dict.add("the", WordCategory::Other, {});
  dict.add("a", WordCategory::Other, {});
  dict.add("this", WordCategory::Other, {"g_this"});
  dict.add(".", WordCategory::Punct, {"."});
  dict.add(",", WordCategory::Punct, {","});
  return dict;
}

std::vector<std::vector<std::string>> random_sentences(std::size_t count,
                                                       std::size_t min_len,
                                                       std::size_t max_len,
                                                       std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<std::string> vocab;
  for (char c = 'a'; c <= 't'; ++c) vocab.push_back(std::string("tok") + c);
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t len = min_len + gen() % (max_len - min_len + 1);
    std::vector<std::string> sentence;
    for (std::size_t w = 0; w < len; ++w) sentence.push_back(pick(vocab, gen));
    out.push_back(std::move(sentence));
  }
  return out;
}

std::vector<std::string> words(const std::string& space_joined) {
  return split_ws(space_joined);
}

namespace {

std::vector<std::string> bleu_units(const std::vector<std::string>& tokens,
                                    bool char_unit) {
  if (!char_unit) return tokens;
  std::vector<std::string> out;
  for (const std::string& token : tokens) {
    std::size_t i = 0;
    while (i < token.size()) {
      unsigned char lead = static_cast<unsigned char>(token[i]);
      std::size_t width = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2
                                        : (lead >> 4) == 0xe  ? 3
                                                              : 4;
      out.push_back(token.substr(i, width));
      i += width;
    }
  }
  return out;
}

bool same_ngram(const std::vector<std::string>& a, std::size_t i,
                const std::vector<std::string>& b, std::size_t j, std::size_t n) {
  for (std::size_t w = 0; w < n; ++w)
    if (a[i + w] != b[j + w]) return false;
  return true;
}

std::size_t occurrences(const std::vector<std::string>& pattern, std::size_t at,
                        std::size_t n, const std::vector<std::string>& in) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + n <= in.size(); ++i)
    if (same_ngram(pattern, at, in, i, n)) ++count;
  return count;
}

}  // namespace

ReferenceBleu reference_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                             const std::vector<std::vector<std::string>>& references,
                             std::size_t max_n, bool char_unit, bool smooth) {
  std::vector<double> match(max_n, 0.0);
  std::vector<double> total(max_n, 0.0);
  double hyp_len = 0.0;
  double ref_len = 0.0;

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    std::vector<std::string> hyp = bleu_units(hypotheses[s], char_unit);
    std::vector<std::string> ref = bleu_units(references[s], char_unit);
    hyp_len += static_cast<double>(hyp.size());
    ref_len += static_cast<double>(ref.size());
    for (std::size_t n = 1; n <= max_n; ++n) {
      if (hyp.size() < n) continue;
      total[n - 1] += static_cast<double>(hyp.size() - n + 1);
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        bool seen_before = false;
        for (std::size_t j = 0; j < i && !seen_before; ++j)
          seen_before = same_ngram(hyp, i, hyp, j, n);
        if (seen_before) continue;
        double in_hyp = static_cast<double>(occurrences(hyp, i, n, hyp));
        double in_ref = static_cast<double>(occurrences(hyp, i, n, ref));
        match[n - 1] += std::min(in_hyp, in_ref);
      }
    }
  }

  ReferenceBleu out;
  out.precisions.assign(max_n, 0.0);
  double product = 1.0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    double p = 0.0;
    if (total[n - 1] > 0.0 && match[n - 1] > 0.0) {
      p = match[n - 1] / total[n - 1];
    } else if (total[n - 1] > 0.0 && smooth) {
      p = 0.01 / total[n - 1];
    }
    out.precisions[n - 1] = p;
    if (p <= 0.0) zero = true;
    product *= p;
  }
  if (hyp_len == 0.0) {
    out.brevity_penalty = 0.0;
  } else if (hyp_len >= ref_len) {
    out.brevity_penalty = 1.0;
  } else {
    out.brevity_penalty = std::exp(1.0 - ref_len / hyp_len);
  }
  out.bleu = zero ? 0.0
                  : 100.0 * out.brevity_penalty *
                        std::pow(product, 1.0 / static_cast<double>(max_n));
  return out;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("simulseg-" + tag + "-" +
                               std::to_string(::getpid()) + "-" +
                               std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  path = dir.string();
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (std::filesystem::path(path) / name).string();
}

}  // namespace simulseg::fixtures
