#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.h"
#include "simulseg/metrics.h"
#include "simulseg/segmenter.h"
#include "simulseg/subword.h"

using namespace simulseg;

namespace {

SessionLog make_log(const std::vector<std::string>& source,
                    const std::vector<std::string>& target,
                    const std::vector<std::size_t>& reads,
                    const std::vector<ChunkRecord>& chunks = {}) {
  SessionLog log;
  log.sentence_id = "t";
  log.source = source;
  log.target = target;
  log.reads = reads;
  log.chunks = chunks;
  return log;
}

}  // namespace

TEST_CASE("average lagging of the two-chunk pen schedule is 13/6") {
  double al = average_lagging({2, 2, 5, 5, 5, 5}, 5);
  CHECK(al == doctest::Approx(13.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("wait-k over an echo-length target lags exactly k") {
  const std::size_t n = 10;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> g = waitk_read_schedule(k, n, n);
    CHECK(average_lagging(g, n) == doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
  }
}

TEST_CASE("when no step reads the whole source the window is the target length") {
  // tau falls back to |Y| = 2: (1/2) * ((1 - 0) + (2 - 1/0.4)) = 0.25.
  CHECK(average_lagging({1, 2}, 5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("a single-step schedule that reads everything lags the full source") {
  CHECK(average_lagging({4}, 4) == doctest::Approx(4.0));
  CHECK(average_lagging({3}, 3) == doctest::Approx(3.0));
}

TEST_CASE("average lagging rejects malformed schedules") {
  CHECK_THROWS_AS(average_lagging({}, 5), Error);
  CHECK_THROWS_AS(average_lagging({1, 2}, 0), Error);
  CHECK_THROWS_AS(average_lagging({0, 1}, 5), Error);
  CHECK_THROWS_AS(average_lagging({2, 6}, 5), Error);
  CHECK_THROWS_AS(average_lagging({3, 2}, 5), Error);
}

TEST_CASE("expanding reads to characters repeats each g per code point") {
  CHECK(expand_reads_to_characters({"ab", "c"}, {1, 2}) ==
        std::vector<std::size_t>{1, 1, 2});
  // Multibyte text counts code points, not bytes.
  CHECK(expand_reads_to_characters({"\xE6\x97\xA5\xE6\x9C\xAC", "go"}, {2, 3}) ==
        std::vector<std::size_t>{2, 2, 3, 3});
  CHECK_THROWS_AS(expand_reads_to_characters({"a"}, {1, 2}), Error);
}

TEST_CASE("character-level lagging of the wait-2 pen session is 1.25") {
  std::vector<std::string> target =
      fixtures::words("watashi wa katta pen wo .");
  std::vector<std::size_t> g =
      expand_reads_to_characters(target, {2, 3, 4, 5, 5, 5});
  REQUIRE(g.size() == 20);
  CHECK(average_lagging(g, 5) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("latency report averages scored sessions and counts exclusions") {
  std::vector<SessionLog> logs;
  logs.push_back(make_log(fixtures::words("I bought a pen ."),
                          fixtures::words("watashi wa pen wo katta ."),
                          {2, 2, 5, 5, 5, 5}));
  logs.push_back(make_log(fixtures::words("I bought a pen ."),
                          fixtures::words("watashi wa katta pen wo ."),
                          {2, 3, 4, 5, 5, 5}));
  SessionLog failed = make_log({"x"}, {}, {});
  failed.failed = true;
  logs.push_back(failed);
  logs.push_back(make_log({"x", "y"}, {}, {}));  // produced nothing

  LatencyReport report = latency_report(logs, LatencyUnit::Word);
  CHECK(report.scored == 2);
  CHECK(report.excluded == 2);
  REQUIRE(report.per_sentence.size() == 2);
  CHECK(report.per_sentence[0] == doctest::Approx(13.0 / 6.0));
  CHECK(report.per_sentence[1] == doctest::Approx(2.25));
  CHECK(report.mean_al == doctest::Approx((13.0 / 6.0 + 2.25) / 2.0));

  LatencyReport chars = latency_report({logs[1]}, LatencyUnit::Character);
  CHECK(chars.scored == 1);
  CHECK(chars.mean_al == doctest::Approx(1.25));
}

TEST_CASE("an identical corpus scores 100 BLEU with unit precisions") {
  std::vector<std::vector<std::string>> corpus = {
      fixtures::words("watashi wa pen wo katta ."),
      fixtures::words("g_You v_can v_save g_time .")};
  QualityReport report = corpus_bleu(corpus, corpus);
  CHECK(report.bleu == doctest::Approx(100.0));
  for (double p : report.precisions) CHECK(p == doctest::Approx(1.0));
  CHECK(report.brevity_penalty == doctest::Approx(1.0));
  CHECK(report.hyp_ref_ratio == doctest::Approx(1.0));
  CHECK(report.hyp_len == 11);
  CHECK(report.ref_len == 11);
}

TEST_CASE("a reordered translation zeroes the unsmoothed score via 3-grams") {
  std::vector<std::vector<std::string>> hyp = {
      fixtures::words("watashi wa katta pen wo .")};
  std::vector<std::vector<std::string>> ref = {
      fixtures::words("watashi wa pen wo katta .")};
  QualityReport report = corpus_bleu(hyp, ref);
  CHECK(report.precisions[0] == doctest::Approx(1.0));
  CHECK(report.precisions[1] == doctest::Approx(0.4));
  CHECK(report.precisions[2] == doctest::Approx(0.0));
  CHECK(report.precisions[3] == doctest::Approx(0.0));
  CHECK(report.bleu == doctest::Approx(0.0));
  CHECK(report.brevity_penalty == doctest::Approx(1.0));

  QualityReport smoothed = corpus_bleu(hyp, ref, 4, TextUnit::Word, true);
  CHECK(smoothed.precisions[2] == doctest::Approx(0.01 / 4.0));
  CHECK(smoothed.precisions[3] == doctest::Approx(0.01 / 3.0));
  double expected = 100.0 * std::exp((std::log(1.0) + std::log(0.4) +
                                      std::log(0.01 / 4.0) + std::log(0.01 / 3.0)) /
                                     4.0);
  CHECK(smoothed.bleu == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("a short hypothesis pays the brevity penalty") {
  std::vector<std::vector<std::string>> hyp = {fixtures::words("a b c d")};
  std::vector<std::vector<std::string>> ref = {fixtures::words("a b c d e")};
  QualityReport report = corpus_bleu(hyp, ref);
  for (double p : report.precisions) CHECK(p == doctest::Approx(1.0));
  CHECK(report.brevity_penalty == doctest::Approx(std::exp(1.0 - 5.0 / 4.0)));
  CHECK(report.bleu == doctest::Approx(100.0 * std::exp(1.0 - 5.0 / 4.0)));

  std::vector<std::vector<std::string>> longer = {fixtures::words("a b c d e f")};
  CHECK(corpus_bleu(longer, ref).brevity_penalty == doctest::Approx(1.0));
}

TEST_CASE("an empty hypothesis scores zero even with smoothing") {
  std::vector<std::vector<std::string>> hyp = {{}};
  std::vector<std::vector<std::string>> ref = {{"a", "b"}};
  QualityReport report = corpus_bleu(hyp, ref, 4, TextUnit::Word, true);
  CHECK(report.bleu == doctest::Approx(0.0));
  CHECK(report.brevity_penalty == doctest::Approx(0.0));
  CHECK(report.hyp_len == 0);
}

TEST_CASE("character-level BLEU rewards the right letters in the wrong tokens") {
  std::vector<std::vector<std::string>> hyp = {{"ab"}};
  std::vector<std::vector<std::string>> ref = {{"a", "b"}};
  CHECK(corpus_bleu(hyp, ref, 2, TextUnit::Character).bleu ==
        doctest::Approx(100.0));
  CHECK(corpus_bleu(hyp, ref, 1, TextUnit::Word).bleu == doctest::Approx(0.0));
}

TEST_CASE("BLEU rejects malformed corpora") {
  std::vector<std::vector<std::string>> one = {{"a"}};
  std::vector<std::vector<std::string>> two = {{"a"}, {"b"}};
  CHECK_THROWS_AS(corpus_bleu(one, two), Error);
  CHECK_THROWS_AS(corpus_bleu({}, {}), Error);
  CHECK_THROWS_AS(corpus_bleu(one, one, 0), Error);
}

TEST_CASE("BLEU agrees with an independent recount on random corpora") {
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    std::vector<std::vector<std::string>> refs =
        fixtures::random_sentences(40, 1, 12, seed);
    std::vector<std::vector<std::string>> hyps =
        fixtures::random_sentences(40, 1, 12, seed + 100);
    // Mix in exact matches so high orders have nonzero mass.
    for (std::size_t i = 0; i < hyps.size(); i += 3) hyps[i] = refs[i];

    for (bool smooth : {false, true}) {
      for (TextUnit unit : {TextUnit::Word, TextUnit::Character}) {
        QualityReport got = corpus_bleu(hyps, refs, 4, unit, smooth);
        fixtures::ReferenceBleu want = fixtures::reference_bleu(
            hyps, refs, 4, unit == TextUnit::Character, smooth);
        CHECK(got.bleu == doctest::Approx(want.bleu).epsilon(1e-9));
        CHECK(got.brevity_penalty ==
              doctest::Approx(want.brevity_penalty).epsilon(1e-9));
        for (std::size_t n = 0; n < 4; ++n)
          CHECK(got.precisions[n] ==
                doctest::Approx(want.precisions[n]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("length ratio counts words or code points") {
  std::vector<std::vector<std::string>> hyp = {{"a", "b"}, {"c"}};
  std::vector<std::vector<std::string>> ref = {{"a"}, {"b"}};
  CHECK(length_ratio(hyp, ref) == doctest::Approx(1.5));
  CHECK(length_ratio({{"abc"}}, {{"ab"}}, TextUnit::Character) ==
        doctest::Approx(1.5));
  CHECK_THROWS_AS(length_ratio({{"a"}}, {{}}), Error);
  CHECK_THROWS_AS(length_ratio({{"a"}}, {{"a"}, {"b"}}), Error);
}

TEST_CASE("segment lengths come straight from chunk spans") {
  SessionLog log = make_log(fixtures::words("I bought a pen ."),
                            fixtures::words("watashi wa pen wo katta ."),
                            {2, 2, 5, 5, 5, 5},
                            {ChunkRecord{0, 1, 0, 2}, ChunkRecord{1, 5, 2, 6}});
  auto histogram = segment_length_distribution({log});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{1, 1}, {4, 1}});
}

TEST_CASE("a chunk that emitted nothing folds into the next one") {
  SessionLog log = make_log(fixtures::words("a b c d e"),
                            fixtures::words("x x x x x x"), {1, 1, 5, 5, 5, 5},
                            {ChunkRecord{0, 1, 0, 2}, ChunkRecord{1, 2, 2, 2},
                             ChunkRecord{2, 5, 2, 6}});
  auto histogram = segment_length_distribution({log});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{1, 1}, {4, 1}});
}

TEST_CASE("a trailing silent chunk folds back into the last audible one") {
  SessionLog log = make_log(fixtures::words("a b c d e"),
                            fixtures::words("x x x x"), {3, 3, 3, 3},
                            {ChunkRecord{0, 3, 0, 4}, ChunkRecord{3, 5, 4, 4}});
  auto histogram = segment_length_distribution({log});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{5, 1}});
}

TEST_CASE("a session whose chunks all stayed silent counts as one span") {
  SessionLog log = make_log(fixtures::words("a b c d"), {}, {},
                            {ChunkRecord{0, 2, 0, 0}, ChunkRecord{2, 4, 0, 0}});
  auto histogram = segment_length_distribution({log});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{4, 1}});
}

TEST_CASE("a log without chunk records still contributes its full length") {
  SessionLog log = make_log(fixtures::words("a b c"), fixtures::words("x"), {3});
  auto histogram = segment_length_distribution({log});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{3, 1}});
}

TEST_CASE("failed sessions stay out of the histogram and counts accumulate") {
  SessionLog ok = make_log({"a", "b"}, {"x"}, {2}, {ChunkRecord{0, 2, 0, 1}});
  SessionLog bad = ok;
  bad.failed = true;
  auto histogram = segment_length_distribution({ok, bad, ok});
  CHECK(histogram == std::map<std::size_t, std::size_t>{{2, 2}});
}

TEST_CASE("a merge table switches the histogram to subword units") {
  SessionLog log = make_log({"ab", "c"}, {"x"}, {2}, {ChunkRecord{0, 2, 0, 1}});
  MergeTable empty;
  CHECK(segment_length_distribution({log}, &empty) ==
        std::map<std::size_t, std::size_t>{{3, 1}});
  MergeTable merged = learn_merges({"ab", "ab"}, 1);
  CHECK(segment_length_distribution({log}, &merged) ==
        std::map<std::size_t, std::size_t>{{2, 1}});
}

TEST_CASE("the histogram serializes as a two-column csv") {
  std::map<std::size_t, std::size_t> histogram = {{1, 2}, {4, 1}};
  CHECK(histogram_to_csv(histogram) == "length,count\n1,2\n4,1\n");
  CHECK(histogram_to_csv({}) == "length,count\n");
}
