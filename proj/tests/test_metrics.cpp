#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fsumm/errors.hpp"
#include "fsumm/metrics.hpp"

using namespace fsumm;

namespace {

// ---------------------------------------------------------------------
// Independent oracle: counts clipped n-gram matches per distinct n-gram
// (first-occurrence scan + min of occurrence counts), then applies the
// declared formula. Structurally unlike the library's greedy pairing.
// ---------------------------------------------------------------------

bool gram_eq(const std::vector<std::string>& a, std::size_t i,
             const std::vector<std::string>& b, std::size_t j, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (a[i + k] != b[j + k]) return false;
  }
  return true;
}

std::size_t oracle_matches(const std::vector<std::string>& hyp,
                           const std::vector<std::string>& ref,
                           std::size_t n) {
  if (hyp.size() < n) return 0;
  const std::size_t H = hyp.size() - n + 1;
  const std::size_t R = ref.size() >= n ? ref.size() - n + 1 : 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < H; ++i) {
    bool first = true;
    for (std::size_t k = 0; k < i; ++k) {
      if (gram_eq(hyp, k, hyp, i, n)) {
        first = false;
        break;
      }
    }
    if (!first) continue;
    std::size_t in_hyp = 0;
    for (std::size_t k = i; k < H; ++k) {
      if (gram_eq(hyp, i, hyp, k, n)) ++in_hyp;
    }
    std::size_t in_ref = 0;
    for (std::size_t j = 0; j < R; ++j) {
      if (gram_eq(hyp, i, ref, j, n)) ++in_ref;
    }
    total += std::min(in_hyp, in_ref);
  }
  return total;
}

double oracle_bleu(const std::vector<std::string>& hyp,
                   const std::vector<std::string>& ref) {
  if (hyp.empty()) return 0.0;
  double p[4];
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::size_t total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
    const std::size_t matched = oracle_matches(hyp, ref, n);
    if (n == 1) {
      p[0] = static_cast<double>(matched) / static_cast<double>(total);
    } else {
      p[n - 1] = (static_cast<double>(matched) + 1.0) /
                 (static_cast<double>(total) + 1.0);
    }
  }
  const double bp = hyp.size() > ref.size()
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref.size()) /
                                             static_cast<double>(hyp.size()));
  if (p[0] == 0.0) return 0.0;
  const double geo = std::pow(p[0] * p[1] * p[2] * p[3], 0.25);
  return 100.0 * bp * geo;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t len,
                                       std::size_t vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back("w" + std::to_string(rng() % vocab));
  }
  return out;
}

}  // namespace

TEST_CASE("identity scores exactly 100") {
  const std::vector<std::string> toks = {"a", "b", "c", "d"};
  const BleuScore s = sentence_bleu4_smoothed(toks, toks);
  CHECK(s.value == 100.0);
  CHECK(s.brevity_penalty == 1.0);
  for (double p : s.precisions) CHECK(p == 1.0);
}

TEST_CASE("empty hypothesis scores zero with unit brevity penalty") {
  const std::vector<std::string> ref = {"a", "b"};
  const BleuScore s = sentence_bleu4_smoothed({}, ref);
  CHECK(s.value == 0.0);
  CHECK(s.brevity_penalty == 1.0);
  CHECK(s.hyp_len == 0);
  CHECK(s.ref_len == 2);
  for (double p : s.precisions) CHECK(p == 0.0);
}

TEST_CASE("hand-derived smoothing case scores 50.0") {
  const std::vector<std::string> hyp = {"a", "b", "x", "d"};
  const std::vector<std::string> ref = {"a", "b", "c", "d"};
  const BleuScore s = sentence_bleu4_smoothed(hyp, ref);
  CHECK(s.precisions[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.precisions[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.precisions[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.precisions[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.brevity_penalty == 1.0);
  CHECK(std::abs(s.value - 50.0) <= 1e-9);
}

TEST_CASE("empty reference is an error") {
  const std::vector<std::string> hyp = {"a"};
  try {
    sentence_bleu4_smoothed(hyp, {});
    FAIL("expected empty_reference");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_reference);
  }
}

TEST_CASE("fully disjoint hypothesis scores zero") {
  const std::vector<std::string> hyp = {"x", "y", "z"};
  const std::vector<std::string> ref = {"a", "b", "c"};
  const BleuScore s = sentence_bleu4_smoothed(hyp, ref);
  CHECK(s.value == 0.0);
  CHECK(s.precisions[0] == 0.0);
}

TEST_CASE("exhaustive 3-symbol oracle equality, lengths <= 6") {
  // All hyp/ref token sequences over {a,b,c} with lengths 0..6 (ref >= 1).
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::string>> seqs;
  seqs.push_back({});
  for (std::size_t len = 1; len <= 6; ++len) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= 3;
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<std::string> seq;
      std::size_t c = code;
      for (std::size_t i = 0; i < len; ++i) {
        seq.push_back(alphabet[c % 3]);
        c /= 3;
      }
      seqs.push_back(std::move(seq));
    }
  }
  REQUIRE(seqs.size() == 1093);

  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (const auto& hyp : seqs) {
    for (const auto& ref : seqs) {
      if (ref.empty()) continue;
      const BleuScore got = sentence_bleu4_smoothed(hyp, ref);
      const double want = oracle_bleu(hyp, ref);
      if (got.value != want) {
        CAPTURE(hyp.size());
        CAPTURE(ref.size());
        REQUIRE(got.value == want);
      }
      ++checked;
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  CHECK(checked == 1093u * 1092u);
  std::printf("exhaustive oracle: %zu pairs in %lld ms\n", checked,
              static_cast<long long>(elapsed));
}

TEST_CASE("fuzz: range, identity characterization, renaming invariance") {
  std::mt19937_64 rng(31337);
  for (int round = 0; round < 3000; ++round) {
    const auto hyp = random_tokens(rng, rng() % 12, 5);
    const auto ref = random_tokens(rng, 1 + rng() % 12, 5);
    const BleuScore s = sentence_bleu4_smoothed(hyp, ref);
    CHECK(s.value >= 0.0);
    CHECK(s.value <= 100.0);
    if (hyp == ref) {
      CHECK(s.value == 100.0);
    } else {
      CHECK(s.value < 100.0);
    }

    // Consistent bijective renaming leaves the score unchanged.
    auto rename = [](std::vector<std::string> toks) {
      for (auto& t : toks) t = "renamed_" + t;
      return toks;
    };
    const BleuScore r = sentence_bleu4_smoothed(rename(hyp), rename(ref));
    CHECK(r.value == s.value);
  }
}

TEST_CASE("brevity penalty grows with hypothesis length up to ref length") {
  const std::vector<std::string> ref = {"t1", "t2", "t3", "t4", "t5",
                                        "t6", "t7", "t8", "t9", "t10"};
  double prev_bp = 0.0;
  for (std::size_t h = 1; h <= 10; ++h) {
    const std::vector<std::string> hyp(ref.begin(), ref.begin() + h);
    const BleuScore s = sentence_bleu4_smoothed(hyp, ref);
    CHECK(s.brevity_penalty >= prev_bp);
    CHECK(s.brevity_penalty <= 1.0);
    prev_bp = s.brevity_penalty;
  }
  CHECK(prev_bp == 1.0);  // full-length prefix reaches bp = 1
}

TEST_CASE("corpus score: single, arithmetic mean, oracle mean") {
  const std::vector<std::string> ref = {"a", "b", "c", "d"};
  const CorpusScore one = corpus_score({{"s1", ref, ref}});
  CHECK(one.mean_bleu == 100.0);
  CHECK(one.n == 1);
  REQUIRE(one.per_sample.count("s1") == 1);

  const CorpusScore two =
      corpus_score({{"hit", ref, ref}, {"miss", {"z", "z"}, ref}});
  CHECK(two.mean_bleu == doctest::Approx(50.0).epsilon(1e-12));

  std::mt19937_64 rng(55);
  std::vector<ScoredPair> pairs;
  double oracle_sum = 0.0;
  for (int i = 0; i < 200; ++i) {
    ScoredPair p;
    p.id = "p" + std::to_string(i);
    p.hyp_tokens = random_tokens(rng, rng() % 10, 4);
    p.ref_tokens = random_tokens(rng, 1 + rng() % 10, 4);
    oracle_sum += oracle_bleu(p.hyp_tokens, p.ref_tokens);
    pairs.push_back(std::move(p));
  }
  const CorpusScore cs = corpus_score(pairs);
  CHECK(cs.n == 200);
  CHECK(cs.mean_bleu ==
        doctest::Approx(oracle_sum / 200.0).epsilon(1e-9));
}

TEST_CASE("empty batch is an error") {
  try {
    corpus_score({});
    FAIL("expected empty_batch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_batch);
  }
}
