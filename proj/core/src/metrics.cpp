#include "fsumm/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "fsumm/errors.hpp"

namespace fsumm {
namespace {

// Clipped n-gram matches: each reference n-gram occurrence can absorb at
// most one hypothesis occurrence, so greedily pairing every hypothesis
// n-gram with any unused equal reference n-gram yields exactly
// sum over distinct n-grams of min(count in hyp, count in ref).
std::size_t clipped_matches(std::span<const std::string> hyp,
                            std::span<const std::string> ref, std::size_t n) {
  if (hyp.size() < n || ref.size() < n) return 0;
  const std::size_t h_spans = hyp.size() - n + 1;
  const std::size_t r_spans = ref.size() - n + 1;

  const auto grams_equal = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (hyp[i + k] != ref[j + k]) return false;
    }
    return true;
  };

  std::size_t matches = 0;
  if (r_spans <= 64) {
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < h_spans; ++i) {
      for (std::size_t j = 0; j < r_spans; ++j) {
        if (((used >> j) & 1u) == 0 && grams_equal(i, j)) {
          used |= std::uint64_t{1} << j;
          ++matches;
          break;
        }
      }
    }
  } else {
    std::vector<bool> used(r_spans, false);
    for (std::size_t i = 0; i < h_spans; ++i) {
      for (std::size_t j = 0; j < r_spans; ++j) {
        if (!used[j] && grams_equal(i, j)) {
          used[j] = true;
          ++matches;
          break;
        }
      }
    }
  }
  return matches;
}

}  // namespace

BleuScore sentence_bleu4_smoothed(std::span<const std::string> hyp,
                                  std::span<const std::string> ref) {
  if (ref.empty()) {
    throw Error(Errc::empty_reference, "reference has no tokens");
  }

  BleuScore s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();

  if (hyp.empty()) {
    // Nothing was produced: zero by definition, brevity penalty moot.
    s.precisions = {0.0, 0.0, 0.0, 0.0};
    s.brevity_penalty = 1.0;
    s.value = 0.0;
    return s;
  }

  for (std::size_t n = 1; n <= 4; ++n) {
    const std::size_t total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
    const std::size_t matched = clipped_matches(hyp, ref, n);
    if (n == 1) {
      s.precisions[0] = static_cast<double>(matched) / static_cast<double>(total);
    } else {
      s.precisions[n - 1] = (static_cast<double>(matched) + 1.0) /
                            (static_cast<double>(total) + 1.0);
    }
  }

  s.brevity_penalty =
      s.hyp_len > s.ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(s.ref_len) /
                               static_cast<double>(s.hyp_len));

  if (s.precisions[0] == 0.0) {
    s.value = 0.0;
    return s;
  }
  const double geo = std::pow(
      s.precisions[0] * s.precisions[1] * s.precisions[2] * s.precisions[3],
      0.25);
  s.value = 100.0 * s.brevity_penalty * geo;
  return s;
}

CorpusScore corpus_score(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) {
    throw Error(Errc::empty_batch, "no pairs to score");
  }
  CorpusScore cs;
  double sum = 0.0;
  for (const ScoredPair& p : pairs) {
    const BleuScore b = sentence_bleu4_smoothed(p.hyp_tokens, p.ref_tokens);
    sum += b.value;
    cs.per_sample[p.id] = b;
  }
  cs.n = pairs.size();
  cs.mean_bleu = sum / static_cast<double>(cs.n);
  return cs;
}

}  // namespace fsumm
