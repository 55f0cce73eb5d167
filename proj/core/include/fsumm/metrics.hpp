#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fsumm {

struct BleuScore {
  double value = 0.0;  // 0..100 scale
  std::array<double, 4> precisions{};
  double brevity_penalty = 1.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

// Sentence-level BLEU-4 with add-one smoothing on the 2/3/4-gram
// precisions; unigram precision is left unsmoothed so an empty or fully
// disjoint hypothesis scores zero. Throws EmptyReference (Errc::empty_reference)
// when `ref` has no tokens; an empty hypothesis scores 0.
BleuScore sentence_bleu4_smoothed(std::span<const std::string> hyp,
                                  std::span<const std::string> ref);

struct ScoredPair {
  std::string id;
  std::vector<std::string> hyp_tokens;
  std::vector<std::string> ref_tokens;
};

struct CorpusScore {
  double mean_bleu = 0.0;
  std::map<std::string, BleuScore> per_sample;  // id -> sentence score
  std::size_t n = 0;
};

// Mean of sentence-level scores over the batch. Throws EmptyBatch
// (Errc::empty_batch) for an empty input and propagates EmptyReference.
CorpusScore corpus_score(const std::vector<ScoredPair>& pairs);

}  // namespace fsumm
