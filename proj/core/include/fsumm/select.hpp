#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsumm/corpus.hpp"

namespace fsumm {

enum class Strategy { cross_project_random, same_project_temporal };

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy);

struct ShotConfig {
  std::size_t n_shots = 10;
  Strategy strategy = Strategy::cross_project_random;
  std::uint64_t seed = 0;  // cross_project_random only
  bool resample_per_query = false;
};

// Few-shot exemplars in prompt presentation order.
struct ExemplarSet {
  std::vector<CodeSample> exemplars;
  Strategy strategy_used = Strategy::cross_project_random;
  std::optional<std::string> query_id;

  std::size_t size() const { return exemplars.size(); }
  std::vector<std::string> ids() const;
};

// One fixed draw per (train corpus, config): Fisher-Yates prefix of the
// index array under Splitmix64(seed), presentation order = draw order.
ExemplarSet select_cross_project(const Corpus& train, const ShotConfig& config);

// The n_shots most recent pool samples of the query's project with
// created_at strictly before the query's, presented oldest -> newest.
// Ties on created_at break by ascending id.
ExemplarSet select_same_project(const Corpus& pool, const CodeSample& query,
                                const ShotConfig& config);

// Seed for the --resample-per-query variant: base_seed XOR fnv1a64(query id).
std::uint64_t per_query_seed(std::uint64_t base_seed, std::string_view query_id);

}  // namespace fsumm
