#include "fsumm/select.hpp"

#include <algorithm>
#include <tuple>

#include "fsumm/errors.hpp"
#include "fsumm/splitmix.hpp"

namespace fsumm {

Strategy parse_strategy(std::string_view name) {
  if (name == "cross_project_random") return Strategy::cross_project_random;
  if (name == "same_project_temporal") return Strategy::same_project_temporal;
  throw Error(Errc::config, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::cross_project_random ? "cross_project_random"
                                                    : "same_project_temporal";
}

std::vector<std::string> ExemplarSet::ids() const {
  std::vector<std::string> out;
  out.reserve(exemplars.size());
  for (const auto& e : exemplars) out.push_back(e.id);
  return out;
}

ExemplarSet select_cross_project(const Corpus& train,
                                 const ShotConfig& config) {
  if (config.n_shots > train.size()) {
    throw Error(Errc::not_enough_exemplars,
                "requested " + std::to_string(config.n_shots) +
                    " exemplars from a training corpus of " +
                    std::to_string(train.size()));
  }
  std::vector<std::size_t> indices(train.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Splitmix64 rng(config.seed);
  for (std::size_t i = 0; i < config.n_shots; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }

  ExemplarSet set;
  set.strategy_used = Strategy::cross_project_random;
  set.exemplars.reserve(config.n_shots);
  for (std::size_t i = 0; i < config.n_shots; ++i) {
    set.exemplars.push_back(train.samples[indices[i]]);
  }
  return set;
}

ExemplarSet select_same_project(const Corpus& pool, const CodeSample& query,
                                const ShotConfig& config) {
  if (!query.created_at) throw MissingTimestampError(query.id);

  std::vector<const CodeSample*> candidates;
  for (const auto& s : pool.samples) {
    if (s.project != query.project || s.id == query.id) continue;
    if (!s.created_at) throw MissingTimestampError(s.id);
    candidates.push_back(&s);
  }

  std::vector<const CodeSample*> earlier;
  for (const CodeSample* s : candidates) {
    if (*s->created_at < *query.created_at) earlier.push_back(s);
  }
  if (earlier.size() < config.n_shots) {
    throw InsufficientHistoryError(earlier.size(), config.n_shots);
  }

  std::sort(earlier.begin(), earlier.end(),
            [](const CodeSample* a, const CodeSample* b) {
              return std::tie(*a->created_at, a->id) <
                     std::tie(*b->created_at, b->id);
            });

  ExemplarSet set;
  set.strategy_used = Strategy::same_project_temporal;
  set.query_id = query.id;
  set.exemplars.reserve(config.n_shots);
  for (std::size_t i = earlier.size() - config.n_shots; i < earlier.size();
       ++i) {
    set.exemplars.push_back(*earlier[i]);
  }
  return set;
}

std::uint64_t per_query_seed(std::uint64_t base_seed,
                             std::string_view query_id) {
  return base_seed ^ fnv1a64(query_id);
}

}  // namespace fsumm
