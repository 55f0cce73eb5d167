#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fsumm/corpus.hpp"
#include "fsumm/select.hpp"

namespace fsumm {

// Layout and sizing rules for few-shot prompts. The defaults are the
// contract every stored artifact was produced under; change them only
// together with the fixtures that depend on them.
struct PromptSpec {
  std::string open_marker = "<s>";
  std::string close_marker = "</s>";
  std::size_t token_budget = 4000;
};

// Estimated size of `text` in model tokens. Pluggable so tests can
// substitute a deliberately coarse or exact estimator.
using TokenEstimator = std::function<std::size_t(std::string_view)>;

// Default estimator: whitespace-delimited word count, floored at one
// token per four bytes so pathological unspaced blobs are not undercounted.
std::size_t estimate_tokens(std::string_view text);

struct RenderedPrompt {
  std::string text;
  std::string query_id;
  std::vector<std::string> exemplar_ids;  // in rendered order
  std::size_t estimated_tokens = 0;
};

// Renders exemplars (in the given order) followed by the query function,
// leaving the prompt open for the model to complete the summary.
// Throws BudgetExceededError when the estimate exceeds spec.token_budget.
RenderedPrompt render_prompt(const ExemplarSet& shots, const CodeSample& query,
                             const PromptSpec& spec,
                             const TokenEstimator& estimator = estimate_tokens);

enum class BudgetPolicy {
  error,              // over budget is a hard error
  drop_oldest_first,  // shed exemplars from the front until it fits
};

BudgetPolicy parse_budget_policy(std::string_view name);
std::string_view to_string(BudgetPolicy policy);

struct FittedPrompt {
  RenderedPrompt prompt;
  std::vector<std::string> dropped_ids;  // exemplars shed to fit, in drop order
};

// Renders within budget under the given policy. drop_oldest_first removes
// exemplars from the front of the set (the oldest under temporal ordering)
// until the rendered prompt fits; if even the zero-shot prompt is over
// budget this still throws BudgetExceededError.
FittedPrompt fit_to_budget(const ExemplarSet& shots, const CodeSample& query,
                           const PromptSpec& spec, BudgetPolicy policy,
                           const TokenEstimator& estimator = estimate_tokens);

}  // namespace fsumm
