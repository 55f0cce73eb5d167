#include "fsumm/prompt.hpp"

#include <algorithm>
#include <deque>

#include "fsumm/errors.hpp"
#include "fsumm/postproc.hpp"

namespace fsumm {

std::size_t estimate_tokens(std::string_view text) {
  const std::size_t words = whitespace_token_count(text);
  const std::size_t by_bytes = (text.size() + 3) / 4;
  return std::max(words, by_bytes);
}

BudgetPolicy parse_budget_policy(std::string_view name) {
  if (name == "error") return BudgetPolicy::error;
  if (name == "drop_oldest_first") return BudgetPolicy::drop_oldest_first;
  throw Error(Errc::config, "unknown budget policy: " + std::string(name));
}

std::string_view to_string(BudgetPolicy policy) {
  switch (policy) {
    case BudgetPolicy::error: return "error";
    case BudgetPolicy::drop_oldest_first: return "drop_oldest_first";
  }
  throw Error(Errc::config, "invalid budget policy value");
}

namespace {

void validate_spec(const PromptSpec& spec) {
  if (spec.open_marker.empty() || spec.close_marker.empty()) {
    throw Error(Errc::config, "prompt markers must be non-empty");
  }
  if (spec.open_marker == spec.close_marker) {
    throw Error(Errc::config, "open and close markers must differ");
  }
  if (spec.token_budget == 0) {
    throw Error(Errc::config, "token budget must be positive");
  }
}

std::string render_text(const std::vector<const CodeSample*>& exemplars,
                        const CodeSample& query, const PromptSpec& spec) {
  std::string out;
  for (const CodeSample* ex : exemplars) {
    out += ex->code_text;
    out += '\n';
    out += spec.open_marker;
    out += ' ';
    out += ex->summary_text;
    out += ' ';
    out += spec.close_marker;
    out += "\n\n";
  }
  out += query.code_text;
  out += '\n';
  out += spec.open_marker;
  return out;
}

RenderedPrompt render_unchecked(const std::vector<const CodeSample*>& exemplars,
                                const CodeSample& query, const PromptSpec& spec,
                                const TokenEstimator& estimator) {
  RenderedPrompt p;
  p.text = render_text(exemplars, query, spec);
  p.query_id = query.id;
  p.exemplar_ids.reserve(exemplars.size());
  for (const CodeSample* ex : exemplars) p.exemplar_ids.push_back(ex->id);
  p.estimated_tokens = estimator(p.text);
  return p;
}

}  // namespace

RenderedPrompt render_prompt(const ExemplarSet& shots, const CodeSample& query,
                             const PromptSpec& spec,
                             const TokenEstimator& estimator) {
  validate_spec(spec);
  std::vector<const CodeSample*> ptrs;
  ptrs.reserve(shots.exemplars.size());
  for (const CodeSample& s : shots.exemplars) ptrs.push_back(&s);
  RenderedPrompt p = render_unchecked(ptrs, query, spec, estimator);
  if (p.estimated_tokens > spec.token_budget) {
    throw BudgetExceededError(p.estimated_tokens, spec.token_budget);
  }
  return p;
}

FittedPrompt fit_to_budget(const ExemplarSet& shots, const CodeSample& query,
                           const PromptSpec& spec, BudgetPolicy policy,
                           const TokenEstimator& estimator) {
  validate_spec(spec);
  if (policy == BudgetPolicy::error) {
    return FittedPrompt{render_prompt(shots, query, spec, estimator), {}};
  }

  std::deque<const CodeSample*> keep;
  for (const CodeSample& s : shots.exemplars) keep.push_back(&s);

  FittedPrompt fitted;
  for (;;) {
    std::vector<const CodeSample*> ptrs(keep.begin(), keep.end());
    RenderedPrompt p = render_unchecked(ptrs, query, spec, estimator);
    if (p.estimated_tokens <= spec.token_budget) {
      fitted.prompt = std::move(p);
      return fitted;
    }
    if (keep.empty()) {
      throw BudgetExceededError(p.estimated_tokens, spec.token_budget);
    }
    fitted.dropped_ids.push_back(keep.front()->id);
    keep.pop_front();
  }
}

}  // namespace fsumm
