#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsumm {

enum class WilcoxonMethod {
  exact,   // full signed-rank distribution, small n without ties
  normal,  // normal approximation with tie correction and continuity
};

struct WilcoxonResult {
  double w_plus = 0.0;          // sum of ranks of positive differences
  std::size_t n_effective = 0;  // pairs remaining after dropping zero diffs
  double p_value = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
  bool all_zero_differences = false;
};

// One-sided paired Wilcoxon signed-rank test of H1: treatment > control.
// Zero differences are dropped; ties in |d| get averaged ranks. The exact
// distribution is used when n_effective <= 25 and |d| has no ties,
// otherwise the normal approximation with tie correction and a 0.5
// continuity correction. When every difference is zero the result carries
// p = 1.0 with all_zero_differences set rather than throwing.
// Throws LengthMismatch (Errc::length_mismatch) when spans differ in size
// and EmptyBatch (Errc::empty_batch) when they are empty.
WilcoxonResult wilcoxon_one_sided(std::span<const double> treatment,
                                  std::span<const double> control);

// Number of signed-rank assignments of {1..n} with rank-sum <= each value:
// entry [w] is the count of subsets of {1..n} summing to w. Exposed for
// direct verification of the exact path.
std::vector<double> exact_wplus_distribution(std::size_t n);

// Percent change from `baseline` to `treatment`:
// 100 * (treatment - baseline) / baseline.
// Throws NonpositiveBaseline (Errc::nonpositive_baseline) when baseline <= 0.
double improvement_pct(double baseline, double treatment);

}  // namespace fsumm
