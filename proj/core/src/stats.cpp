#include "fsumm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "fsumm/errors.hpp"

namespace fsumm {

std::vector<double> exact_wplus_distribution(std::size_t n) {
  // Coefficients of prod_{r=1..n} (1 + x^r); counts fit a double exactly
  // for any n we ever use the exact path for (total mass 2^n).
  const std::size_t max_w = n * (n + 1) / 2;
  std::vector<double> counts(max_w + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t w = max_w; w >= r; --w) {
      counts[w] += counts[w - r];
    }
  }
  return counts;
}

WilcoxonResult wilcoxon_one_sided(std::span<const double> treatment,
                                  std::span<const double> control) {
  if (treatment.size() != control.size()) {
    throw Error(Errc::length_mismatch, "paired samples differ in length");
  }
  if (treatment.empty()) {
    throw Error(Errc::empty_batch, "no pairs to test");
  }

  std::vector<double> diffs;
  diffs.reserve(treatment.size());
  for (std::size_t i = 0; i < treatment.size(); ++i) {
    const double d = treatment[i] - control[i];
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult res;
  if (diffs.empty()) {
    res.all_zero_differences = true;
    res.p_value = 1.0;
    return res;
  }
  const std::size_t n = diffs.size();
  res.n_effective = n;

  // Rank |d| ascending with averaged ranks for ties.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });

  std::vector<double> rank(n, 0.0);
  bool has_ties = false;
  double tie_correction = 0.0;  // sum of t^3 - t over tie groups
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg_rank;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) {
      has_ties = true;
      tie_correction += t * t * t - t;
    }
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (diffs[k] > 0.0) w_plus += rank[k];
  }
  res.w_plus = w_plus;

  if (n <= 25 && !has_ties) {
    res.method = WilcoxonMethod::exact;
    // With no ties every rank is an integer, so w_plus is too.
    const auto counts = exact_wplus_distribution(n);
    const std::size_t w = static_cast<std::size_t>(std::llround(w_plus));
    double tail = 0.0;
    for (std::size_t v = w; v < counts.size(); ++v) tail += counts[v];
    res.p_value = tail / std::ldexp(1.0, static_cast<int>(n));
  } else {
    res.method = WilcoxonMethod::normal;
    const double dn = static_cast<double>(n);
    const double mu = dn * (dn + 1.0) / 4.0;
    const double var =
        dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_correction / 48.0;
    const double sigma = std::sqrt(var);
    const double z = (w_plus - mu - 0.5) / sigma;
    res.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
  }
  return res;
}

double improvement_pct(double baseline, double treatment) {
  if (baseline <= 0.0) {
    throw Error(Errc::nonpositive_baseline,
                "baseline must be positive to express a percent change");
  }
  return 100.0 * (treatment - baseline) / baseline;
}

}  // namespace fsumm
