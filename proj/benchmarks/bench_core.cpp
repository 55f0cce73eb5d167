#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fsumm/metrics.hpp"
#include "fsumm/prompt.hpp"
#include "fsumm/select.hpp"
#include "fsumm/sha256.hpp"
#include "fsumm/splitmix.hpp"
#include "fsumm/stats.hpp"

namespace {

std::vector<std::string> random_tokens(std::size_t n, std::uint64_t seed) {
  fsumm::Splitmix64 rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back("tok" + std::to_string(rng.next_below(50)));
  }
  return out;
}

void BM_SentenceBleu(benchmark::State& state) {
  const auto hyp = random_tokens(static_cast<std::size_t>(state.range(0)), 1);
  const auto ref = random_tokens(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsumm::sentence_bleu4_smoothed(hyp, ref));
  }
}
BENCHMARK(BM_SentenceBleu)->Arg(16)->Arg(64);

void BM_RenderPrompt(benchmark::State& state) {
  fsumm::ExemplarSet shots;
  fsumm::Splitmix64 rng(7);
  for (int i = 0; i < 10; ++i) {
    fsumm::CodeSample s;
    s.id = "ex-" + std::to_string(i);
    for (int w = 0; w < 120; ++w) {
      s.code_text += "word" + std::to_string(rng.next_below(1000)) + " ";
    }
    s.summary_text = "does a thing with inputs";
    shots.exemplars.push_back(std::move(s));
  }
  fsumm::CodeSample query;
  query.id = "q";
  query.code_text = shots.exemplars[0].code_text;
  const fsumm::PromptSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsumm::render_prompt(shots, query, spec));
  }
}
BENCHMARK(BM_RenderPrompt);

void BM_WilcoxonExactDistribution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsumm::exact_wplus_distribution(n));
  }
}
BENCHMARK(BM_WilcoxonExactDistribution)->Arg(10)->Arg(25);

void BM_Sha256(benchmark::State& state) {
  std::string text;
  fsumm::Splitmix64 rng(3);
  for (int i = 0; i < 4000; ++i) {
    text += static_cast<char>('a' + rng.next_below(26));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsumm::sha256_hex(text));
  }
}
BENCHMARK(BM_Sha256);

}  // namespace

BENCHMARK_MAIN();
