#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chrg/grammar.hpp"

namespace chrg {

struct BenchConfig {
  std::vector<std::size_t> lengths;
  std::size_t samples = 5;
  std::vector<std::string> alphabet = {"a", "b"};
  std::size_t repetitions = 3;  // timed runs per sample; the median is kept
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct BenchRow {
  std::size_t length = 0;
  double mean_store = 0.0;  // live constraints at fixpoint, averaged over samples
  double mean_ms = 0.0;     // median wall time per sample, averaged over samples
  std::size_t failures = 0; // samples where no branch reached a fixpoint
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double slope = 0.0;  // log-log fit of time against length, longest half of rows
};

// Uniform random token string, deterministic in (seed, length, sample).
std::vector<Term> random_tokens(const BenchConfig& config, std::size_t length,
                                std::size_t sample);

// Parses random strings of each configured length. Samples are independent
// (one engine per run) and may be timed on parallel threads.
BenchReport run_bench(const CompiledGrammar& cg, const BenchConfig& config);

// Least-squares slope of log y against log x. Non-positive pairs are
// skipped; fewer than two usable points yield 0.
double loglog_slope(const std::vector<std::pair<double, double>>& xy);

}  // namespace chrg
