#include "chrg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <atomic>
#include <random>
#include <thread>

#include "chrg/engine.hpp"

namespace chrg {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}

struct SampleResult {
  std::size_t store = 0;
  double ms = 0.0;
  bool ok = false;
};

SampleResult run_sample(const CompiledGrammar& cg, const BenchConfig& config,
                        std::size_t length, std::size_t sample) {
  std::vector<Term> initial =
      tokenize(random_tokens(config, length, sample), cg.wants_eof);
  SampleResult r;
  std::vector<double> times;
  times.reserve(config.repetitions);
  std::size_t reps = std::max<std::size_t>(1, config.repetitions);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    Engine eng(cg.program);
    auto t0 = std::chrono::steady_clock::now();
    bool ok = eng.run(initial, cg.final_goal);
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (rep + 1 == reps) {
      r.ok = ok;
      r.store = eng.store().live_count();
    }
  }
  std::sort(times.begin(), times.end());
  r.ms = times[times.size() / 2];
  return r;
}

}  // namespace

std::vector<Term> random_tokens(const BenchConfig& config, std::size_t length,
                                std::size_t sample) {
  std::mt19937_64 rng(mix(config.seed + 0x9e3779b97f4a7c15ull * length) ^
                      mix(sample + 1));
  std::vector<Term> out;
  out.reserve(length);
  if (config.alphabet.empty()) return out;
  std::uniform_int_distribution<std::size_t> pick(0, config.alphabet.size() - 1);
  for (std::size_t i = 0; i < length; ++i) {
    const std::string& w = config.alphabet[pick(rng)];
    bool digits = !w.empty() && w.find_first_not_of("0123456789") == std::string::npos;
    out.push_back(digits ? Term::integer(std::stoll(w))
                         : Term::constant(symbol_table::intern(w)));
  }
  return out;
}

BenchReport run_bench(const CompiledGrammar& cg, const BenchConfig& config) {
  struct Task {
    std::size_t row;
    std::size_t length;
    std::size_t sample;
  };
  std::vector<Task> tasks;
  for (std::size_t row = 0; row < config.lengths.size(); ++row)
    for (std::size_t s = 0; s < config.samples; ++s)
      tasks.push_back({row, config.lengths[row], s});

  std::vector<SampleResult> results(tasks.size());
  unsigned threads = std::max(1u, config.threads);
  if (threads == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      results[i] = run_sample(cg, config, tasks[i].length, tasks[i].sample);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        results[i] = run_sample(cg, config, tasks[i].length, tasks[i].sample);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, tasks.size()); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchReport report;
  report.rows.resize(config.lengths.size());
  for (std::size_t row = 0; row < config.lengths.size(); ++row) {
    report.rows[row].length = config.lengths[row];
  }
  std::vector<std::size_t> counts(config.lengths.size(), 0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    BenchRow& r = report.rows[tasks[i].row];
    r.mean_store += static_cast<double>(results[i].store);
    r.mean_ms += results[i].ms;
    if (!results[i].ok) ++r.failures;
    ++counts[tasks[i].row];
  }
  for (std::size_t row = 0; row < report.rows.size(); ++row) {
    if (counts[row] == 0) continue;
    report.rows[row].mean_store /= static_cast<double>(counts[row]);
    report.rows[row].mean_ms /= static_cast<double>(counts[row]);
  }

  std::vector<BenchRow> sorted = report.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const BenchRow& a, const BenchRow& b) { return a.length < b.length; });
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = sorted.size() / 2; i < sorted.size(); ++i)
    xy.emplace_back(static_cast<double>(sorted[i].length), sorted[i].mean_ms);
  report.slope = loglog_slope(xy);
  return report;
}

double loglog_slope(const std::vector<std::pair<double, double>>& xy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [x, y] : xy) {
    if (x <= 0 || y <= 0) continue;
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  double denom = n * sxx - sx * sx;
  if (denom == 0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace chrg
