#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dmca/core.hpp"
#include "dmca/detector.hpp"

namespace dmca {

// 2, 4, 8, ... up to min(1024, floor(0.3 n)); at least {2}.
std::vector<std::size_t> default_psi_grid(std::size_t n);

// Comma-separated positive integers, e.g. "2,4,8".
std::vector<std::size_t> parse_psi_grid(const std::string& text);

struct BenchOptions {
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> psi_grid;
  std::size_t seeds = 5;    // algorithm seeds 0..seeds-1
  DetectConfig base;        // algorithm, psi and seed are overridden per cell
  std::size_t parallel = 1; // concurrent cells
};

struct BenchCell {
  Algorithm algorithm = Algorithm::kDmca;
  std::size_t psi = 0;
  std::uint64_t seed = 0;
  std::optional<double> auc;
  std::optional<double> ap;
  std::optional<double> avg_f1;
  std::size_t masking = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double stdev = 0.0;  // population
  std::size_t count = 0;
};

// Mean and population stdev of the present values; count 0 when none.
MetricSummary summarize(const std::vector<std::optional<double>>& values);

struct BenchRow {
  Algorithm algorithm = Algorithm::kDmca;
  std::optional<std::size_t> psi;  // empty: pooled over the whole grid
  MetricSummary auc, ap, avg_f1, masking;
};

struct BenchResult {
  std::vector<BenchCell> cells;  // algorithm-major, then psi, then seed
  std::vector<BenchRow> rows;    // per algorithm: pooled row, then one per psi
};

// Cells are seed-isolated, so the result does not depend on `parallel`.
BenchResult run_bench(const Dataset& ds, const GroundTruth& truth, const BenchOptions& options);

// Writes cells.csv, summary.csv and summary.md into dir (created if needed).
void write_bench(const std::filesystem::path& dir, const BenchResult& result);

}  // namespace dmca
