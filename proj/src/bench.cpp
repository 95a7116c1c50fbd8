#include "dmca/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dmca/errors.hpp"
#include "dmca/io.hpp"

namespace dmca {

std::vector<std::size_t> default_psi_grid(std::size_t n) {
  const std::size_t cap = std::min<std::size_t>(1024, static_cast<std::size_t>(0.3 * static_cast<double>(n)));
  std::vector<std::size_t> grid;
  for (std::size_t psi = 2; psi <= cap; psi *= 2) grid.push_back(psi);
  if (grid.empty()) grid.push_back(2);
  return grid;
}

std::vector<std::size_t> parse_psi_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || v < 2) {
      throw InvalidArgument("psi grid entry '" + item + "' is not an integer >= 2");
    }
    grid.push_back(v);
    start = comma + 1;
  }
  return grid;
}

MetricSummary summarize(const std::vector<std::optional<double>>& values) {
  MetricSummary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++s.count;
    }
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const auto& v : values) {
    if (v) sq += (*v - s.mean) * (*v - s.mean);
  }
  s.stdev = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

namespace {

BenchRow make_row(Algorithm a, std::optional<std::size_t> psi,
                  const std::vector<const BenchCell*>& cells) {
  std::vector<std::optional<double>> auc, ap, f1, mask;
  for (const BenchCell* c : cells) {
    auc.push_back(c->auc);
    ap.push_back(c->ap);
    f1.push_back(c->avg_f1);
    mask.push_back(static_cast<double>(c->masking));
  }
  return {a, psi, summarize(auc), summarize(ap), summarize(f1), summarize(mask)};
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string pm(const MetricSummary& s) {
  if (s.count == 0) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", s.mean, s.stdev);
  return buf;
}

}  // namespace

BenchResult run_bench(const Dataset& ds, const GroundTruth& truth, const BenchOptions& options) {
  if (options.algorithms.empty()) throw InvalidArgument("bench: no algorithms");
  if (options.psi_grid.empty()) throw InvalidArgument("bench: empty psi grid");
  if (options.seeds == 0) throw InvalidArgument("bench: seeds must be >= 1");

  BenchResult result;
  for (Algorithm a : options.algorithms) {
    for (std::size_t psi : options.psi_grid) {
      for (std::uint64_t s = 0; s < options.seeds; ++s) {
        BenchCell cell;
        cell.algorithm = a;
        cell.psi = psi;
        cell.seed = s;
        result.cells.push_back(cell);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < result.cells.size(); k = next++) {
      BenchCell& cell = result.cells[k];
      try {
        DetectConfig cfg = options.base;
        cfg.algorithm = cell.algorithm;
        cfg.psi = cell.psi;
        cfg.seed = cell.seed;
        const DetectOutput out = run_detector(ds, cfg, &truth);
        cell.auc = roc_auc(out.scores, truth);
        cell.ap = average_precision(out.scores, truth);
        if (cell.algorithm == Algorithm::kDmca || cell.algorithm == Algorithm::kDmca0) {
          if (auto f = assignment_f1(out.clusters, truth)) cell.avg_f1 = f->avg_f1;
        }
        cell.masking = out.masking.total();
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.parallel, 1, result.cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (Algorithm a : options.algorithms) {
    std::vector<const BenchCell*> pooled;
    for (const auto& c : result.cells) {
      if (c.algorithm == a) pooled.push_back(&c);
    }
    result.rows.push_back(make_row(a, std::nullopt, pooled));
    for (std::size_t psi : options.psi_grid) {
      std::vector<const BenchCell*> at;
      for (const BenchCell* c : pooled) {
        if (c->psi == psi) at.push_back(c);
      }
      result.rows.push_back(make_row(a, psi, at));
    }
  }
  return result;
}

void write_bench(const std::filesystem::path& dir, const BenchResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  std::string cells = "algorithm,psi,seed,auc,ap,avg_f1,masking_cumulative\n";
  for (const auto& c : result.cells) {
    cells += std::string(algorithm_name(c.algorithm)) + "," + std::to_string(c.psi) + "," +
             std::to_string(c.seed) + "," + opt(c.auc) + "," + opt(c.ap) + "," + opt(c.avg_f1) +
             "," + std::to_string(c.masking) + "\n";
  }
  write_text(dir / "cells.csv", cells);

  std::string summary = "algorithm,psi,metric,mean,stdev,count\n";
  std::string md = "| algorithm | psi | AUC | AP | avg F1 | masking |\n|---|---|---|---|---|---|\n";
  for (const auto& r : result.rows) {
    const std::string psi = r.psi ? std::to_string(*r.psi) : "all";
    const std::pair<const char*, const MetricSummary*> metrics[] = {
        {"auc", &r.auc}, {"ap", &r.ap}, {"avg_f1", &r.avg_f1}, {"masking_cumulative", &r.masking}};
    for (const auto& [name, s] : metrics) {
      if (s->count == 0) continue;
      summary += std::string(algorithm_name(r.algorithm)) + "," + psi + "," + name + "," +
                 format_double(s->mean) + "," + format_double(s->stdev) + "," +
                 std::to_string(s->count) + "\n";
    }
    md += "| " + std::string(algorithm_name(r.algorithm)) + " | " + psi + " | " + pm(r.auc) +
          " | " + pm(r.ap) + " | " + pm(r.avg_f1) + " | " + pm(r.masking) + " |\n";
  }
  write_text(dir / "summary.csv", summary);
  write_text(dir / "summary.md", md);
}

}  // namespace dmca
