#include "dmca/detector.hpp"

#include <algorithm>

#include "dmca/errors.hpp"
#include "dmca/inne.hpp"

namespace dmca {

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "dmca") return Algorithm::kDmca;
  if (name == "dmca0") return Algorithm::kDmca0;
  if (name == "inne") return Algorithm::kInne;
  if (name == "prune-top-score") return Algorithm::kPruneTopScore;
  return std::nullopt;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kDmca: return "dmca";
    case Algorithm::kDmca0: return "dmca0";
    case Algorithm::kInne: return "inne";
    case Algorithm::kPruneTopScore: return "prune-top-score";
  }
  return "unknown";
}

DetectOutput run_detector(const Dataset& ds, const DetectConfig& cfg,
                          const GroundTruth* truth) {
  const std::size_t p = default_checkpoints(ds.size(), cfg.p_frac);
  DetectOutput out;
  switch (cfg.algorithm) {
    case Algorithm::kDmca: {
      DmcaConfig c;
      c.psi_max = cfg.psi;
      c.iterations = cfg.iterations;
      c.checkpoints = p;
      c.stop_ratio = cfg.stop_ratio;
      c.peak_sigma = cfg.peak_sigma;
      c.tau_e_distinct = cfg.tau_e_distinct;
      c.tau_e_log = cfg.tau_e_log;
      c.accumulate_pruning = cfg.accumulate_pruning;
      c.gap_within_r_max = cfg.gap_within_r_max;
      c.warmup_flat = cfg.warmup_flat;
      c.seed = cfg.seed;
      c.threads = cfg.threads;
      DmcaResult r = run_dmca(ds, c, truth);
      out.scores = std::move(r.scores);
      out.clusters = std::move(r.clusters);
      out.diagnostics = std::move(r.diagnostics);
      out.masking = std::move(r.masking);
      break;
    }
    case Algorithm::kDmca0:
    case Algorithm::kPruneTopScore: {
      Dmca0Config c;
      c.psi = cfg.psi;
      c.iterations = cfg.iterations;
      c.checkpoints = p;
      c.stop_ratio = cfg.stop_ratio;
      c.peak_sigma = cfg.peak_sigma;
      c.tau_e_distinct = cfg.tau_e_distinct;
      c.tau_e_log = cfg.tau_e_log;
      c.accumulate_pruning = cfg.accumulate_pruning;
      c.gap_within_r_max = cfg.gap_within_r_max;
      c.seed = cfg.seed;
      Dmca0Result r = cfg.algorithm == Algorithm::kDmca0
                          ? run_dmca0(ds, c, std::nullopt, truth)
                          : run_prune_top_score(ds, c, truth);
      out.scores = std::move(r.scores);
      out.clusters = std::move(r.clusters);
      out.diagnostics = std::move(r.diagnostics);
      out.masking = std::move(r.masking);
      break;
    }
    case Algorithm::kInne: {
      if (cfg.psi < 2) throw InvalidArgument("psi must be >= 2");
      if (ds.size() < 2) throw InvalidArgument("iNNE needs at least 2 points");
      const std::size_t psi = std::min(cfg.psi, ds.size());
      Rng rng(cfg.seed);
      InneEnsembleResult r = inne_ensemble_traced(ds, ds, psi, cfg.iterations, rng);
      out.scores = std::move(r.scores);
      for (std::size_t i = 0; i < r.subsamples.size(); ++i) {
        IterationDiagnostics d;
        d.iteration = i + 1;
        d.psi = psi;
        d.clean_size = ds.size();
        if (truth != nullptr) {
          d.masking = count_masking(r.subsamples[i], *truth);
          out.masking.record(*d.masking);
        }
        out.diagnostics.push_back(d);
      }
      break;
    }
  }
  return out;
}

}  // namespace dmca
