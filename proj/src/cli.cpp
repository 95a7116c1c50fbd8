#include "dmca/cli.hpp"

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmca/bench.hpp"
#include "dmca/datagen.hpp"
#include "dmca/errors.hpp"
#include "dmca/io.hpp"
#include "dmca/plot.hpp"

namespace dmca {

nlohmann::json detect_config_to_json(const DetectConfig& cfg) {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j[cfg.algorithm == Algorithm::kDmca ? "psi_max" : "psi"] = cfg.psi;
  j["iters"] = cfg.iterations;
  j["p_frac"] = cfg.p_frac;
  j["maximin_stop_ratio"] = cfg.stop_ratio;
  j["maximin_first"] = "highest-score";
  j["maximin_stop"] = "relative-drop";
  j["peak_sigma"] = cfg.peak_sigma;
  j["tau_e_distinct"] = cfg.tau_e_distinct;
  j["tau_e_scale"] = cfg.tau_e_log ? "log" : "linear";
  j["tau_n_window"] = cfg.gap_within_r_max ? "r-max" : "full";
  j["accumulate_pruning"] = cfg.accumulate_pruning;
  j["warmup_flat"] = cfg.warmup_flat;
  j["threads"] = cfg.threads;
  j["seed"] = cfg.seed;
  return j;
}

DetectConfig detect_config_from_json(const nlohmann::json& j) {
  try {
    DetectConfig cfg;
    const auto name = j.at("algorithm").get<std::string>();
    const auto a = parse_algorithm(name);
    if (!a) throw ValidationError("manifest: unknown algorithm '" + name + "'");
    cfg.algorithm = *a;
    cfg.psi = j.at(cfg.algorithm == Algorithm::kDmca ? "psi_max" : "psi").get<std::size_t>();
    cfg.iterations = j.at("iters").get<std::size_t>();
    cfg.p_frac = j.at("p_frac").get<double>();
    cfg.stop_ratio = j.at("maximin_stop_ratio").get<double>();
    cfg.peak_sigma = j.at("peak_sigma").get<double>();
    cfg.tau_e_distinct = j.at("tau_e_distinct").get<bool>();
    cfg.tau_e_log = j.at("tau_e_scale").get<std::string>() == "log";
    cfg.gap_within_r_max = j.at("tau_n_window").get<std::string>() == "r-max";
    cfg.accumulate_pruning = j.at("accumulate_pruning").get<bool>();
    cfg.warmup_flat = j.at("warmup_flat").get<bool>();
    cfg.threads = j.at("threads").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest config: ") + e.what());
  }
}

namespace {

std::uint64_t parse_seed_env(const char* text) {
  const std::string s(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("DMCA_SEED='" + s + "' is not a non-negative integer");
  }
  return v;
}

// --seed wins; otherwise DMCA_SEED; otherwise the default.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
  if (flag->count() > 0) return value;
  if (const char* env = std::getenv("DMCA_SEED")) return parse_seed_env(env);
  return value;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    const auto a = parse_algorithm(item);
    if (!a) throw UsageError("unknown algorithm '" + item + "'");
    out.push_back(*a);
    start = comma + 1;
  }
  return out;
}

struct DetectArgs {
  std::string input;
  std::string algorithm = "dmca";
  std::size_t psi = 16;
  std::size_t psi_max = 16;
  std::size_t iters = 100;
  double p_frac = 0.1;
  std::uint64_t seed = 0;
  double stop_ratio = 0.5;
  double peak_sigma = 3.0;
  bool tau_e_distinct = true;
  std::string tau_e_scale = "log";
  std::string tau_n_window = "r-max";
  bool accumulate_pruning = false;
  bool warmup_flat = false;
  std::size_t threads = 1;
  std::string scores_out;
  std::string clusters_out;
  std::string diagnostics_out;
  std::string manifest_out;
  std::string from_manifest;
};

struct DetectOptions {
  CLI::Option* input;
  CLI::Option* psi;
  CLI::Option* psi_max;
  CLI::Option* seed;
  std::vector<CLI::Option*> tuning;  // forbidden together with --from-manifest
};

void run_detect(DetectArgs& a, const DetectOptions& o) {
  RunManifest manifest;
  DetectConfig cfg;
  std::string input = a.input;
  std::string scores_out = a.scores_out;
  std::string clusters_out = a.clusters_out;
  std::string diagnostics_out = a.diagnostics_out;
  std::optional<std::string> expected_fingerprint;

  if (!a.from_manifest.empty()) {
    for (const CLI::Option* opt : o.tuning) {
      if (opt->count() > 0) {
        throw UsageError(opt->get_name() + " conflicts with --from-manifest");
      }
    }
    const RunManifest old = load_manifest(a.from_manifest);
    cfg = detect_config_from_json(old.config);
    if (input.empty()) input = old.input;
    auto artifact = [&](const std::string& key, std::string& target) {
      if (target.empty()) {
        if (auto it = old.artifacts.find(key); it != old.artifacts.end()) target = it->second;
      }
    };
    artifact("scores", scores_out);
    artifact("clusters", clusters_out);
    artifact("diagnostics", diagnostics_out);
    expected_fingerprint = old.dataset_fingerprint;
  } else {
    const auto alg = parse_algorithm(a.algorithm);
    if (!alg) throw UsageError("unknown algorithm '" + a.algorithm + "'");
    cfg.algorithm = *alg;
    if (cfg.algorithm == Algorithm::kDmca) {
      if (o.psi->count() > 0) throw UsageError("--psi is not used by dmca; use --psi-max");
      cfg.psi = a.psi_max;
    } else {
      if (o.psi_max->count() > 0) {
        throw UsageError("--psi-max applies to dmca only; use --psi");
      }
      cfg.psi = a.psi;
    }
    cfg.iterations = a.iters;
    cfg.p_frac = a.p_frac;
    cfg.stop_ratio = a.stop_ratio;
    cfg.peak_sigma = a.peak_sigma;
    cfg.tau_e_distinct = a.tau_e_distinct;
    cfg.tau_e_log = a.tau_e_scale == "log";
    cfg.gap_within_r_max = a.tau_n_window == "r-max";
    cfg.accumulate_pruning = a.accumulate_pruning;
    cfg.warmup_flat = a.warmup_flat;
    cfg.threads = a.threads;
    cfg.seed = resolve_seed(o.seed, a.seed);
  }
  if (input.empty()) throw UsageError("--input is required");
  if (scores_out.empty()) throw UsageError("--scores-out is required");
  if (clusters_out.empty()) throw UsageError("--clusters-out is required");

  const auto start = std::chrono::steady_clock::now();
  const CsvDataset csv = load_csv(input);
  const GroundTruth* truth = csv.truth ? &*csv.truth : nullptr;
  const std::string fingerprint = dataset_fingerprint(csv.data, truth);
  if (expected_fingerprint && *expected_fingerprint != fingerprint) {
    throw ValidationError("dataset " + input + " does not match the manifest fingerprint");
  }
  const DetectOutput out = run_detector(csv.data, cfg, truth);

  save_scores(scores_out, out.scores);
  save_clusters(clusters_out, out.clusters);
  manifest.artifacts["scores"] = scores_out;
  manifest.artifacts["clusters"] = clusters_out;
  if (!diagnostics_out.empty()) {
    save_diagnostics(diagnostics_out, out.diagnostics);
    manifest.artifacts["diagnostics"] = diagnostics_out;
  }
  const std::string manifest_out =
      a.manifest_out.empty() ? scores_out + ".manifest.json" : a.manifest_out;
  manifest.algorithm = algorithm_name(cfg.algorithm);
  manifest.config = detect_config_to_json(cfg);
  manifest.seed = cfg.seed;
  manifest.input = input;
  manifest.dataset_fingerprint = fingerprint;
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_manifest(manifest_out, manifest);
  log_info("wrote " + scores_out + ", " + clusters_out + " and " + manifest_out);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Outlier detection with micro-cluster assignment"};
  app.name("dmca");
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", verbose, "Print progress information");

  // detect
  DetectArgs d;
  DetectOptions dopt;
  auto* detect = app.add_subcommand("detect", "Score a dataset and assign micro-clusters");
  dopt.input = detect->add_option("--input", d.input, "Dataset CSV");
  std::vector<CLI::Option*>& tuning = dopt.tuning;
  tuning.push_back(detect->add_option("--algorithm", d.algorithm, "dmca | dmca0 | inne | prune-top-score")
                       ->check(CLI::IsMember({"dmca", "dmca0", "inne", "prune-top-score"})));
  dopt.psi = detect->add_option("--psi", d.psi, "Subsample size (dmca0, inne, prune-top-score)")
                 ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  dopt.psi_max = detect->add_option("--psi-max", d.psi_max, "Largest subsample size (dmca)")
                     ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  tuning.push_back(dopt.psi);
  tuning.push_back(dopt.psi_max);
  tuning.push_back(detect->add_option("--iters", d.iters, "Iterations t")
                       ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max())));
  tuning.push_back(detect->add_option("--p-frac", d.p_frac, "Check-points p as a fraction of n"));
  dopt.seed = detect->add_option("--seed", d.seed, "Random seed (env DMCA_SEED when absent)");
  tuning.push_back(dopt.seed);
  tuning.push_back(detect->add_option("--maximin-stop-ratio", d.stop_ratio,
                                      "Stop maximin when a projection falls below this ratio"));
  tuning.push_back(detect->add_option("--peak-sigma", d.peak_sigma, "Gap detector sigma multiplier"));
  tuning.push_back(detect->add_option("--tau-e-distinct", d.tau_e_distinct,
                                      "Edge threshold uses distinct weights (true|false)"));
  tuning.push_back(detect->add_option("--tau-e-scale", d.tau_e_scale, "Edge threshold scale: log | linear")
                       ->check(CLI::IsMember({"log", "linear"})));
  tuning.push_back(detect->add_option("--tau-n-window", d.tau_n_window,
                                      "Neighbor gap search window: r-max | full")
                       ->check(CLI::IsMember({"r-max", "full"})));
  tuning.push_back(detect->add_flag("--accumulate-pruning", d.accumulate_pruning,
                                    "Keep pruned points out for the rest of the run"));
  tuning.push_back(detect->add_flag("--warmup-flat", d.warmup_flat,
                                    "Warm-up members run a single iteration each"));
  detect->add_option("--threads", d.threads, "Concurrent warm-up members (dmca)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  detect->add_option("--scores-out", d.scores_out, "Scores CSV to write");
  detect->add_option("--clusters-out", d.clusters_out, "Clusters JSON to write");
  detect->add_option("--diagnostics", d.diagnostics_out, "Per-iteration JSON-lines to write");
  detect->add_option("--manifest-out", d.manifest_out,
                     "Run manifest to write (default <scores-out>.manifest.json)");
  detect->add_option("--from-manifest", d.from_manifest, "Replay the run recorded in a manifest");

  // eval
  std::string e_scores, e_clusters, e_labels, e_metrics, e_diag, e_matching = "best";
  auto* eval = app.add_subcommand("eval", "Compute detection and assignment metrics");
  eval->add_option("--scores", e_scores, "Scores CSV")->required();
  eval->add_option("--clusters", e_clusters, "Clusters JSON");
  eval->add_option("--labels", e_labels, "CSV with a label column")->required();
  eval->add_option("--diagnostics", e_diag, "Diagnostics JSON-lines (masking total)");
  eval->add_option("--matching", e_matching, "F1 matching: best | hungarian")
      ->check(CLI::IsMember({"best", "hungarian"}));
  eval->add_option("--metrics-out", e_metrics, "Metrics JSON to write")->required();

  // generate
  std::string g_family, g_out;
  std::uint64_t g_seed = 0;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic dataset");
  generate_cmd->add_option("--family", g_family, "synthetic10 | spiral | sandwich | vdensity | blobs")
      ->required()
      ->check(CLI::IsMember({"synthetic10", "spiral", "sandwich", "vdensity", "blobs"}));
  auto* g_seed_opt = generate_cmd->add_option("--seed", g_seed, "Random seed");
  generate_cmd->add_option("--out", g_out, "CSV to write")->required();

  // inject
  std::string i_input, i_spec, i_out;
  std::uint64_t i_seed = 0;
  auto* inject_cmd = app.add_subcommand("inject", "Inject Gaussian micro-clusters into inliers");
  inject_cmd->add_option("--input", i_input, "Inlier CSV")->required();
  inject_cmd->add_option("--spec", i_spec, "Injection spec JSON")->required();
  auto* i_seed_opt = inject_cmd->add_option("--seed", i_seed, "Overrides the spec seed");
  inject_cmd->add_option("--out", i_out, "CSV to write")->required();

  // plot
  std::string p_input, p_scores, p_clusters, p_out;
  auto* plot = app.add_subcommand("plot", "Render a 2D dataset as SVG");
  plot->add_option("--input", p_input, "Dataset CSV")->required();
  plot->add_option("--scores", p_scores, "Scores CSV");
  plot->add_option("--clusters", p_clusters, "Clusters JSON");
  plot->add_option("--out", p_out, "SVG to write")->required();

  // bench
  std::string b_family, b_input, b_grid, b_out, b_algorithms = "dmca,inne";
  std::size_t b_seeds = 5, b_parallel = 1;
  std::uint64_t b_data_seed = 0;
  DetectArgs b;
  auto* bench = app.add_subcommand("bench", "Run a psi grid over several seeds");
  auto* b_family_opt = bench->add_option("--family", b_family, "Generated dataset family")
                           ->check(CLI::IsMember({"synthetic10", "spiral", "sandwich", "vdensity", "blobs"}));
  auto* b_input_opt = bench->add_option("--input", b_input, "Labeled dataset CSV");
  b_family_opt->excludes(b_input_opt);
  auto* b_data_seed_opt = bench->add_option("--data-seed", b_data_seed, "Seed of the generated dataset");
  bench->add_option("--psi-grid", b_grid, "Comma-separated psi values (default 2,4,...)");
  bench->add_option("--seeds", b_seeds, "Runs per psi value")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  bench->add_option("--algorithms", b_algorithms, "Comma-separated algorithms");
  bench->add_option("--iters", b.iters, "Iterations t")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  bench->add_option("--p-frac", b.p_frac, "Check-points p as a fraction of n");
  bench->add_option("--maximin-stop-ratio", b.stop_ratio, "Maximin stop ratio");
  bench->add_option("--peak-sigma", b.peak_sigma, "Gap detector sigma multiplier");
  bench->add_option("--parallel", b_parallel, "Concurrent cells")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  bench->add_option("--out", b_out, "Output directory")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      const CLI::App* target = &app;
      for (const CLI::App* sub : app.get_subcommands()) target = sub;
      std::cout << target->help();
      return 0;
    } catch (const CLI::Success&) {
      std::cout << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }
    set_log_level(quiet ? LogLevel::kQuiet : verbose ? LogLevel::kInfo : LogLevel::kWarning);

    if (detect->parsed()) {
      run_detect(d, dopt);
    } else if (eval->parsed()) {
      const ScoreVector scores = load_scores(e_scores);
      const GroundTruth truth = load_labels(e_labels);
      if (truth.size() != scores.size()) {
        throw ValidationError("scores have " + std::to_string(scores.size()) +
                              " rows but labels have " + std::to_string(truth.size()));
      }
      const MicroClusterSet clusters = e_clusters.empty() ? MicroClusterSet{} : load_clusters(e_clusters);
      MetricsReport m = compute_metrics(scores, clusters, truth, *parse_matching(e_matching));
      if (!e_diag.empty()) m.masking_cumulative = cumulative_masking_from_diagnostics(e_diag);
      save_metrics(e_metrics, m);
      std::cout << metrics_to_json(m).dump(2) << "\n";
    } else if (generate_cmd->parsed()) {
      const LabeledDataset ld =
          generate(default_spec(*parse_family(g_family), resolve_seed(g_seed_opt, g_seed)));
      save_csv(g_out, ld.data, &ld.truth);
    } else if (inject_cmd->parsed()) {
      const CsvDataset csv = load_csv(i_input);
      std::vector<std::vector<double>> rows;
      for (std::size_t r = 0; r < csv.data.size(); ++r) {
        if (csv.truth && csv.truth->label(r) != GroundTruth::kInlier) continue;
        rows.emplace_back(csv.data.row(r).begin(), csv.data.row(r).end());
      }
      if (rows.empty()) throw ValidationError(i_input + " has no inlier rows");
      InjectionSpec spec = injection_spec_from_json(nlohmann::json::parse(read_text(i_spec), nullptr, true));
      if (i_seed_opt->count() > 0 || std::getenv("DMCA_SEED") != nullptr) {
        spec.seed = resolve_seed(i_seed_opt, i_seed);
      }
      const LabeledDataset ld = inject(Dataset::from_rows(rows), spec);
      save_csv(i_out, ld.data, &ld.truth);
    } else if (plot->parsed()) {
      const CsvDataset csv = load_csv(p_input);
      if (csv.data.dim() != 2) {
        throw UsageError("plot needs 2D data; " + p_input + " has " +
                         std::to_string(csv.data.dim()) + " feature columns");
      }
      std::optional<ScoreVector> scores;
      std::optional<MicroClusterSet> clusters;
      if (!p_scores.empty()) scores = load_scores(p_scores);
      if (!p_clusters.empty()) clusters = load_clusters(p_clusters);
      PlotInput in;
      in.data = &csv.data;
      in.scores = scores ? &*scores : nullptr;
      in.clusters = clusters ? &*clusters : nullptr;
      in.truth = csv.truth ? &*csv.truth : nullptr;
      write_text(p_out, render_svg(in));
    } else if (bench->parsed()) {
      if (b_family.empty() && b_input.empty()) throw UsageError("bench needs --family or --input");
      if (!b_input.empty() && b_data_seed_opt->count() > 0) {
        throw UsageError("--data-seed applies to --family only");
      }
      std::optional<LabeledDataset> ld;
      if (!b_family.empty()) {
        ld = generate(default_spec(*parse_family(b_family), b_data_seed));
      } else {
        CsvDataset csv = load_csv(b_input);
        if (!csv.truth) throw ValidationError(b_input + " has no label column");
        ld = LabeledDataset{std::move(csv.data), std::move(*csv.truth)};
      }
      const Dataset& data = ld->data;
      const GroundTruth& truth = ld->truth;
      BenchOptions opt;
      opt.algorithms = parse_algorithms(b_algorithms);
      opt.psi_grid = b_grid.empty() ? default_psi_grid(data.size()) : parse_psi_grid(b_grid);
      opt.seeds = b_seeds;
      opt.parallel = b_parallel;
      opt.base.iterations = b.iters;
      opt.base.p_frac = b.p_frac;
      opt.base.stop_ratio = b.stop_ratio;
      opt.base.peak_sigma = b.peak_sigma;
      const BenchResult result = run_bench(data, truth, opt);
      write_bench(b_out, result);
      std::cout << read_text(std::filesystem::path(b_out) / "summary.md");
    }
    return 0;
  } catch (const UsageError& e) {
    std::string msg = e.what();
    for (char& c : msg) if (c == '\n') c = ' ';
    std::cerr << "error: " << e.kind() << ": " << msg << "\n";
    return 2;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg) if (c == '\n') c = ' ';
    std::cerr << "error: " << e.kind() << ": " << msg << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: parse-error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dmca
