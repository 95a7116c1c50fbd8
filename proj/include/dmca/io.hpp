#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmca/clusters.hpp"
#include "dmca/core.hpp"
#include "dmca/datagen.hpp"
#include "dmca/dmca.hpp"
#include "dmca/eval.hpp"

namespace dmca {

struct CsvDataset {
  Dataset data;
  std::optional<GroundTruth> truth;
  std::vector<std::string> feature_names;
};

// Header row required. Every column except an optional integer "label" column
// is a numeric feature.
CsvDataset load_csv(const std::filesystem::path& path);
CsvDataset parse_csv(const std::string& text, const std::string& source = "<memory>");

// Reads only the "label" column of a CSV file.
GroundTruth load_labels(const std::filesystem::path& path);

void save_csv(const std::filesystem::path& path, const Dataset& ds,
              const GroundTruth* truth = nullptr);

// Shortest decimal with 17 significant digits; parses back to the same double.
std::string format_double(double v);

void save_scores(const std::filesystem::path& path, const ScoreVector& scores);
ScoreVector load_scores(const std::filesystem::path& path);

nlohmann::json clusters_to_json(const MicroClusterSet& clusters);
MicroClusterSet clusters_from_json(const nlohmann::json& j);
void save_clusters(const std::filesystem::path& path, const MicroClusterSet& clusters);
MicroClusterSet load_clusters(const std::filesystem::path& path);

struct MetricsReport {
  std::optional<double> auc;
  std::optional<double> ap;
  Matching matching = Matching::kBestMatch;
  std::optional<AssignmentScore> assignment;            // under `matching`
  std::optional<AssignmentScore> assignment_alternate;  // under the other mode
  std::optional<std::size_t> masking_cumulative;

  friend bool operator==(const MetricsReport& a, const MetricsReport& b);
};

MetricsReport compute_metrics(const ScoreVector& scores, const MicroClusterSet& clusters,
                              const GroundTruth& truth, Matching matching = Matching::kBestMatch);

nlohmann::json metrics_to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);
void save_metrics(const std::filesystem::path& path, const MetricsReport& m);
MetricsReport load_metrics(const std::filesystem::path& path);

nlohmann::json diagnostics_to_json(const IterationDiagnostics& d);
// One JSON object per line.
void save_diagnostics(const std::filesystem::path& path,
                      const std::vector<IterationDiagnostics>& diagnostics);
// Sum of the "masking" fields of a JSON-lines diagnostics file.
std::optional<std::size_t> cumulative_masking_from_diagnostics(
    const std::filesystem::path& path);

// FNV-1a over dimensions, coordinate bits and labels.
std::string dataset_fingerprint(const Dataset& ds, const GroundTruth* truth = nullptr);

struct RunManifest {
  std::string algorithm;
  nlohmann::json config;  // every resolved flag
  std::uint64_t seed = 0;
  std::string input;
  std::string dataset_fingerprint;
  std::map<std::string, std::string> artifacts;
  double duration_seconds = 0.0;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest load_manifest(const std::filesystem::path& path);

// {"k": 2, "clusters": [{"size": 10, "offset_scale": 5, "stdev_scale": 0.1}],
//  "seed": 0, "max_em_iterations": 200, "max_restarts": 5}; the last three
// keys are optional.
nlohmann::json injection_spec_to_json(const InjectionSpec& spec);
InjectionSpec injection_spec_from_json(const nlohmann::json& j);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dmca
