#include "dmca/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "dmca/errors.hpp"

namespace dmca {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> data_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  std::string_view all(text);
  std::size_t start = 0;
  while (start <= all.size()) {
    std::size_t end = all.find('\n', start);
    if (end == std::string_view::npos) end = all.size();
    lines.push_back(all.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    return std::nullopt;
  }
  return v;
}

std::optional<long long> parse_integer(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    return std::nullopt;
  }
  return v;
}

json or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json assignment_entries(const AssignmentScore& a) {
  json arr = json::array();
  for (const auto& c : a.per_true_cluster) {
    arr.push_back({{"true_cluster", c.true_cluster},
                   {"predicted", c.predicted ? json(*c.predicted) : json(nullptr)},
                   {"f1", c.f1}});
  }
  return arr;
}

std::optional<AssignmentScore> read_assignment(const json& j, const char* avg_key,
                                               const char* list_key) {
  if (!j.contains(avg_key) || j.at(avg_key).is_null()) return std::nullopt;
  AssignmentScore a;
  a.avg_f1 = j.at(avg_key).get<double>();
  if (j.contains(list_key) && j.at(list_key).is_array()) {
    for (const auto& e : j.at(list_key)) {
      ClusterMatch c;
      c.true_cluster = e.at("true_cluster").get<int>();
      if (!e.at("predicted").is_null()) c.predicted = e.at("predicted").get<std::size_t>();
      c.f1 = e.at("f1").get<double>();
      a.per_true_cluster.push_back(c);
    }
  }
  return a;
}

bool same_assignment(const std::optional<AssignmentScore>& a,
                     const std::optional<AssignmentScore>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->avg_f1 != b->avg_f1 || a->per_true_cluster.size() != b->per_true_cluster.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->per_true_cluster.size(); ++i) {
    const auto& x = a->per_true_cluster[i];
    const auto& y = b->per_true_cluster[i];
    if (x.true_cluster != y.true_cluster || x.predicted != y.predicted || x.f1 != y.f1) {
      return false;
    }
  }
  return true;
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

CsvDataset parse_csv(const std::string& text, const std::string& source) {
  const auto lines = data_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && is_blank(lines[li])) ++li;
  if (li == lines.size()) throw ParseError(source + ": empty file (header row required)");
  const auto header = split_cells(lines[li++]);

  std::optional<std::size_t> label_col;
  std::vector<std::size_t> feature_cols;
  CsvDataset out{Dataset(1, 1, {0.0}), std::nullopt, {}};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") {
      if (label_col) throw ParseError(source + ": duplicate label column");
      label_col = c;
    } else {
      feature_cols.push_back(c);
      out.feature_names.emplace_back(header[c]);
    }
  }
  if (feature_cols.empty()) throw ParseError(source + ": no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t rows = 0;
  for (; li < lines.size(); ++li) {
    if (is_blank(lines[li])) continue;
    const auto cells = split_cells(lines[li]);
    const std::string where = source + ": row " + std::to_string(rows + 1);
    if (cells.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto cell = cells[feature_cols[k]];
      const auto v = parse_real(cell);
      if (!v) {
        throw ParseError(where + ", column '" + out.feature_names[k] +
                         "': non-numeric value '" + std::string(cell) + "'");
      }
      if (!std::isfinite(*v)) {
        throw ParseError(where + ", column '" + out.feature_names[k] +
                         "': non-finite value '" + std::string(cell) + "'");
      }
      values.push_back(*v);
    }
    if (label_col) {
      const auto cell = cells[*label_col];
      const auto l = parse_integer(cell);
      if (!l || *l < -1 || *l > 1'000'000'000) {
        throw ParseError(where + ", column 'label': invalid label '" + std::string(cell) +
                         "'");
      }
      labels.push_back(static_cast<int>(*l));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source + ": no data rows");
  out.data = Dataset(rows, feature_cols.size(), std::move(values));
  if (label_col) out.truth = GroundTruth(std::move(labels));
  return out;
}

CsvDataset load_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.string());
}

GroundTruth load_labels(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto lines = data_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && is_blank(lines[li])) ++li;
  if (li == lines.size()) throw ParseError(path.string() + ": empty file");
  const auto header = split_cells(lines[li++]);
  const auto it = std::find(header.begin(), header.end(), std::string_view("label"));
  if (it == header.end()) throw ParseError(path.string() + ": no 'label' column");
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<int> labels;
  for (; li < lines.size(); ++li) {
    if (is_blank(lines[li])) continue;
    const auto cells = split_cells(lines[li]);
    if (cells.size() != header.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(labels.size() + 1) +
                       ": expected " + std::to_string(header.size()) + " cells");
    }
    const auto l = parse_integer(cells[col]);
    if (!l || *l < -1) {
      throw ParseError(path.string() + ": row " + std::to_string(labels.size() + 1) +
                       ", column 'label': invalid label '" + std::string(cells[col]) + "'");
    }
    labels.push_back(static_cast<int>(*l));
  }
  return GroundTruth(std::move(labels));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

void save_csv(const std::filesystem::path& path, const Dataset& ds, const GroundTruth* truth) {
  if (truth != nullptr && truth->size() != ds.size()) {
    throw ContractViolation("save_csv: labels do not match dataset");
  }
  std::string text;
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    if (j > 0) text += ',';
    text += 'f' + std::to_string(j);
  }
  if (truth != nullptr) text += ",label";
  text += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = ds.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j > 0) text += ',';
      text += format_double(r[j]);
    }
    if (truth != nullptr) text += ',' + std::to_string(truth->label(i));
    text += '\n';
  }
  write_text(path, text);
}

void save_scores(const std::filesystem::path& path, const ScoreVector& scores) {
  std::string text = "index,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    text += std::to_string(i) + ',' + format_double(scores[i]) + '\n';
  }
  write_text(path, text);
}

ScoreVector load_scores(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto lines = data_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && is_blank(lines[li])) ++li;
  if (li == lines.size()) throw ParseError(path.string() + ": empty scores file");
  const auto header = split_cells(lines[li++]);
  if (header.size() != 2 || header[0] != "index" || header[1] != "score") {
    throw ParseError(path.string() + ": expected header 'index,score'");
  }
  ScoreVector scores;
  for (; li < lines.size(); ++li) {
    if (is_blank(lines[li])) continue;
    const auto cells = split_cells(lines[li]);
    const std::string where = path.string() + ": row " + std::to_string(scores.size() + 1);
    if (cells.size() != 2) throw ParseError(where + ": expected 2 cells");
    const auto idx = parse_integer(cells[0]);
    if (!idx || *idx != static_cast<long long>(scores.size())) {
      throw ParseError(where + ", column 'index': expected " + std::to_string(scores.size()));
    }
    const auto v = parse_real(cells[1]);
    if (!v || !std::isfinite(*v)) {
      throw ParseError(where + ", column 'score': invalid value '" + std::string(cells[1]) +
                       "'");
    }
    scores.push_back(*v);
  }
  return scores;
}

json clusters_to_json(const MicroClusterSet& clusters) {
  json arr = json::array();
  for (const auto& c : clusters.clusters) arr.push_back(c.indices());
  return json{{"clusters", arr}};
}

MicroClusterSet clusters_from_json(const json& j) {
  if (!j.is_object() || !j.contains("clusters") || !j.at("clusters").is_array()) {
    throw ParseError("clusters JSON must be an object with a 'clusters' array");
  }
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& c : j.at("clusters")) {
    if (!c.is_array()) throw ParseError("each cluster must be an array of indices");
    groups.push_back(c.get<std::vector<std::size_t>>());
  }
  MicroClusterSet out;
  std::vector<std::size_t> seen;
  for (auto& g : groups) {
    IndexSet members = IndexSet::from_unsorted(g);
    if (members.size() != g.size()) throw ValidationError("cluster contains duplicate indices");
    seen.insert(seen.end(), g.begin(), g.end());
    out.clusters.push_back(std::move(members));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw ValidationError("clusters are not pairwise disjoint");
  }
  std::sort(out.clusters.begin(), out.clusters.end(), [](const IndexSet& a, const IndexSet& b) {
    return a.empty() || (!b.empty() && a[0] < b[0]);
  });
  return out;
}

void save_clusters(const std::filesystem::path& path, const MicroClusterSet& clusters) {
  write_text(path, clusters_to_json(clusters).dump() + "\n");
}

MicroClusterSet load_clusters(const std::filesystem::path& path) {
  try {
    return clusters_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool operator==(const MetricsReport& a, const MetricsReport& b) {
  return a.auc == b.auc && a.ap == b.ap && a.matching == b.matching &&
         same_assignment(a.assignment, b.assignment) &&
         same_assignment(a.assignment_alternate, b.assignment_alternate) &&
         a.masking_cumulative == b.masking_cumulative;
}

MetricsReport compute_metrics(const ScoreVector& scores, const MicroClusterSet& clusters,
                              const GroundTruth& truth, Matching matching) {
  MetricsReport m;
  m.auc = roc_auc(scores, truth);
  m.ap = average_precision(scores, truth);
  m.matching = matching;
  const Matching other =
      matching == Matching::kBestMatch ? Matching::kHungarian : Matching::kBestMatch;
  m.assignment = assignment_f1(clusters, truth, matching);
  m.assignment_alternate = assignment_f1(clusters, truth, other);
  return m;
}

json metrics_to_json(const MetricsReport& m) {
  const Matching other =
      m.matching == Matching::kBestMatch ? Matching::kHungarian : Matching::kBestMatch;
  json j;
  j["auc"] = or_null(m.auc);
  j["ap"] = or_null(m.ap);
  j["matching"] = matching_name(m.matching);
  j["avg_f1"] = m.assignment ? json(m.assignment->avg_f1) : json(nullptr);
  j["per_cluster"] = m.assignment ? assignment_entries(*m.assignment) : json(nullptr);
  j["alternate_matching"] = matching_name(other);
  j["avg_f1_alternate"] =
      m.assignment_alternate ? json(m.assignment_alternate->avg_f1) : json(nullptr);
  j["per_cluster_alternate"] =
      m.assignment_alternate ? assignment_entries(*m.assignment_alternate) : json(nullptr);
  j["masking_cumulative"] =
      m.masking_cumulative ? json(*m.masking_cumulative) : json(nullptr);
  return j;
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport m;
  m.auc = read_optional_double(j, "auc");
  m.ap = read_optional_double(j, "ap");
  if (j.contains("matching")) {
    const auto parsed = parse_matching(j.at("matching").get<std::string>());
    if (!parsed) throw ParseError("unknown matching mode in metrics JSON");
    m.matching = *parsed;
  }
  m.assignment = read_assignment(j, "avg_f1", "per_cluster");
  m.assignment_alternate = read_assignment(j, "avg_f1_alternate", "per_cluster_alternate");
  if (j.contains("masking_cumulative") && !j.at("masking_cumulative").is_null()) {
    m.masking_cumulative = j.at("masking_cumulative").get<std::size_t>();
  }
  return m;
}

void save_metrics(const std::filesystem::path& path, const MetricsReport& m) {
  write_json(path, metrics_to_json(m));
}

MetricsReport load_metrics(const std::filesystem::path& path) {
  try {
    return metrics_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json diagnostics_to_json(const IterationDiagnostics& d) {
  json j{{"phase", d.phase},
         {"member", d.member},
         {"iteration", d.iteration},
         {"psi", d.psi},
         {"clean_size", d.clean_size},
         {"top_size", d.top_size},
         {"representatives", d.representatives},
         {"candidates", d.candidates},
         {"pruned_total", d.pruned_total},
         {"r_max", d.r_max},
         {"frozen", d.frozen}};
  j["masking"] = d.masking ? json(*d.masking) : json(nullptr);
  return j;
}

void save_diagnostics(const std::filesystem::path& path,
                      const std::vector<IterationDiagnostics>& diagnostics) {
  std::string text;
  for (const auto& d : diagnostics) text += diagnostics_to_json(d).dump() + '\n';
  write_text(path, text);
}

std::optional<std::size_t> cumulative_masking_from_diagnostics(
    const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::optional<std::size_t> total;
  for (auto line : data_lines(text)) {
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": invalid JSON line: " + e.what());
    }
    if (j.contains("masking") && !j.at("masking").is_null()) {
      total = total.value_or(0) + j.at("masking").get<std::size_t>();
    }
  }
  return total;
}

std::string dataset_fingerprint(const Dataset& ds, const GroundTruth* truth) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  feed(ds.size());
  feed(ds.dim());
  for (double v : ds.values()) feed(std::bit_cast<std::uint64_t>(v));
  if (truth != nullptr) {
    for (int l : truth->labels()) feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(l)));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json manifest_to_json(const RunManifest& m) {
  return json{{"algorithm", m.algorithm},
              {"config", m.config},
              {"seed", m.seed},
              {"input", m.input},
              {"dataset_fingerprint", m.dataset_fingerprint},
              {"artifacts", m.artifacts},
              {"duration_seconds", m.duration_seconds}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.algorithm = j.at("algorithm").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.input = j.at("input").get<std::string>();
    m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    m.duration_seconds = j.value("duration_seconds", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_json(path, manifest_to_json(m));
}

RunManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_json(path));
}

json injection_spec_to_json(const InjectionSpec& spec) {
  json clusters = json::array();
  for (const auto& c : spec.clusters) {
    clusters.push_back(
        {{"size", c.size}, {"offset_scale", c.offset_scale}, {"stdev_scale", c.stdev_scale}});
  }
  return {{"k", spec.k},
          {"clusters", clusters},
          {"seed", spec.seed},
          {"max_em_iterations", spec.max_em_iterations},
          {"max_restarts", spec.max_restarts}};
}

InjectionSpec injection_spec_from_json(const json& j) {
  InjectionSpec spec;
  try {
    spec.k = j.at("k").get<std::size_t>();
    for (const auto& c : j.at("clusters")) {
      InjectedClusterShape shape;
      shape.size = c.at("size").get<std::size_t>();
      shape.offset_scale = c.value("offset_scale", shape.offset_scale);
      shape.stdev_scale = c.value("stdev_scale", shape.stdev_scale);
      spec.clusters.push_back(shape);
    }
    spec.seed = j.value("seed", spec.seed);
    spec.max_em_iterations = j.value("max_em_iterations", spec.max_em_iterations);
    spec.max_restarts = j.value("max_restarts", spec.max_restarts);
  } catch (const json::exception& e) {
    throw ParseError(std::string("injection spec: ") + e.what());
  }
  return spec;
}

}  // namespace dmca
