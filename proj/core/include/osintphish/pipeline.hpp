/**
 * @file pipeline.hpp
 * @brief File-based pipeline stages shared by the CLI and run-all.
 *
 * Every stage reads the previous stage's artifacts, writes its own and
 * leaves a `<output>.lineage.json` sidecar next to each output with the
 * SHA-256 of its inputs, the seed and the config digest. Sidecars carry no
 * timestamps, so reruns are byte-identical.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osintphish/corpus.hpp"
#include "osintphish/enrich.hpp"
#include "osintphish/error.hpp"
#include "osintphish/eval.hpp"
#include "osintphish/hyperparams.hpp"
#include "osintphish/probe.hpp"

namespace osintphish {

/// Raised when the share of failed probes exceeds the configured threshold.
class ProbeThresholdError : public ProbeError {
 public:
  using ProbeError::ProbeError;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  double split_ratio = 0.7;
  std::string backend = "fixture";  ///< "fixture" or "live"
  std::string fixture_dir;
  ToolPaths tools;
  double timeout_s = 300.0;
  std::size_t parallelism = 1;
  std::set<int> web_ports = kDefaultWebPorts;
  /// Highest tolerated fraction of probed domains with a failed tool run.
  double failure_threshold = 0.5;
  /// "<model>.<key>=<value>" overrides, e.g. "rf.n_estimators=50".
  std::vector<std::string> params;
  /// "<model>.<key>=<v1>,<v2>" grid entries; grid search runs when non-empty
  /// or when `grid_search` is set (default grids then fill in).
  std::vector<std::string> grid;
  bool grid_search = false;
  std::size_t folds = 5;
  CsvSchema schema;

  /// Throws ConfigError for out-of-range values.
  void validate() const;
  /// Seed, or ConfigError naming the stage that needs one.
  std::uint64_t require_seed(const std::string& stage) const;
  /// Model defaults with the matching `params` applied.
  Hyperparams hyperparams(ModelKind kind) const;
  ParamGrid param_grid(ModelKind kind) const;
  EnrichOptions enrich_options() const;
  nlohmann::json to_json() const;
  /// SHA-256 of the canonical JSON form.
  std::string digest() const;
};

struct Lineage {
  std::string stage;
  std::vector<std::string> inputs;  ///< paths; digested when written
  std::optional<std::uint64_t> seed;
  std::string config_digest;
  nlohmann::json details = nlohmann::json::object();
};

std::string lineage_path(const std::string& output);
void write_lineage(const std::string& output, const Lineage& lineage);

/// Records plus, when the file carries them, OSINT feature columns.
struct Dataset {
  Corpus corpus;
  std::optional<std::vector<OsintFeatureRow>> features;
};

Dataset load_dataset(const std::string& path, const CsvSchema& schema = {});
void save_dataset(const std::string& path, const Dataset& dataset);

namespace stage {

void ingest(const std::string& input, const std::string& output, const RunConfig& config);
void dedup(const std::string& input, const std::string& output, const RunConfig& config);
void sample(const std::string& input, const std::string& output, std::size_t n, bool require_links,
            const RunConfig& config);
void balance(const std::string& input, const std::string& output, const RunConfig& config);
/// Stratified split; OSINT feature columns travel with their records.
void split(const std::string& input, const std::string& train_out, const std::string& test_out,
           const RunConfig& config);
/// JSON lines: {"id","urls","domains","emails","ips"} per record.
void extract(const std::string& input, const std::string& output, const RunConfig& config);
/// Throws ProbeThresholdError after writing the output when too many
/// probes failed.
EnrichmentResult enrich(const std::string& input, const std::string& output, ScanBackend& backend,
                        const RunConfig& config);
/// Writes `<prefix>.train.*` and `<prefix>.test.*` matrices. With `osint`
/// both inputs must carry feature columns.
void featurize(const std::string& train_in, const std::string& test_in, const std::string& prefix, bool osint,
               const RunConfig& config);
/// Trains on `<matrix>`; runs grid search first when configured.
void train(const std::string& matrix, ModelKind kind, const std::string& output, const RunConfig& config);
/// Writes one report as JSON.
EvaluationReport evaluate(const std::string& model, const std::string& matrix, const std::string& dataset,
                          const std::string& output, const RunConfig& config);
/// Collects report JSON files into reports.csv and a text table.
void report(const std::vector<std::string>& inputs, const std::string& csv_out, const std::string& text_out,
            const RunConfig& config);

}  // namespace stage

struct DatasetGroup {
  std::string name;  ///< e.g. "English OSINT"
  std::string input;
  bool osint = false;
};

/// The four groups in report order: English Sample, English OSINT, Arabic
/// Sample, Arabic OSINT.
std::vector<DatasetGroup> standard_groups(const std::string& english_sample, const std::string& english_osint,
                                          const std::string& arabic_sample, const std::string& arabic_osint);

/// Every stage for every group and all five models, artifacts under
/// `workdir`, ending with `<workdir>/reports.csv` and `<workdir>/report.txt`.
/// OSINT groups whose input lacks feature columns are enriched through
/// `backend`.
std::vector<EvaluationReport> run_all(const std::vector<DatasetGroup>& groups, const std::string& workdir,
                                      ScanBackend& backend, const RunConfig& config);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

}  // namespace osintphish
