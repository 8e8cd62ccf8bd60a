#include "osintphish/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "osintphish/csv.hpp"
#include "osintphish/digest.hpp"
#include "osintphish/extract.hpp"
#include "osintphish/features.hpp"
#include "osintphish/models.hpp"

namespace fs = std::filesystem;

namespace osintphish {
namespace {

void write_text(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Splits "<model>.<rest>" and keeps entries addressed to `kind`.
std::vector<std::string> scoped(const std::vector<std::string>& entries, ModelKind kind) {
  std::vector<std::string> out;
  for (const auto& entry : entries) {
    const auto dot = entry.find('.');
    const auto eq = entry.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      throw ConfigError("expected <model>.<key>=<value>, got '" + entry + "'");
    }
    if (parse_model_kind(entry.substr(0, dot)) == kind) out.push_back(entry.substr(dot + 1));
  }
  return out;
}

Lineage lineage_for(std::string stage, std::vector<std::string> inputs, const RunConfig& config,
                    std::optional<std::uint64_t> seed = std::nullopt) {
  return Lineage{std::move(stage), std::move(inputs), seed, config.digest(), nlohmann::json::object()};
}

void save_corpus(const std::string& path, const Corpus& corpus) { save_dataset(path, Dataset{corpus, std::nullopt}); }

std::string matrix_file(const std::string& prefix) { return prefix + ".triplets"; }

}  // namespace

void RunConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie in (0, 1)");
  if (parallelism == 0) throw ConfigError("parallelism must be at least 1");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout must be positive");
  if (backend != "fixture" && backend != "live") throw ConfigError("backend must be 'fixture' or 'live'");
  if (!(failure_threshold >= 0.0 && failure_threshold <= 1.0)) {
    throw ConfigError("failure_threshold must lie in [0, 1]");
  }
  if (folds < 2) throw ConfigError("folds must be at least 2");
  for (int port : web_ports) {
    if (port < 1 || port > 65535) throw ConfigError("web port out of range: " + std::to_string(port));
  }
  for (ModelKind kind : kAllModels) {
    (void)hyperparams(kind);
    (void)param_grid(kind);
  }
}

std::uint64_t RunConfig::require_seed(const std::string& stage) const {
  if (!seed) throw ConfigError(stage + " needs --seed (or seed in the config file)");
  return *seed;
}

Hyperparams RunConfig::hyperparams(ModelKind kind) const {
  Hyperparams hp = Hyperparams::defaults(kind);
  for (const auto& assignment : scoped(params, kind)) hp.set(std::string_view(assignment));
  return hp;
}

ParamGrid RunConfig::param_grid(ModelKind kind) const {
  ParamGrid grid;
  for (const auto& entry : scoped(this->grid, kind)) add_grid_entry(grid, entry);
  if (grid.empty() && grid_search) grid = default_grid(kind);
  return grid;
}

EnrichOptions RunConfig::enrich_options() const {
  EnrichOptions options;
  options.parallelism = parallelism;
  options.timeout_s = timeout_s;
  options.aggregation.web_ports = web_ports;
  return options;
}

nlohmann::json RunConfig::to_json() const {
  return {{"seed", seed ? nlohmann::json(*seed) : nlohmann::json()},
          {"split_ratio", split_ratio},
          {"backend", backend},
          {"fixture_dir", fixture_dir},
          {"nmap", tools.nmap},
          {"harvester", tools.harvester},
          {"harvester_interpreter", tools.harvester_interpreter},
          {"timeout_s", timeout_s},
          {"parallelism", parallelism},
          {"web_ports", web_ports},
          {"failure_threshold", failure_threshold},
          {"params", params},
          {"grid", grid},
          {"grid_search", grid_search},
          {"folds", folds},
          {"schema",
           {{"text", schema.text_column},
            {"label", schema.label_column},
            {"id", schema.id_column},
            {"language", schema.language_column},
            {"default_language", std::string(language_tag(schema.default_language))}}}};
}

std::string RunConfig::digest() const { return sha256_hex(to_json().dump()); }

std::string lineage_path(const std::string& output) { return output + ".lineage.json"; }

void write_lineage(const std::string& output, const Lineage& lineage) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& path : lineage.inputs) {
    inputs.push_back({{"file", fs::path(path).filename().string()}, {"sha256", sha256_file(path)}});
  }
  const nlohmann::json j = {{"stage", lineage.stage},
                            {"inputs", inputs},
                            {"seed", lineage.seed ? nlohmann::json(*lineage.seed) : nlohmann::json()},
                            {"config_sha256", lineage.config_digest},
                            {"output_sha256", sha256_file(output)},
                            {"details", lineage.details}};
  write_text(lineage_path(output), j.dump(2) + "\n");
}

Dataset load_dataset(const std::string& path, const CsvSchema& schema) {
  const csv::Table table = csv::read_file(path);
  Dataset dataset{corpus_from_table(table, schema), std::nullopt};
  dataset.corpus.provenance = fs::path(path).filename().string();
  if (!has_feature_columns(table)) return dataset;

  std::vector<std::size_t> columns;
  for (const auto& name : osint_feature_names()) columns.push_back(*table.column(name));
  std::vector<OsintFeatureRow> features;
  features.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> cells;
    for (std::size_t c : columns) cells.push_back(table.rows[r][c]);
    try {
      features.push_back(parse_feature_cells(cells));
    } catch (const DataError& e) {
      throw DataError(e.what(), r + 1);
    }
  }
  dataset.features = std::move(features);
  return dataset;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  if (!dataset.features) {
    save_csv(path, dataset.corpus);
    return;
  }
  std::vector<EnrichedRecord> rows;
  for (std::size_t i = 0; i < dataset.corpus.size(); ++i) {
    rows.push_back({dataset.corpus.records[i], (*dataset.features)[i]});
  }
  csv::write_file(path, enriched_to_table(rows));
}

namespace stage {

void ingest(const std::string& input, const std::string& output, const RunConfig& config) {
  const Dataset dataset = load_dataset(input, config.schema);
  dataset.corpus.validate();
  save_dataset(output, dataset);
  auto lineage = lineage_for("ingest", {input}, config);
  lineage.details = {{"records", dataset.corpus.size()}};
  write_lineage(output, lineage);
}

void dedup(const std::string& input, const std::string& output, const RunConfig& config) {
  const Dataset dataset = load_dataset(input);
  if (dataset.features) throw DataError("dedup runs before enrichment; input carries feature columns");
  const Corpus unique = dedup_sha256(dataset.corpus);
  save_corpus(output, unique);
  auto lineage = lineage_for("dedup", {input}, config);
  lineage.details = {{"records_in", dataset.corpus.size()}, {"records_out", unique.size()}};
  write_lineage(output, lineage);
}

void sample(const std::string& input, const std::string& output, std::size_t n, bool require_links,
            const RunConfig& config) {
  const std::uint64_t seed = config.require_seed("sample");
  const Dataset dataset = load_dataset(input);
  const Corpus sampled = random_sample(dataset.corpus, n, seed, require_links);
  save_corpus(output, sampled);
  auto lineage = lineage_for("sample", {input}, config, seed);
  lineage.details = {{"n", n}, {"require_links", require_links}};
  write_lineage(output, lineage);
}

void balance(const std::string& input, const std::string& output, const RunConfig& config) {
  const std::uint64_t seed = config.require_seed("balance");
  const Corpus balanced = balance_undersample(load_dataset(input).corpus, seed);
  save_corpus(output, balanced);
  auto lineage = lineage_for("balance", {input}, config, seed);
  lineage.details = {{"per_class", balanced.counts().safe}};
  write_lineage(output, lineage);
}

void split(const std::string& input, const std::string& train_out, const std::string& test_out,
           const RunConfig& config) {
  const std::uint64_t seed = config.require_seed("split");
  const Dataset dataset = load_dataset(input);
  const DatasetSplit parts = stratified_split(dataset.corpus, config.split_ratio, seed);

  auto carry = [&](const Corpus& part) {
    Dataset out{part, std::nullopt};
    if (!dataset.features) return out;
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < dataset.corpus.size(); ++i) {
      if (!position.emplace(dataset.corpus.records[i].id, i).second) {
        throw DataError("duplicate id '" + dataset.corpus.records[i].id + "' in an enriched corpus", i + 1);
      }
    }
    out.features.emplace();
    for (const auto& record : part.records) out.features->push_back((*dataset.features)[position.at(record.id)]);
    return out;
  };
  save_dataset(train_out, carry(parts.train));
  save_dataset(test_out, carry(parts.test));
  for (const auto& [path, part] : {std::pair{train_out, &parts.train}, std::pair{test_out, &parts.test}}) {
    auto lineage = lineage_for("split", {input}, config, seed);
    lineage.details = {{"ratio", config.split_ratio},
                       {"safe", part->counts().safe},
                       {"phishing", part->counts().phishing}};
    write_lineage(path, lineage);
  }
}

void extract(const std::string& input, const std::string& output, const RunConfig& config) {
  const Dataset dataset = load_dataset(input);
  std::ostringstream out;
  for (const auto& record : dataset.corpus.records) {
    nlohmann::json j = extract_all(record.body);
    j["id"] = record.id;
    out << j.dump() << '\n';
  }
  write_text(output, out.str());
  write_lineage(output, lineage_for("extract", {input}, config));
}

EnrichmentResult enrich(const std::string& input, const std::string& output, ScanBackend& backend,
                        const RunConfig& config) {
  const Dataset dataset = load_dataset(input);
  EnrichmentResult result = enrich_corpus(dataset.corpus, backend, config.enrich_options());
  std::vector<OsintFeatureRow> features;
  for (const auto& row : result.rows) features.push_back(row.features);
  save_dataset(output, Dataset{dataset.corpus, std::move(features)});

  std::set<std::string> failed_domains;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) {
    failed_domains.insert(f.domain);
    failures.push_back({{"domain", f.domain}, {"tool", f.tool}, {"message", f.message}});
  }
  auto lineage = lineage_for("enrich", {input}, config);
  lineage.details = {{"backend", config.backend}, {"domains_probed", result.domains_probed}, {"failures", failures}};
  write_lineage(output, lineage);

  if (result.domains_probed > 0) {
    const double share = static_cast<double>(failed_domains.size()) / static_cast<double>(result.domains_probed);
    if (share > config.failure_threshold) {
      throw ProbeThresholdError(std::to_string(failed_domains.size()) + " of " +
                                std::to_string(result.domains_probed) +
                                " domains failed to probe, above the threshold of " +
                                std::to_string(config.failure_threshold));
    }
  }
  return result;
}

void featurize(const std::string& train_in, const std::string& test_in, const std::string& prefix, bool osint,
               const RunConfig& config) {
  const Dataset train = load_dataset(train_in);
  const Dataset test = load_dataset(test_in);
  if (osint && (!train.features || !test.features)) {
    throw SchemaError("OSINT featurization needs enriched inputs with all feature columns");
  }
  const FeaturizedSplit split = featurize(train.corpus.records, test.corpus.records,
                                          osint ? &*train.features : nullptr, osint ? &*test.features : nullptr);
  for (const auto& [part, matrix] : {std::pair{std::string("train"), &split.train},
                                     std::pair{std::string("test"), &split.test}}) {
    const std::string out = prefix + "." + part;
    save_matrix(out, *matrix);
    auto lineage = lineage_for("featurize", {train_in, test_in}, config);
    lineage.details = {{"osint", osint}, {"rows", matrix->rows()}, {"columns", matrix->cols}};
    write_lineage(matrix_file(out), lineage);
  }
}

void train(const std::string& matrix, ModelKind kind, const std::string& output, const RunConfig& config) {
  const std::uint64_t seed = config.require_seed("train");
  const FeatureMatrix m = load_matrix(matrix);
  Hyperparams hp = config.hyperparams(kind);
  nlohmann::json search;
  if (const ParamGrid grid = config.param_grid(kind); !grid.empty()) {
    const GridSearchResult result = grid_search(kind, grid, m, config.folds, seed, &hp);
    hp = result.best;
    search = {{"best", hp.values()}, {"mean_accuracy", result.best_accuracy}, {"points", result.evaluated.size()}};
  }
  const TrainedModel model = osintphish::train(m, hp, seed);
  write_text(output, model_to_json(model).dump() + "\n");
  auto lineage = lineage_for("train", {matrix_file(matrix)}, config, seed);
  lineage.details = {{"model", std::string(model_name(kind))}, {"grid_search", search}};
  write_lineage(output, lineage);
}

EvaluationReport evaluate(const std::string& model_path, const std::string& matrix, const std::string& dataset,
                          const std::string& output, const RunConfig& config) {
  const TrainedModel model = load_model(model_path);
  const FeatureMatrix m = load_matrix(matrix);
  const auto predicted = predict(model, m);
  EvaluationReport report;
  report.classifier = std::string(model_name(model.kind()));
  report.dataset = dataset;
  report.seed = model.seed;
  report.hyperparams = model.hyperparams.describe();
  report.columns = model.columns;
  report.cm = confusion(m.labels, predicted);
  report.scores = metrics(report.cm);
  write_text(output, report_to_json(report).dump(2) + "\n");
  write_lineage(output, lineage_for("evaluate", {model_path, matrix_file(matrix)}, config, model.seed));
  return report;
}

void report(const std::vector<std::string>& inputs, const std::string& csv_out, const std::string& text_out,
            const RunConfig& config) {
  std::vector<EvaluationReport> reports;
  for (const auto& path : inputs) reports.push_back(report_from_json(read_json(path)));
  write_text(csv_out, render_reports_csv(reports));
  write_lineage(csv_out, lineage_for("report", inputs, config));
  if (!text_out.empty()) {
    write_text(text_out, render_report(reports));
    write_lineage(text_out, lineage_for("report", inputs, config));
  }
}

}  // namespace stage

std::vector<DatasetGroup> standard_groups(const std::string& english_sample, const std::string& english_osint,
                                          const std::string& arabic_sample, const std::string& arabic_osint) {
  return {{"English Sample", english_sample, false},
          {"English OSINT", english_osint, true},
          {"Arabic Sample", arabic_sample, false},
          {"Arabic OSINT", arabic_osint, true}};
}

std::vector<EvaluationReport> run_all(const std::vector<DatasetGroup>& groups, const std::string& workdir,
                                      ScanBackend& backend, const RunConfig& config) {
  config.validate();
  config.require_seed("run-all");
  std::vector<std::string> report_files;
  std::vector<EvaluationReport> reports;
  for (const auto& group : groups) {
    std::string slug;
    for (char ch : group.name) slug += std::isalnum(static_cast<unsigned char>(ch)) ? static_cast<char>(std::tolower(ch)) : '_';
    const std::string dir = (fs::path(workdir) / slug).string();
    fs::create_directories(dir);
    spdlog::info("run-all: group '{}' from {}", group.name, group.input);

    const std::string corpus = dir + "/corpus.csv";
    stage::ingest(group.input, corpus, config);
    std::string train = dir + "/train.csv";
    std::string test = dir + "/test.csv";
    stage::split(corpus, train, test, config);
    if (group.osint && !load_dataset(train).features) {
      stage::enrich(train, dir + "/train.enriched.csv", backend, config);
      stage::enrich(test, dir + "/test.enriched.csv", backend, config);
      train = dir + "/train.enriched.csv";
      test = dir + "/test.enriched.csv";
    }
    const std::string prefix = dir + "/matrix";
    stage::featurize(train, test, prefix, group.osint, config);
    for (ModelKind kind : kAllModels) {
      const std::string name(model_name(kind));
      const std::string model = dir + "/" + name + ".model.json";
      const std::string out = dir + "/" + name + ".report.json";
      stage::train(prefix + ".train", kind, model, config);
      reports.push_back(stage::evaluate(model, prefix + ".test", group.name, out, config));
      report_files.push_back(out);
    }
  }
  stage::report(report_files, (fs::path(workdir) / "reports.csv").string(),
                (fs::path(workdir) / "report.txt").string(), config);
  return reports;
}

nlohmann::json report_to_json(const EvaluationReport& r) {
  return {{"classifier", r.classifier},
          {"dataset", r.dataset},
          {"seed", r.seed},
          {"hyperparams", r.hyperparams},
          {"columns", r.columns.size()},
          {"confusion", {{"tn", r.cm.tn}, {"fp", r.cm.fp}, {"fn", r.cm.fn}, {"tp", r.cm.tp}}},
          {"metrics",
           {{"accuracy", r.scores.accuracy.percent()},
            {"f1", r.scores.f1.percent()},
            {"precision", r.scores.precision.percent()},
            {"recall", r.scores.recall.percent()}}}};
}

EvaluationReport report_from_json(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    r.classifier = j.at("classifier").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.hyperparams = j.at("hyperparams").get<std::string>();
    const auto& cm = j.at("confusion");
    r.cm = {cm.at("tn").get<std::size_t>(), cm.at("fp").get<std::size_t>(), cm.at("fn").get<std::size_t>(),
            cm.at("tp").get<std::size_t>()};
    r.scores = metrics(r.cm);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace osintphish
