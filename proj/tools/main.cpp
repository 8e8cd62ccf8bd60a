// osintphish: command-line driver for the phishing-detection pipeline.
//
// Every option shared by several stages lives on the top-level app and can
// come from a TOML file passed with --config; any key in the file can be
// overridden on the command line.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "osintphish/pipeline.hpp"

using namespace osintphish;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kProbe = 3 };

std::string one_line(std::string text) {
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return text;
}

int fail(int code, const std::string& kind, const std::string& stage, const std::string& message) {
  std::cerr << "osintphish: error code=" << code << " kind=" << kind << " stage=" << (stage.empty() ? "-" : stage)
            << " message=\"" << one_line(message) << "\"\n";
  return code;
}

std::unique_ptr<ScanBackend> make_backend(const RunConfig& config) {
  if (config.backend == "live") return std::make_unique<LiveBackend>(config.tools);
  if (config.fixture_dir.empty()) throw ConfigError("the fixture backend needs --fixture-dir");
  return std::make_unique<FixtureBackend>(config.fixture_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OSINT-enriched phishing email detection pipeline"};
  app.set_config("--config", "", "TOML config file; command-line flags override its keys");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::uint64_t seed = 0;
  std::string language = "en";
  bool verbose = false;

  app.add_option("--seed", seed, "Seed for sampling, splitting and training");
  app.add_option("--split-ratio", config.split_ratio, "Training share of each class")->capture_default_str();
  app.add_option("--backend", config.backend, "Probe backend")->check(CLI::IsMember({"fixture", "live"}))
      ->capture_default_str();
  app.add_option("--fixture-dir", config.fixture_dir, "Directory of <domain>.json probe fixtures");
  app.add_option("--nmap", config.tools.nmap, "nmap executable")->capture_default_str();
  app.add_option("--harvester", config.tools.harvester, "theHarvester executable or script")->capture_default_str();
  app.add_option("--harvester-interpreter", config.tools.harvester_interpreter,
                 "Interpreter used to run theHarvester, if any");
  app.add_option("--timeout", config.timeout_s, "Per-tool timeout in seconds")->capture_default_str();
  app.add_option("--parallelism", config.parallelism, "Concurrent domain probes")->capture_default_str();
  app.add_option("--web-ports", config.web_ports, "Ports counted as common web ports")->delimiter(',');
  app.add_option("--failure-threshold", config.failure_threshold,
                 "Highest tolerated share of domains with a failed probe")->capture_default_str();
  app.add_option("--param", config.params, "Hyperparameter override <model>.<key>=<value>");
  app.add_option("--grid", config.grid, "Grid entry <model>.<key>=<v1>,<v2>,...");
  app.add_flag("--grid-search", config.grid_search, "Select hyperparameters by cross-validated grid search");
  app.add_option("--folds", config.folds, "Cross-validation folds for grid search")->capture_default_str();
  app.add_option("--text-column", config.schema.text_column, "CSV column holding the email body")
      ->capture_default_str();
  app.add_option("--label-column", config.schema.label_column, "CSV column holding the label")->capture_default_str();
  app.add_option("--id-column", config.schema.id_column, "CSV column holding the record id")->capture_default_str();
  app.add_option("--language-column", config.schema.language_column, "CSV column holding the language tag")
      ->capture_default_str();
  app.add_option("--language", language, "Language for rows without a language column")
      ->check(CLI::IsMember({"en", "ar"}))
      ->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  std::string input, output;
  auto io = [&](CLI::App* sub) {
    sub->add_option("-i,--input", input, "Input file")->required();
    sub->add_option("-o,--output", output, "Output file")->required();
  };

  auto* ingest = app.add_subcommand("ingest", "Load a labeled CSV into the canonical corpus format");
  io(ingest);
  auto* dedup = app.add_subcommand("dedup", "Drop records whose trimmed body repeats an earlier one");
  io(dedup);

  std::size_t sample_n = 0;
  bool require_links = false;
  auto* sample = app.add_subcommand("sample", "Draw a seeded random sample");
  io(sample);
  sample->add_option("-n,--count", sample_n, "Sample size")->required();
  sample->add_flag("--require-links", require_links, "Only sample emails containing a URL, domain or address");

  auto* balance = app.add_subcommand("balance", "Undersample the majority class");
  io(balance);

  std::string train_out, test_out;
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("-i,--input", input, "Input corpus")->required();
  split->add_option("--train-out", train_out, "Training partition")->required();
  split->add_option("--test-out", test_out, "Test partition")->required();

  auto* extract = app.add_subcommand("extract", "Extract URLs, domains, emails and IPs as JSON lines");
  io(extract);
  auto* enrich = app.add_subcommand("enrich", "Probe every domain and append the OSINT feature columns");
  io(enrich);

  std::string train_in, test_in;
  bool osint = false;
  auto* featurize = app.add_subcommand("featurize", "Build train/test feature matrices");
  featurize->add_option("--train", train_in, "Training partition CSV")->required();
  featurize->add_option("--test", test_in, "Test partition CSV")->required();
  featurize->add_option("-o,--output", output, "Matrix prefix; writes <prefix>.train.* and <prefix>.test.*")
      ->required();
  featurize->add_flag("--osint", osint, "Append the OSINT columns (inputs must be enriched)");

  std::string model_kind, matrix;
  auto* train = app.add_subcommand("train", "Fit one model on a training matrix");
  train->add_option("--matrix", matrix, "Matrix prefix, e.g. work/matrix.train")->required();
  train->add_option("--model", model_kind, "dt, rf, svm, gbt or mnb")->required();
  train->add_option("-o,--output", output, "Model JSON")->required();

  std::string model_file, dataset_name;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a test matrix");
  evaluate->add_option("--model", model_file, "Model JSON")->required();
  evaluate->add_option("--matrix", matrix, "Matrix prefix, e.g. work/matrix.test")->required();
  evaluate->add_option("--dataset", dataset_name, "Dataset group name for the report")->required();
  evaluate->add_option("-o,--output", output, "Report JSON")->required();

  std::vector<std::string> report_inputs;
  std::string text_out;
  auto* report = app.add_subcommand("report", "Render report JSON files as reports.csv and a text table");
  report->add_option("inputs", report_inputs, "Report JSON files, in row order")->required();
  report->add_option("--csv", output, "reports.csv path")->required();
  report->add_option("--text", text_out, "Text table path");

  std::string english_sample, english_osint, arabic_sample, arabic_osint, workdir;
  auto* run_all_cmd = app.add_subcommand("run-all", "Run the 4 dataset groups x 5 models experiment grid");
  run_all_cmd->add_option("--english-sample", english_sample, "English Sample group CSV")->required();
  run_all_cmd->add_option("--english-osint", english_osint, "English OSINT group CSV")->required();
  run_all_cmd->add_option("--arabic-sample", arabic_sample, "Arabic Sample group CSV")->required();
  run_all_cmd->add_option("--arabic-osint", arabic_osint, "Arabic OSINT group CSV")->required();
  run_all_cmd->add_option("--workdir", workdir, "Directory for artifacts and reports.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", "", e.what());
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string stage_name = chosen->get_name();
  auto console = spdlog::stderr_color_st("osintphish");
  spdlog::set_default_logger(console);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (app.count("--seed") > 0) config.seed = seed;
    config.schema.default_language = parse_language(language);
    config.validate();

    if (chosen == ingest) {
      stage::ingest(input, output, config);
    } else if (chosen == dedup) {
      stage::dedup(input, output, config);
    } else if (chosen == sample) {
      stage::sample(input, output, sample_n, require_links, config);
    } else if (chosen == balance) {
      stage::balance(input, output, config);
    } else if (chosen == split) {
      stage::split(input, train_out, test_out, config);
    } else if (chosen == extract) {
      stage::extract(input, output, config);
    } else if (chosen == enrich) {
      auto backend = make_backend(config);
      stage::enrich(input, output, *backend, config);
    } else if (chosen == featurize) {
      stage::featurize(train_in, test_in, output, osint, config);
    } else if (chosen == train) {
      stage::train(matrix, parse_model_kind(model_kind), output, config);
    } else if (chosen == evaluate) {
      stage::evaluate(model_file, matrix, dataset_name, output, config);
    } else if (chosen == report) {
      stage::report(report_inputs, output, text_out, config);
    } else if (chosen == run_all_cmd) {
      auto backend = make_backend(config);
      const auto reports =
          run_all(standard_groups(english_sample, english_osint, arabic_sample, arabic_osint), workdir, *backend,
                  config);
      std::cout << render_report(reports);
    }
  } catch (const ProbeError& e) {
    return fail(kProbe, "probe", stage_name, e.what());
  } catch (const ConfigError& e) {
    return fail(kUsage, "config", stage_name, e.what());
  } catch (const SchemaError& e) {
    return fail(kData, "schema", stage_name, e.what());
  } catch (const Error& e) {
    return fail(kData, "data", stage_name, e.what());
  } catch (const std::exception& e) {
    return fail(kData, "io", stage_name, e.what());
  }
  return kOk;
}
