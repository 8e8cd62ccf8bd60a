#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "osintphish/digest.hpp"
#include "osintphish/pipeline.hpp"

using namespace osintphish;
namespace fs = std::filesystem;

namespace {

const std::string kData = OSINTPHISH_DATA_DIR;
const std::string kEnglish = kData + "/fixture/english.csv";
const std::string kDomains = kData + "/fixture/domains";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("osintphish_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig config_with_seed(std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  c.fixture_dir = kDomains;
  return c;
}

}  // namespace

TEST_CASE("config validation and hyperparameter overrides") {
  RunConfig c;
  CHECK_THROWS_AS(c.require_seed("split"), ConfigError);
  c.split_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.split_ratio = 0.7;
  c.parallelism = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.parallelism = 1;
  c.params = {"rf.n_estimators=7", "svm.C=3"};
  CHECK(c.hyperparams(ModelKind::RF).count("n_estimators") == 7);
  CHECK(c.hyperparams(ModelKind::SVM).number("C") == 3);
  CHECK(c.hyperparams(ModelKind::DT) == Hyperparams::defaults(ModelKind::DT));
  c.params = {"rf.bogus=1"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.params = {"n_estimators=1"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  RunConfig d;
  d.seed = 1;
  RunConfig e = d;
  CHECK(d.digest() == e.digest());
  e.seed = 2;
  CHECK(d.digest() != e.digest());
}

TEST_CASE("dedup of a duplicate-free canonical corpus is byte-identical") {
  const fs::path dir = scratch("dedup");
  const RunConfig c = config_with_seed(1);
  stage::ingest(kEnglish, (dir / "corpus.csv").string(), c);
  stage::dedup((dir / "corpus.csv").string(), (dir / "dedup.csv").string(), c);
  CHECK(sha256_file((dir / "corpus.csv").string()) == sha256_file((dir / "dedup.csv").string()));
  CHECK(fs::exists(dir / "dedup.csv.lineage.json"));
  CHECK(slurp(dir / "dedup.csv.lineage.json").find("\"seed\": null") != std::string::npos);
}

TEST_CASE("sampling stages require a seed") {
  const fs::path dir = scratch("seed");
  RunConfig c;
  CHECK_THROWS_AS(stage::sample(kEnglish, (dir / "s.csv").string(), 5, false, c), ConfigError);
  CHECK_THROWS_AS(stage::balance(kEnglish, (dir / "b.csv").string(), c), ConfigError);
  CHECK_THROWS_AS(stage::split(kEnglish, (dir / "a.csv").string(), (dir / "b.csv").string(), c), ConfigError);
}

TEST_CASE("enrichment with fixtures is byte-identical across runs and keeps features through split") {
  const fs::path dir = scratch("enrich");
  const RunConfig c = config_with_seed(3);
  FixtureBackend backend(kDomains);
  stage::enrich(kEnglish, (dir / "a.csv").string(), backend, c);
  stage::enrich(kEnglish, (dir / "b.csv").string(), backend, c);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv.lineage.json") == slurp(dir / "b.csv.lineage.json"));
  const Dataset enriched = load_dataset((dir / "a.csv").string());
  REQUIRE(enriched.features.has_value());
  CHECK(enriched.features->size() == 40);

  stage::split((dir / "a.csv").string(), (dir / "train.csv").string(), (dir / "test.csv").string(), c);
  const Dataset train = load_dataset((dir / "train.csv").string());
  REQUIRE(train.features.has_value());
  CHECK(train.corpus.size() == 28);
  for (std::size_t i = 0; i < train.corpus.size(); ++i) {
    const auto& id = train.corpus.records[i].id;
    for (std::size_t j = 0; j < enriched.corpus.size(); ++j) {
      if (enriched.corpus.records[j].id == id) CHECK((*train.features)[i] == (*enriched.features)[j]);
    }
  }
}

TEST_CASE("probe failures beyond the threshold raise after writing output") {
  const fs::path dir = scratch("threshold");
  RunConfig c = config_with_seed(1);
  c.failure_threshold = 0.0;
  FixtureBackend empty(std::map<std::string, Fixture>{});
  CHECK_THROWS_AS(stage::enrich(kEnglish, (dir / "e.csv").string(), empty, c), ProbeThresholdError);
  CHECK(fs::exists(dir / "e.csv"));
  c.failure_threshold = 1.0;
  CHECK_NOTHROW(stage::enrich(kEnglish, (dir / "e.csv").string(), empty, c));
}

TEST_CASE("extract writes one JSON line per record") {
  const fs::path dir = scratch("extract");
  stage::extract(kEnglish, (dir / "x.jsonl").string(), config_with_seed(1));
  std::ifstream in(dir / "x.jsonl");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("domains"));
    ++lines;
  }
  CHECK(lines == 40);
}

TEST_CASE("featurize with OSINT requires enriched inputs") {
  const fs::path dir = scratch("featurize");
  const RunConfig c = config_with_seed(2);
  stage::split(kEnglish, (dir / "train.csv").string(), (dir / "test.csv").string(), c);
  CHECK_THROWS_AS(stage::featurize((dir / "train.csv").string(), (dir / "test.csv").string(),
                                   (dir / "m").string(), true, c),
                  SchemaError);
  stage::featurize((dir / "train.csv").string(), (dir / "test.csv").string(), (dir / "m").string(), false, c);
  CHECK(fs::exists(dir / "m.train.triplets"));
  CHECK(fs::exists(dir / "m.test.manifest.json"));
  CHECK(fs::exists(dir / "m.train.triplets.lineage.json"));
}

#ifdef OSINTPHISH_CLI
namespace {

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(OSINTPHISH_CLI) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli exit codes and diagnostics") {
  const fs::path dir = scratch("cli");
  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("ingest -i " + kEnglish + " -o " + (dir / "c.csv").string(), err) == 0);
  CHECK(run_cli("no-such-command", err) == 1);
  CHECK(slurp(err).find("kind=usage") != std::string::npos);
  CHECK(run_cli("split -i " + kEnglish + " --train-out a.csv --test-out b.csv", err) == 1);
  CHECK(slurp(err).find("--seed") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "text,label\nhello,Spam\n";
  CHECK(run_cli("ingest -i " + (dir / "bad.csv").string() + " -o " + (dir / "o.csv").string(), err) == 2);
  const std::string diag = slurp(err);
  CHECK(diag.find("code=2") != std::string::npos);
  CHECK(diag.find("row 1") != std::string::npos);
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 1);

  std::ofstream(dir / "unknown.csv") << "text,label\nsee https://unknown.example/x,Phishing Email\n";
  CHECK(run_cli("--fixture-dir " + kDomains + " enrich -i " + (dir / "unknown.csv").string() + " -o " +
                    (dir / "u.csv").string(),
                err) == 3);
  CHECK(slurp(err).find("kind=probe") != std::string::npos);
  CHECK(run_cli("--fixture-dir " + kDomains + " --failure-threshold 1 enrich -i " + (dir / "unknown.csv").string() +
                    " -o " + (dir / "u.csv").string(),
                err) == 0);
}

TEST_CASE("cli reads a TOML config and flags override it") {
  const fs::path dir = scratch("cli_config");
  std::ofstream(dir / "c.toml") << "seed = 5\nsplit-ratio = 0.5\n";
  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("--config " + (dir / "c.toml").string() + " split -i " + kEnglish + " --train-out " +
                    (dir / "a.csv").string() + " --test-out " + (dir / "b.csv").string(),
                err) == 0);
  CHECK(load_dataset((dir / "a.csv").string()).corpus.size() == 20);
  CHECK(run_cli("--config " + (dir / "c.toml").string() + " --split-ratio 0.7 split -i " + kEnglish +
                    " --train-out " + (dir / "a.csv").string() + " --test-out " + (dir / "b.csv").string(),
                err) == 0);
  CHECK(load_dataset((dir / "a.csv").string()).corpus.size() == 28);
  CHECK(slurp(dir / "a.csv.lineage.json").find("\"seed\": 5") != std::string::npos);
}
#endif
