// Micro benchmarks for the hot paths: extraction, report parsing, tree
// induction, the SVM solver and naive Bayes training.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "osintphish/extract.hpp"
#include "osintphish/features.hpp"
#include "osintphish/models.hpp"
#include "osintphish/osint.hpp"
#include "osintphish/probe.hpp"
#include "osintphish/rng.hpp"
#include "osintphish/tree.hpp"

using namespace osintphish;

namespace {

std::string email_body(std::size_t links) {
  std::string body = "Dear customer, your account needs attention. Contact help@service.example today. ";
  for (std::size_t i = 0; i < links; ++i) {
    body += "See https://portal" + std::to_string(i) + ".example.com/login?id=" + std::to_string(i * 7) +
            " or 192.0.2." + std::to_string(i % 250) + ". ";
  }
  return body;
}

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  m.cols = cols;
  for (std::size_t c = 0; c < cols; ++c) m.column_names.push_back("f" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    const bool phishing = r % 2 == 1;
    SparseVector v;
    for (std::size_t c = 0; c < cols; ++c) {
      const double bias = phishing && c < cols / 4 ? 0.5 : 0.0;
      if (rng.unit() < 0.3 + bias) {
        v.indices.push_back(static_cast<std::uint32_t>(c));
        v.values.push_back(static_cast<double>(1 + rng.below(3)));
      }
    }
    m.append_row(v, phishing ? Label::Phishing : Label::Safe);
  }
  return m;
}

void BM_ExtractAll(benchmark::State& state) {
  const std::string body = email_body(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(body));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_ExtractAll)->Arg(1)->Arg(16)->Arg(128);

void BM_ParseNmap(benchmark::State& state) {
  const Fixture fixture = load_fixture(std::string(OSINTPHISH_DATA_DIR) +
                                       "/fixture/domains/secure-account-verify.com.json");
  for (auto _ : state) benchmark::DoNotOptimize(parse_nmap_output(fixture.nmap_raw));
}
BENCHMARK(BM_ParseNmap);

void BM_ClassTree(benchmark::State& state) {
  const FeatureMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 64, 1);
  const Columns columns = m.dense_columns();
  std::vector<int> labels;
  for (Label l : m.labels) labels.push_back(static_cast<int>(l));
  std::vector<std::size_t> samples(m.rows());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = i;
  ClassTreeParams params;
  for (auto _ : state) benchmark::DoNotOptimize(build_class_tree(columns, labels, samples, params, nullptr));
}
BENCHMARK(BM_ClassTree)->Arg(200)->Arg(1000);

void BM_SvmDual(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<std::vector<double>> rows(n, std::vector<double>(8));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 ? 1 : -1;
    for (auto& v : rows[i]) v = rng.unit() * 2 - 1 + 0.4 * y[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_svm_dual(rows, y, 100, 0.1, 1e-3, 10000));
}
BENCHMARK(BM_SvmDual)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_TrainMnb(benchmark::State& state) {
  const FeatureMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 2000, 3);
  const Hyperparams hp = Hyperparams::defaults(ModelKind::MNB);
  for (auto _ : state) benchmark::DoNotOptimize(train_mnb(m, hp));
}
BENCHMARK(BM_TrainMnb)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
