#include "osintphish/enrich.hpp"

#include <atomic>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "osintphish/error.hpp"

namespace osintphish {
namespace {

DomainProbe probe_domain(ScanBackend& backend, const std::string& domain, double timeout_s) {
  DomainProbe probe;
  try {
    probe.scan = backend.scan(domain, timeout_s);
    if (probe.scan.timed_out) probe.failures.push_back({domain, "nmap", "timed out"});
  } catch (const Error& e) {
    probe.scan = failed_scan(domain);
    probe.failures.push_back({domain, "nmap", e.what()});
  }
  try {
    probe.harvest = backend.harvest(domain, timeout_s);
    if (probe.harvest.timed_out) probe.failures.push_back({domain, "theHarvester", "timed out"});
  } catch (const Error& e) {
    probe.harvest = failed_harvest(domain);
    probe.failures.push_back({domain, "theHarvester", e.what()});
  }
  for (const auto& f : probe.failures) {
    spdlog::warn("probe failed: domain={} tool={} reason={}", f.domain, f.tool, f.message);
  }
  return probe;
}

}  // namespace

const DomainProbe& ScanCache::get_or_compute(const std::string& domain,
                                             const std::function<DomainProbe()>& compute) {
  std::unique_lock lock(mutex_);
  if (auto it = entries_.find(domain); it != entries_.end()) {
    auto future = it->second;
    lock.unlock();
    return future.get();
  }
  std::promise<DomainProbe> promise;
  auto future = promise.get_future().share();
  entries_.emplace(domain, future);
  lock.unlock();
  try {
    promise.set_value(compute());
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  return future.get();
}

std::size_t ScanCache::computed() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

EnrichmentResult enrich_corpus(const Corpus& corpus, ScanBackend& backend,
                               const EnrichOptions& options) {
  if (options.parallelism == 0) throw ConfigError("parallelism must be at least 1");

  std::vector<ExtractionResult> extractions;
  extractions.reserve(corpus.size());
  std::vector<std::string> domains;
  std::unordered_set<std::string> seen;
  for (const auto& record : corpus.records) {
    extractions.push_back(extract_all(record.body));
    for (const auto& d : extractions.back().domains) {
      if (seen.insert(d).second) domains.push_back(d);
    }
  }

  ScanCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < domains.size(); i = next++) {
      cache.get_or_compute(domains[i],
                           [&] { return probe_domain(backend, domains[i], options.timeout_s); });
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(options.parallelism, std::max<std::size_t>(domains.size(), 1));
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  EnrichmentResult result;
  result.domains_probed = cache.computed();
  std::map<std::string, PortScanReport> scans;
  std::map<std::string, HarvestReport> harvests;
  for (const auto& d : domains) {
    const DomainProbe& probe = cache.get_or_compute(d, [] { return DomainProbe{}; });
    scans.emplace(d, probe.scan);
    harvests.emplace(d, probe.harvest);
    result.failures.insert(result.failures.end(), probe.failures.begin(), probe.failures.end());
  }
  result.rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    result.rows.push_back(
        {corpus.records[i], aggregate_features(extractions[i], scans, harvests, options.aggregation)});
  }
  return result;
}

csv::Table enriched_to_table(const std::vector<EnrichedRecord>& rows) {
  Corpus corpus;
  for (const auto& r : rows) corpus.records.push_back(r.email);
  csv::Table table = corpus_to_table(corpus);
  const auto& names = osint_feature_names();
  table.header.insert(table.header.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto cells = feature_cells(rows[i].features);
    table.rows[i].insert(table.rows[i].end(), cells.begin(), cells.end());
  }
  return table;
}

bool has_feature_columns(const csv::Table& table) {
  for (const auto& name : osint_feature_names()) {
    if (!table.column(name)) return false;
  }
  return true;
}

std::vector<EnrichedRecord> enriched_from_table(const csv::Table& table) {
  const Corpus corpus = corpus_from_table(table);
  std::vector<std::size_t> columns;
  for (const auto& name : osint_feature_names()) {
    const auto col = table.column(name);
    if (!col) throw SchemaError("missing column '" + name + "'");
    columns.push_back(*col);
  }
  std::vector<EnrichedRecord> rows;
  rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<std::string> cells;
    for (std::size_t c : columns) cells.push_back(table.rows[i][c]);
    try {
      rows.push_back({corpus.records[i], parse_feature_cells(cells)});
    } catch (const DataError& e) {
      throw DataError(e.what(), i + 1);
    }
  }
  return rows;
}

}  // namespace osintphish
