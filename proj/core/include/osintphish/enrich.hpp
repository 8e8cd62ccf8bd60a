/**
 * @file enrich.hpp
 * @brief Corpus-level OSINT enrichment: extract domains, probe each distinct
 *        domain once through a shared cache, aggregate per email.
 */
#pragma once

#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "osintphish/corpus.hpp"
#include "osintphish/csv.hpp"
#include "osintphish/osint.hpp"
#include "osintphish/probe.hpp"

namespace osintphish {

struct ProbeFailure {
  std::string domain;
  std::string tool;  ///< "nmap" or "theHarvester"
  std::string message;
};

struct DomainProbe {
  PortScanReport scan;
  HarvestReport harvest;
  std::vector<ProbeFailure> failures;
};

/// Get-or-compute map: the first caller for a key computes the value, every
/// concurrent or later caller waits for and shares that result.
class ScanCache {
 public:
  const DomainProbe& get_or_compute(const std::string& domain,
                                    const std::function<DomainProbe()>& compute);
  std::size_t computed() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_future<DomainProbe>> entries_;
};

struct EnrichOptions {
  std::size_t parallelism = 1;
  double timeout_s = 300.0;
  AggregationOptions aggregation;
};

struct EnrichedRecord {
  EmailRecord email;
  OsintFeatureRow features;
};

struct EnrichmentResult {
  std::vector<EnrichedRecord> rows;  ///< input order
  std::vector<ProbeFailure> failures;
  std::size_t domains_probed = 0;
};

/// Probes every distinct domain of the corpus exactly once on a pool of
/// `parallelism` workers. Failed probes contribute zeros and are reported in
/// `failures`. Throws ConfigError when parallelism is zero.
EnrichmentResult enrich_corpus(const Corpus& corpus, ScanBackend& backend,
                               const EnrichOptions& options = {});

/// Canonical corpus columns followed by the 17 feature columns.
csv::Table enriched_to_table(const std::vector<EnrichedRecord>& rows);
/// True when the table carries every feature column.
bool has_feature_columns(const csv::Table& table);
/// Reads canonical corpus columns plus feature columns.
std::vector<EnrichedRecord> enriched_from_table(const csv::Table& table);

}  // namespace osintphish
