/**
 * @file osint.hpp
 * @brief Port-scan and harvest reports, their text parsers, and per-email
 *        aggregation into the 17 OSINT features.
 *
 * Reports are parsed from the normal (human-readable) output of nmap and
 * theHarvester. Every summed feature is the sum of its per-domain value over
 * the distinct domains extracted from one email.
 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "osintphish/extract.hpp"

namespace osintphish {

enum class Protocol { Tcp, Udp };
enum class PortState { Open, Filtered, Closed };

struct PortEntry {
  int port = 0;
  Protocol protocol = Protocol::Tcp;
  PortState state = PortState::Open;
  std::string service;
  bool operator==(const PortEntry&) const = default;
};

struct PortScanReport {
  std::string domain;
  bool host_up = false;
  std::optional<std::string> primary_ip;
  std::vector<std::string> alternate_ips;
  std::optional<std::string> rdns;
  std::vector<PortEntry> ports;
  double latency_s = 0.0;
  double scan_duration_s = 0.0;
  bool timed_out = false;  ///< lineage flag set by the live backend

  std::size_t count(PortState state) const;
  /// Throws DataError when an invariant does not hold.
  void validate() const;
  bool operator==(const PortScanReport&) const = default;
};

struct HarvestReport {
  std::string domain;
  std::size_t hosts_found = 0;
  std::size_t interesting_urls = 0;
  std::size_t asns_found = 0;
  std::size_t ips_found = 0;
  std::size_t emails_found = 0;
  bool timed_out = false;
  bool operator==(const HarvestReport&) const = default;
};

/// Marker stored in categorical features when an email has no domain.
inline constexpr std::string_view kEmptyMarker = "";

/// Default "open web server ports" set.
inline const std::set<int> kDefaultWebPorts = {80, 443, 8080, 8443};

struct OsintFeatureRow {
  std::string hostname{kEmptyMarker};
  double host_up = 0;
  double alternate_ip_count = 0;
  std::string ip_address{kEmptyMarker};
  double common_web_ports_open = 0;
  double open_ports_count = 0;
  double filtered_ports_count = 0;
  std::set<int> open_ports;
  std::string rdns_record{kEmptyMarker};
  double https_supported = 0;
  std::set<std::string> services;
  double host_found = 0;
  double interesting_url = 0;
  double asn_found = 0;
  double ip_found = 0;
  double latency = 0;
  double scan_duration = 0;
  bool operator==(const OsintFeatureRow&) const = default;
};

/// The 17 feature names in column order.
const std::vector<std::string>& osint_feature_names();

/// Feature values as CSV cells in `osint_feature_names()` order. Sets are
/// ';'-joined.
std::vector<std::string> feature_cells(const OsintFeatureRow& row);
/// Inverse of feature_cells. Throws DataError on malformed cells.
OsintFeatureRow parse_feature_cells(const std::vector<std::string>& cells);

PortScanReport parse_nmap_output(std::string_view raw);
/// Canonical normal-format text for a report; parse_nmap_output inverts it.
std::string render_nmap_output(const PortScanReport& report);

HarvestReport parse_harvester_output(std::string_view raw);
std::string render_harvester_output(const HarvestReport& report);

/// Report for a domain whose probe failed: host down, all counts zero.
PortScanReport failed_scan(const std::string& domain);
HarvestReport failed_harvest(const std::string& domain);

struct AggregationOptions {
  std::set<int> web_ports = kDefaultWebPorts;
};

/// Number of literal IPs an email contributes to ip_found, plus the harvested
/// IP counts of its domains.
double ip_found_count(const ExtractionResult& extraction,
                      const std::vector<const HarvestReport*>& harvests);

/// Throws DataError naming the first domain missing from either map.
OsintFeatureRow aggregate_features(const ExtractionResult& extraction,
                                   const std::map<std::string, PortScanReport>& scans,
                                   const std::map<std::string, HarvestReport>& harvests,
                                   const AggregationOptions& options = {});

void to_json(nlohmann::json& j, const PortEntry& e);
void from_json(const nlohmann::json& j, PortEntry& e);
void to_json(nlohmann::json& j, const PortScanReport& r);
void from_json(const nlohmann::json& j, PortScanReport& r);
void to_json(nlohmann::json& j, const HarvestReport& r);
void from_json(const nlohmann::json& j, HarvestReport& r);
void to_json(nlohmann::json& j, const ExtractionResult& r);

}  // namespace osintphish
