/**
 * @file probe.hpp
 * @brief Scan backends: live child processes running nmap and theHarvester,
 *        or a fixture store replaying recorded tool output.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osintphish/osint.hpp"

namespace osintphish {

struct ToolPaths {
  std::string nmap = "nmap";
  std::string harvester = "theHarvester";
  /// When set, the harvester runs as `<interpreter> <harvester> ...`
  /// (e.g. "python" with "theHarvester.py").
  std::string harvester_interpreter;
};

/// `nmap -Pn -T4 --max-retries 3 <domain>`
std::vector<std::string> nmap_command(const ToolPaths& tools, const std::string& domain);
/// `theHarvester -d <domain> -l 500 -b all`
std::vector<std::string> harvester_command(const ToolPaths& tools, const std::string& domain);

struct ProcessResult {
  int exit_code = -1;
  std::string output;  ///< captured stdout
  bool timed_out = false;
};

/// Runs argv[0] (searched on PATH) with stdout captured and stderr
/// discarded. The whole process group is killed once `timeout_s` elapses.
/// Throws ProbeError if the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s);

class ScanBackend {
 public:
  virtual ~ScanBackend() = default;
  virtual PortScanReport scan(const std::string& domain, double timeout_s) = 0;
  virtual HarvestReport harvest(const std::string& domain, double timeout_s) = 0;
};

class LiveBackend final : public ScanBackend {
 public:
  explicit LiveBackend(ToolPaths tools = {}) : tools_(std::move(tools)) {}
  PortScanReport scan(const std::string& domain, double timeout_s) override;
  HarvestReport harvest(const std::string& domain, double timeout_s) override;

 private:
  ToolPaths tools_;
};

/// One recorded probe of a domain. The structured reports are optional and,
/// when present, must equal what the raw text parses to.
struct Fixture {
  std::string domain;
  std::string nmap_raw;
  std::string harvester_raw;
  std::string recorded_at;
  std::optional<PortScanReport> nmap;
  std::optional<HarvestReport> harvester;
};

void to_json(nlohmann::json& j, const Fixture& f);
void from_json(const nlohmann::json& j, Fixture& f);
Fixture load_fixture(const std::string& path);
void save_fixture(const std::string& path, const Fixture& fixture);

/// Replays fixtures, either from a directory of `<domain>.json` files or
/// from an in-memory map. Throws MissingFixtureError for unknown domains.
class FixtureBackend final : public ScanBackend {
 public:
  explicit FixtureBackend(std::string directory) : directory_(std::move(directory)) {}
  explicit FixtureBackend(std::map<std::string, Fixture> fixtures) : fixtures_(std::move(fixtures)) {}

  PortScanReport scan(const std::string& domain, double timeout_s) override;
  HarvestReport harvest(const std::string& domain, double timeout_s) override;

  /// Every fixture in the store, keyed by domain.
  std::map<std::string, Fixture> all() const;

 private:
  Fixture fixture_for(const std::string& domain) const;

  std::string directory_;
  std::map<std::string, Fixture> fixtures_;
};

}  // namespace osintphish
