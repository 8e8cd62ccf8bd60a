#include "osintphish/osint.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "osintphish/error.hpp"
#include "osintphish/format.hpp"

namespace osintphish {
namespace {

std::vector<std::string_view> split_lines(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == raw.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_ipv4(std::string_view token) {
  const auto found = extract_ips(token);
  return found.size() == 1 && found.front() == token;
}

std::string_view state_name(PortState state) {
  switch (state) {
    case PortState::Open: return "open";
    case PortState::Filtered: return "filtered";
    case PortState::Closed: return "closed";
  }
  return "closed";
}

PortState parse_state(std::string_view text) {
  if (text == "open") return PortState::Open;
  if (text == "closed" || text == "unfiltered") return PortState::Closed;
  // filtered, open|filtered, closed|filtered
  if (text.find("filtered") != std::string_view::npos) return PortState::Filtered;
  throw DataError("unknown port state '" + std::string(text) + "'");
}

std::string_view protocol_name(Protocol p) { return p == Protocol::Udp ? "udp" : "tcp"; }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? text.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::size_t PortScanReport::count(PortState state) const {
  return static_cast<std::size_t>(std::count_if(
      ports.begin(), ports.end(), [state](const PortEntry& e) { return e.state == state; }));
}

void PortScanReport::validate() const {
  if (!host_up && !ports.empty()) throw DataError("report for '" + domain + "': host down but ports listed");
  if (latency_s < 0 || scan_duration_s < 0) throw DataError("report for '" + domain + "': negative timing");
  if (latency_s > scan_duration_s && scan_duration_s > 0) {
    throw DataError("report for '" + domain + "': latency exceeds scan duration");
  }
  for (const auto& p : ports) {
    if (p.port < 1 || p.port > 65535) throw DataError("report for '" + domain + "': port out of range");
  }
}

PortScanReport parse_nmap_output(std::string_view raw) {
  static const std::regex kReport(R"(^Nmap scan report for (\S+)(?: \(([^)]+)\))?)");
  static const std::regex kFailed(R"(^Failed to resolve \"([^\"]+)\")");
  static const std::regex kLatency(R"(^Host is up.*\(([0-9.eE+-]+)s latency\))");
  static const std::regex kOther(R"(^Other addresses for \S+ \(not scanned\):(.*)$)");
  static const std::regex kRdns(R"(^rDNS record for \S+: (\S+))");
  static const std::regex kPort(R"(^(\d+)/(tcp|udp)\s+(\S+)(?:\s+(\S+))?)");
  static const std::regex kDone(R"(^Nmap done:.*\((\d+) hosts? up\) scanned in ([0-9.eE+-]+) seconds)");

  PortScanReport report;
  bool done = false;
  bool up_line = false;
  std::size_t hosts_up = 0;
  std::cmatch m;
  for (std::string_view line : split_lines(raw)) {
    const char* b = line.data();
    const char* e = line.data() + line.size();
    if (std::regex_search(b, e, m, kDone)) {
      done = true;
      hosts_up = static_cast<std::size_t>(parse_int(m.str(1), "hosts up"));
      report.scan_duration_s = parse_double(m.str(2), "scan duration");
    } else if (std::regex_search(b, e, m, kReport)) {
      std::string name = m.str(1);
      if (m[2].matched && is_ipv4(m.str(2))) {
        report.primary_ip = m.str(2);
      } else if (is_ipv4(name)) {
        report.primary_ip = name;
      }
      report.domain = std::move(name);
    } else if (std::regex_search(b, e, m, kFailed)) {
      report.domain = m.str(1);
    } else if (line.rfind("Host is up", 0) == 0) {
      up_line = true;
      if (std::regex_search(b, e, m, kLatency)) report.latency_s = parse_double(m.str(1), "latency");
    } else if (std::regex_search(b, e, m, kOther)) {
      std::istringstream tokens(m.str(1));
      for (std::string token; tokens >> token;) {
        if (is_ipv4(token)) report.alternate_ips.push_back(token);
      }
    } else if (std::regex_search(b, e, m, kRdns)) {
      report.rdns = m.str(1);
    } else if (std::regex_search(b, e, m, kPort)) {
      PortEntry entry;
      entry.port = static_cast<int>(parse_int(m.str(1), "port"));
      if (entry.port < 1 || entry.port > 65535) continue;
      entry.protocol = m.str(2) == "udp" ? Protocol::Udp : Protocol::Tcp;
      try {
        entry.state = parse_state(m.str(3));
      } catch (const DataError&) {
        continue;  // not a port-table row
      }
      entry.service = m[4].matched ? m.str(4) : std::string();
      report.ports.push_back(std::move(entry));
    }
  }
  if (!done) throw ParseError("truncated nmap output: missing 'Nmap done' trailer", std::string(raw));
  report.host_up = hosts_up > 0;
  if (!report.host_up) {
    report.ports.clear();
    if (!up_line) report.latency_s = 0.0;
  }
  return report;
}

std::string render_nmap_output(const PortScanReport& r) {
  std::ostringstream out;
  out << "Starting Nmap 7.94SVN ( https://nmap.org )\n";
  if (r.primary_ip || r.host_up) {
    out << "Nmap scan report for " << r.domain;
    if (r.primary_ip && *r.primary_ip != r.domain) out << " (" << *r.primary_ip << ")";
    out << "\n";
    if (r.host_up) {
      if (r.latency_s > 0) {
        out << "Host is up (" << format_double(r.latency_s) << "s latency).\n";
      } else {
        out << "Host is up.\n";
      }
    } else {
      out << "Note: Host seems down.\n";
    }
  } else {
    out << "Failed to resolve \"" << r.domain << "\".\n";
  }
  if (!r.alternate_ips.empty()) {
    out << "Other addresses for " << r.domain << " (not scanned): " << join(r.alternate_ips, " ") << "\n";
  }
  if (r.rdns) out << "rDNS record for " << r.primary_ip.value_or(r.domain) << ": " << *r.rdns << "\n";
  if (!r.ports.empty()) {
    out << "PORT      STATE    SERVICE\n";
    for (const auto& p : r.ports) {
      std::string head = std::to_string(p.port) + "/" + std::string(protocol_name(p.protocol));
      head.resize(std::max<std::size_t>(head.size() + 1, 10), ' ');
      std::string state(state_name(p.state));
      if (!p.service.empty()) state.resize(std::max<std::size_t>(state.size() + 1, 9), ' ');
      out << head << state << p.service << "\n";
    }
  }
  out << "\n";
  const bool resolved = r.primary_ip || r.host_up;
  out << "Nmap done: " << (resolved ? "1 IP address" : "0 IP addresses") << " ("
      << (r.host_up ? "1 host up" : "0 hosts up") << ") scanned in "
      << format_double(r.scan_duration_s) << " seconds\n";
  return out.str();
}

HarvestReport parse_harvester_output(std::string_view raw) {
  HarvestReport report;
  std::size_t* current = nullptr;
  for (std::string_view line : split_lines(raw)) {
    const std::string_view t = trim(line);
    if (t.rfind("[", 0) == 0) {
      current = nullptr;
      if (t.rfind("[*] Target:", 0) == 0) {
        report.domain = std::string(trim(t.substr(11)));
        continue;
      }
      if (t.rfind("[*] ", 0) != 0) continue;
      const std::size_t found = t.find(" found:");
      if (found == std::string_view::npos) continue;
      std::string section(t.substr(4, found - 4));
      for (char& c : section) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (section == "hosts") current = &report.hosts_found;
      else if (section == "interesting urls") current = &report.interesting_urls;
      else if (section == "asns") current = &report.asns_found;
      else if (section == "ips") current = &report.ips_found;
      else if (section == "emails") current = &report.emails_found;
      continue;
    }
    if (!current || t.empty()) continue;
    if (std::all_of(t.begin(), t.end(), [](char c) { return c == '-'; })) continue;
    ++*current;
  }
  return report;
}

std::string render_harvester_output(const HarvestReport& r) {
  std::ostringstream out;
  out << "*******************************************************************\n"
      << "*  theHarvester                                                   *\n"
      << "*******************************************************************\n\n"
      << "[*] Target: " << r.domain << "\n\n";
  auto section = [&](std::string_view title, std::size_t n, auto item) {
    if (n == 0) {
      out << "[*] No " << title << " found.\n";
      return;
    }
    out << "[*] " << title << " found: " << n << "\n--------------------\n";
    for (std::size_t i = 1; i <= n; ++i) out << item(i) << "\n";
    out << "\n";
  };
  const std::string& d = r.domain;
  section("ASNS", r.asns_found, [](std::size_t i) { return "AS" + std::to_string(64511 + i); });
  section("Interesting Urls", r.interesting_urls,
          [&](std::size_t i) { return "https://" + d + "/item-" + std::to_string(i); });
  section("IPs", r.ips_found, [](std::size_t i) {
    return "10." + std::to_string(i / 65536 % 256) + "." + std::to_string(i / 256 % 256) + "." +
           std::to_string(i % 256);
  });
  section("Emails", r.emails_found, [&](std::size_t i) { return "user" + std::to_string(i) + "@" + d; });
  section("Hosts", r.hosts_found, [&](std::size_t i) { return "host" + std::to_string(i) + "." + d; });
  return out.str();
}

PortScanReport failed_scan(const std::string& domain) {
  PortScanReport r;
  r.domain = domain;
  return r;
}

HarvestReport failed_harvest(const std::string& domain) {
  HarvestReport r;
  r.domain = domain;
  return r;
}

const std::vector<std::string>& osint_feature_names() {
  static const std::vector<std::string> names = {
      "hostname",      "host_up",         "alternate_ip_count",    "ip_address",
      "common_web_ports_open", "open_ports_count", "filtered_ports_count", "open_ports",
      "rdns_record",   "https_supported", "services",              "host_found",
      "interesting_url", "asn_found",     "ip_found",              "latency",
      "scan_duration"};
  return names;
}

std::vector<std::string> feature_cells(const OsintFeatureRow& row) {
  std::vector<std::string> ports;
  for (int p : row.open_ports) ports.push_back(std::to_string(p));
  std::vector<std::string> services(row.services.begin(), row.services.end());
  return {row.hostname,
          format_double(row.host_up),
          format_double(row.alternate_ip_count),
          row.ip_address,
          format_double(row.common_web_ports_open),
          format_double(row.open_ports_count),
          format_double(row.filtered_ports_count),
          join(ports, ";"),
          row.rdns_record,
          format_double(row.https_supported),
          join(services, ";"),
          format_double(row.host_found),
          format_double(row.interesting_url),
          format_double(row.asn_found),
          format_double(row.ip_found),
          format_double(row.latency),
          format_double(row.scan_duration)};
}

OsintFeatureRow parse_feature_cells(const std::vector<std::string>& cells) {
  const auto& names = osint_feature_names();
  if (cells.size() != names.size()) {
    throw DataError("expected " + std::to_string(names.size()) + " feature cells, got " +
                    std::to_string(cells.size()));
  }
  auto number = [&](std::size_t i) {
    const double v = parse_double(cells[i], names[i]);
    if (v < 0) throw DataError("negative value for " + names[i]);
    return v;
  };
  OsintFeatureRow row;
  row.hostname = cells[0];
  row.host_up = number(1);
  row.alternate_ip_count = number(2);
  row.ip_address = cells[3];
  row.common_web_ports_open = number(4);
  row.open_ports_count = number(5);
  row.filtered_ports_count = number(6);
  for (const auto& p : split(cells[7], ';')) row.open_ports.insert(static_cast<int>(parse_int(p, "open_ports")));
  row.rdns_record = cells[8];
  row.https_supported = number(9);
  for (auto& s : split(cells[10], ';')) row.services.insert(std::move(s));
  row.host_found = number(11);
  row.interesting_url = number(12);
  row.asn_found = number(13);
  row.ip_found = number(14);
  row.latency = number(15);
  row.scan_duration = number(16);
  return row;
}

double ip_found_count(const ExtractionResult& extraction,
                      const std::vector<const HarvestReport*>& harvests) {
  double total = static_cast<double>(extraction.ips.size());
  for (const auto* h : harvests) total += static_cast<double>(h->ips_found);
  return total;
}

OsintFeatureRow aggregate_features(const ExtractionResult& extraction,
                                   const std::map<std::string, PortScanReport>& scans,
                                   const std::map<std::string, HarvestReport>& harvests,
                                   const AggregationOptions& options) {
  // Sums run in sorted-domain order so floating-point totals do not depend on
  // the order domains appear in the email.
  std::set<std::string> domains;
  for (const auto& d : extraction.domains) {
    if (!scans.count(d)) throw DataError("no scan report for domain '" + d + "'");
    if (!harvests.count(d)) throw DataError("no harvest report for domain '" + d + "'");
    domains.insert(d);
  }

  OsintFeatureRow row;
  std::vector<const HarvestReport*> harvested;
  for (const auto& d : domains) {
    const PortScanReport& scan = scans.at(d);
    const HarvestReport& harvest = harvests.at(d);
    harvested.push_back(&harvest);

    row.host_up += scan.host_up ? 1 : 0;
    row.alternate_ip_count += static_cast<double>(scan.alternate_ips.size());
    bool https = false;
    for (const auto& p : scan.ports) {
      if (p.state == PortState::Open) {
        row.open_ports_count += 1;
        row.open_ports.insert(p.port);
        if (!p.service.empty()) row.services.insert(p.service);
        if (p.protocol == Protocol::Tcp) {
          if (options.web_ports.count(p.port)) row.common_web_ports_open += 1;
          if (p.port == 443) https = true;
        }
      } else if (p.state == PortState::Filtered) {
        row.filtered_ports_count += 1;
      }
    }
    row.https_supported += https ? 1 : 0;
    row.host_found += static_cast<double>(harvest.hosts_found);
    row.interesting_url += static_cast<double>(harvest.interesting_urls);
    row.asn_found += static_cast<double>(harvest.asns_found);
    row.latency += scan.latency_s;
    row.scan_duration += scan.scan_duration_s;
  }
  row.ip_found = ip_found_count(extraction, harvested);

  if (!extraction.domains.empty()) {
    const std::string& first = extraction.domains.front();
    const PortScanReport& scan = scans.at(first);
    row.hostname = first;
    row.ip_address = scan.primary_ip.value_or(std::string(kEmptyMarker));
    row.rdns_record = scan.rdns.value_or(std::string(kEmptyMarker));
  }
  return row;
}

void to_json(nlohmann::json& j, const PortEntry& e) {
  j = {{"port", e.port},
       {"protocol", std::string(protocol_name(e.protocol))},
       {"state", std::string(state_name(e.state))},
       {"service", e.service}};
}

void from_json(const nlohmann::json& j, PortEntry& e) {
  e.port = j.at("port").get<int>();
  e.protocol = j.at("protocol").get<std::string>() == "udp" ? Protocol::Udp : Protocol::Tcp;
  e.state = parse_state(j.at("state").get<std::string>());
  e.service = j.value("service", "");
}

void to_json(nlohmann::json& j, const PortScanReport& r) {
  j = {{"domain", r.domain},
       {"host_up", r.host_up},
       {"primary_ip", r.primary_ip ? nlohmann::json(*r.primary_ip) : nlohmann::json()},
       {"alternate_ips", r.alternate_ips},
       {"rdns", r.rdns ? nlohmann::json(*r.rdns) : nlohmann::json()},
       {"ports", r.ports},
       {"latency_s", r.latency_s},
       {"scan_duration_s", r.scan_duration_s},
       {"timed_out", r.timed_out}};
}

void from_json(const nlohmann::json& j, PortScanReport& r) {
  r.domain = j.at("domain").get<std::string>();
  r.host_up = j.at("host_up").get<bool>();
  r.primary_ip = j.contains("primary_ip") && !j["primary_ip"].is_null()
                     ? std::optional(j["primary_ip"].get<std::string>())
                     : std::nullopt;
  r.alternate_ips = j.value("alternate_ips", std::vector<std::string>{});
  r.rdns = j.contains("rdns") && !j["rdns"].is_null() ? std::optional(j["rdns"].get<std::string>())
                                                      : std::nullopt;
  r.ports = j.value("ports", std::vector<PortEntry>{});
  r.latency_s = j.value("latency_s", 0.0);
  r.scan_duration_s = j.value("scan_duration_s", 0.0);
  r.timed_out = j.value("timed_out", false);
}

void to_json(nlohmann::json& j, const HarvestReport& r) {
  j = {{"domain", r.domain},
       {"hosts_found", r.hosts_found},
       {"interesting_urls", r.interesting_urls},
       {"asns_found", r.asns_found},
       {"ips_found", r.ips_found},
       {"emails_found", r.emails_found},
       {"timed_out", r.timed_out}};
}

void from_json(const nlohmann::json& j, HarvestReport& r) {
  r.domain = j.at("domain").get<std::string>();
  r.hosts_found = j.value("hosts_found", std::size_t{0});
  r.interesting_urls = j.value("interesting_urls", std::size_t{0});
  r.asns_found = j.value("asns_found", std::size_t{0});
  r.ips_found = j.value("ips_found", std::size_t{0});
  r.emails_found = j.value("emails_found", std::size_t{0});
  r.timed_out = j.value("timed_out", false);
}

void to_json(nlohmann::json& j, const ExtractionResult& r) {
  j = {{"urls", r.urls}, {"domains", r.domains}, {"emails", r.emails}, {"ips", r.ips}};
}

}  // namespace osintphish
