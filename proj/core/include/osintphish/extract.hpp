/**
 * @file extract.hpp
 * @brief Network indicators found in email bodies: URLs, hostnames, email
 *        addresses and literal IPv4 addresses.
 *
 * Scanning works on ASCII tokens; any non-ASCII byte acts as a delimiter, so
 * indicators embedded in Arabic text are found exactly as in English text.
 * Internationalized (non-ASCII) domain names are not recognized.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace osintphish {

struct ExtractionResult {
  std::vector<std::string> urls;
  std::vector<std::string> domains;  ///< distinct, first-occurrence order
  std::vector<std::string> emails;
  std::vector<std::string> ips;      ///< every occurrence
  bool operator==(const ExtractionResult&) const = default;
};

/// http/https URLs. Scheme and host are lowercased; trailing sentence
/// punctuation is stripped.
std::vector<std::string> extract_urls(std::string_view body);

/// Hostnames of URLs, email domains and bare hostnames, de-duplicated.
std::vector<std::string> extract_domains(std::string_view body);

std::vector<std::string> extract_emails(std::string_view body);

/// Dotted quads with every octet in 0..255, one entry per occurrence.
std::vector<std::string> extract_ips(std::string_view body);

ExtractionResult extract_all(std::string_view body);

/// True when the body has at least one URL, hostname or email address.
bool has_links(std::string_view body);

/// Lowercase hostname grammar: >= 2 labels of [a-z0-9-] without leading or
/// trailing hyphens, final label alphabetic with length >= 2.
bool is_hostname(std::string_view host);

/// Hostname part of an extracted URL.
std::string url_host(std::string_view url);

}  // namespace osintphish
