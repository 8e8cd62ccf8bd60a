#include "osintphish/extract.hpp"

#include <algorithm>
#include <unordered_set>

namespace osintphish {
namespace {

struct Span {
  std::size_t begin;
  std::size_t end;
  std::string value;
};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_host_char(char c) { return is_alnum(c) || c == '.' || c == '-'; }
bool is_local_char(char c) {
  return is_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

bool is_url_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u <= 0x20 || u >= 0x7F) return false;
  switch (c) {
    case '<': case '>': case '"': case '\'': case '`':
    case '{': case '}': case '|': case '\\': case '^':
      return false;
    default:
      return true;
  }
}

bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case ')': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool starts_with_icase(std::string_view text, std::size_t at, std::string_view prefix) {
  if (text.size() - at < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[at + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

std::vector<Span> url_spans(std::string_view body) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < body.size()) {
    std::size_t scheme_len = 0;
    if (starts_with_icase(body, i, "https://")) {
      scheme_len = 8;
    } else if (starts_with_icase(body, i, "http://")) {
      scheme_len = 7;
    }
    if (scheme_len == 0 || (i > 0 && is_alnum(body[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t end = i + scheme_len;
    while (end < body.size() && is_url_char(body[end])) ++end;
    std::size_t stop = end;
    while (stop > i + scheme_len && is_trailing_punct(body[stop - 1])) --stop;

    const std::string_view rest = body.substr(i + scheme_len, stop - i - scheme_len);
    const std::size_t host_end = std::min(rest.find_first_of(":/?#"), rest.size());
    const std::string host = lower(rest.substr(0, host_end));
    std::string_view tail = rest.substr(host_end);
    if (!tail.empty() && tail.front() == ':') {
      const std::size_t port_end = std::min(tail.find_first_of("/?#"), tail.size());
      const std::string_view port = tail.substr(1, port_end - 1);
      const bool valid_port = !port.empty() && port.size() <= 5 &&
                              std::all_of(port.begin(), port.end(), is_digit) &&
                              std::stoul(std::string(port)) - 1 < 65535;
      if (!valid_port) {
        stop = i + scheme_len + host_end;
        tail = {};
      }
    }
    if (is_hostname(host)) {
      std::string url = lower(body.substr(i, scheme_len)) + host + std::string(tail);
      spans.push_back({i, stop, std::move(url)});
    }
    i = end;
  }
  return spans;
}

bool inside(const std::vector<Span>& spans, std::size_t pos) {
  return std::any_of(spans.begin(), spans.end(),
                     [pos](const Span& s) { return pos >= s.begin && pos < s.end; });
}

std::vector<Span> email_spans(std::string_view body, const std::vector<Span>& urls) {
  std::vector<Span> spans;
  for (std::size_t at = body.find('@'); at != std::string_view::npos;
       at = body.find('@', at + 1)) {
    if (inside(urls, at)) continue;
    std::size_t begin = at;
    while (begin > 0 && is_local_char(body[begin - 1])) --begin;
    std::size_t end = at + 1;
    while (end < body.size() && is_host_char(body[end])) ++end;
    while (end > at + 1 && body[end - 1] == '.') --end;
    if (begin == at || end == at + 1) continue;
    if (!is_hostname(lower(body.substr(at + 1, end - at - 1)))) continue;
    spans.push_back({begin, end, std::string(body.substr(begin, end - begin))});
  }
  return spans;
}

std::vector<Span> bare_host_spans(std::string_view body, const std::vector<Span>& taken) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < body.size()) {
    if (!is_host_char(body[i]) || inside(taken, i)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < body.size() && is_host_char(body[end]) && !inside(taken, end)) ++end;
    // Path segments ("/dir/file.html") are not hostnames; "//host" is.
    const bool path_segment = i > 0 && body[i - 1] == '/' && (i < 2 || body[i - 2] != '/');
    const bool adjoins_mail = (i > 0 && body[i - 1] == '@') || (end < body.size() && body[end] == '@');
    std::size_t b = i, e = end;
    while (b < e && (body[b] == '.' || body[b] == '-')) ++b;
    while (e > b && (body[e - 1] == '.' || body[e - 1] == '-')) --e;
    if (!path_segment && !adjoins_mail && b < e) {
      std::string host = lower(body.substr(b, e - b));
      if (is_hostname(host)) spans.push_back({b, e, std::move(host)});
    }
    i = end;
  }
  return spans;
}

}  // namespace

bool is_hostname(std::string_view host) {
  if (host.empty() || host.size() > 253) return false;
  std::size_t labels = 0;
  std::string_view last;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = host.find('.', start);
    const std::string_view label = host.substr(start, dot == std::string_view::npos ? host.size() - start : dot - start);
    if (label.empty() || label.size() > 63 || label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
      if (!((c >= 'a' && c <= 'z') || is_digit(c) || c == '-')) return false;
    }
    ++labels;
    last = label;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels >= 2 && last.size() >= 2 &&
         std::all_of(last.begin(), last.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string url_host(std::string_view url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string_view::npos) return {};
  const std::string_view rest = url.substr(scheme + 3);
  return std::string(rest.substr(0, std::min(rest.find_first_of(":/?#"), rest.size())));
}

std::vector<std::string> extract_urls(std::string_view body) {
  std::vector<std::string> out;
  for (auto& span : url_spans(body)) out.push_back(std::move(span.value));
  return out;
}

std::vector<std::string> extract_emails(std::string_view body) {
  std::vector<std::string> out;
  for (auto& span : email_spans(body, url_spans(body))) out.push_back(std::move(span.value));
  return out;
}

std::vector<std::string> extract_domains(std::string_view body) {
  const auto urls = url_spans(body);
  const auto emails = email_spans(body, urls);

  std::vector<std::pair<std::size_t, std::string>> found;
  for (const auto& u : urls) found.emplace_back(u.begin, url_host(u.value));
  for (const auto& m : emails) {
    found.emplace_back(m.begin, lower(m.value.substr(m.value.rfind('@') + 1)));
  }
  std::vector<Span> taken = urls;
  taken.insert(taken.end(), emails.begin(), emails.end());
  for (auto& h : bare_host_spans(body, taken)) found.emplace_back(h.begin, std::move(h.value));

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& [pos, host] : found) {
    if (seen.insert(host).second) out.push_back(std::move(host));
  }
  return out;
}

std::vector<std::string> extract_ips(std::string_view body) {
  std::vector<std::string> out;
  auto is_word = [](char c) { return is_alnum(c) || c == '_'; };
  std::size_t i = 0;
  while (i < body.size()) {
    if (!(is_digit(body[i]) || body[i] == '.')) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < body.size() && (is_digit(body[end]) || body[end] == '.')) ++end;
    const bool bounded = (i == 0 || !is_word(body[i - 1])) && (end == body.size() || !is_word(body[end]));
    std::size_t b = i, e = end;
    while (b < e && body[b] == '.') ++b;
    while (e > b && body[e - 1] == '.') --e;
    const std::string_view token = body.substr(b, e - b);
    if (bounded && !token.empty()) {
      int parts = 0;
      bool valid = true;
      std::size_t start = 0;
      while (valid) {
        const std::size_t dot = token.find('.', start);
        const std::string_view octet = token.substr(start, dot == std::string_view::npos ? token.size() - start : dot - start);
        valid = !octet.empty() && octet.size() <= 3 && std::stoi(std::string(octet)) <= 255;
        ++parts;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
      }
      if (valid && parts == 4) out.emplace_back(token);
    }
    i = end;
  }
  return out;
}

ExtractionResult extract_all(std::string_view body) {
  ExtractionResult result;
  result.urls = extract_urls(body);
  result.domains = extract_domains(body);
  result.emails = extract_emails(body);
  result.ips = extract_ips(body);
  return result;
}

bool has_links(std::string_view body) { return !extract_domains(body).empty(); }

}  // namespace osintphish
