#include "osintphish/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "osintphish/digest.hpp"
#include "osintphish/error.hpp"
#include "osintphish/extract.hpp"
#include "osintphish/rng.hpp"

namespace osintphish {
namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

/// Records at the given input positions, in input order.
Corpus select(const Corpus& corpus, std::vector<std::size_t> positions, std::string provenance) {
  std::sort(positions.begin(), positions.end());
  Corpus out;
  out.provenance = std::move(provenance);
  out.records.reserve(positions.size());
  for (std::size_t p : positions) out.records.push_back(corpus.records[p]);
  return out;
}

std::vector<std::size_t> positions_of(const Corpus& corpus, Label label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (corpus.records[i].label == label) out.push_back(i);
  }
  return out;
}

std::string lineage(const Corpus& corpus, const std::string& step) {
  return corpus.provenance.empty() ? step : corpus.provenance + " | " + step;
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::Phishing ? "Phishing Email" : "Safe Email";
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string lowered = lower_ascii(normalize_body(text));
  if (lowered == "phishing email" || lowered == "phishing") return Label::Phishing;
  if (lowered == "safe email" || lowered == "safe") return Label::Safe;
  return std::nullopt;
}

std::string_view language_tag(Language language) {
  return language == Language::Ar ? "ar" : "en";
}

Language parse_language(std::string_view tag) {
  const std::string lowered = lower_ascii(normalize_body(tag));
  if (lowered == "en") return Language::En;
  if (lowered == "ar") return Language::Ar;
  throw ConfigError("unknown language tag '" + std::string(tag) + "' (expected en or ar)");
}

ClassCounts Corpus::counts() const {
  ClassCounts c;
  for (const auto& r : records) (r.label == Label::Phishing ? c.phishing : c.safe)++;
  return c;
}

void Corpus::validate() const {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!seen.insert(records[i].id).second) {
      throw DataError("duplicate id '" + records[i].id + "'", i + 1);
    }
    if (normalize_body(records[i].body).empty()) throw DataError("empty email body", i + 1);
  }
}

std::string_view normalize_body(std::string_view body) {
  while (!body.empty() && is_space(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
  while (!body.empty() && is_space(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
  return body;
}

Corpus corpus_from_table(const csv::Table& table, const CsvSchema& schema) {
  const auto text_col = table.column(schema.text_column);
  if (!text_col) throw SchemaError("missing column '" + schema.text_column + "'");
  const auto label_col = table.column(schema.label_column);
  if (!label_col) throw SchemaError("missing column '" + schema.label_column + "'");
  const auto id_col = table.column(schema.id_column);
  const auto lang_col = table.column(schema.language_column);

  Corpus corpus;
  corpus.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    EmailRecord record;
    record.id = id_col ? row[*id_col] : std::to_string(i);
    record.body = row[*text_col];
    const auto label = parse_label(row[*label_col]);
    if (!label) throw DataError("unrecognized label '" + row[*label_col] + "'", i + 1);
    record.label = *label;
    if (lang_col && !row[*lang_col].empty()) {
      try {
        record.language = parse_language(row[*lang_col]);
      } catch (const ConfigError& e) {
        throw DataError(e.what(), i + 1);
      }
    } else {
      record.language = schema.default_language;
    }
    if (normalize_body(record.body).empty()) throw DataError("empty email body", i + 1);
    corpus.records.push_back(std::move(record));
  }
  corpus.validate();
  return corpus;
}

Corpus load_csv(const std::string& path, const CsvSchema& schema) {
  Corpus corpus = corpus_from_table(csv::read_file(path), schema);
  corpus.provenance = "loaded from " + path;
  return corpus;
}

csv::Table corpus_to_table(const Corpus& corpus) {
  csv::Table table;
  table.header = {"id", "language", "label", "text"};
  table.rows.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    table.rows.push_back({r.id, std::string(language_tag(r.language)),
                          std::string(label_name(r.label)), r.body});
  }
  return table;
}

void save_csv(const std::string& path, const Corpus& corpus) {
  csv::write_file(path, corpus_to_table(corpus));
}

Corpus dedup_sha256(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  Corpus out;
  out.provenance = lineage(corpus, "dedup_sha256");
  for (const auto& record : corpus.records) {
    if (seen.insert(sha256_hex(normalize_body(record.body))).second) {
      out.records.push_back(record);
    }
  }
  return out;
}

Corpus random_sample(const Corpus& corpus, std::size_t n, std::uint64_t seed, bool require_links) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (!require_links || has_links(corpus.records[i].body)) candidates.push_back(i);
  }
  if (n > candidates.size()) {
    throw DataError("sample size " + std::to_string(n) + " exceeds candidate pool of " +
                    std::to_string(candidates.size()));
  }
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (std::size_t k : rng.choose(candidates.size(), n)) chosen.push_back(candidates[k]);
  return select(corpus, std::move(chosen),
                lineage(corpus, "random_sample n=" + std::to_string(n) + " seed=" +
                                    std::to_string(seed) + (require_links ? " links" : "")));
}

Corpus balance_undersample(const Corpus& corpus, std::uint64_t seed) {
  auto phishing = positions_of(corpus, Label::Phishing);
  auto safe = positions_of(corpus, Label::Safe);
  if (phishing.empty() || safe.empty()) {
    throw DataError("cannot balance: one class is empty (phishing=" +
                    std::to_string(phishing.size()) + ", safe=" + std::to_string(safe.size()) +
                    ")");
  }
  auto& majority = phishing.size() > safe.size() ? phishing : safe;
  auto& minority = phishing.size() > safe.size() ? safe : phishing;

  std::vector<std::size_t> keep = minority;
  if (majority.size() == minority.size()) {
    keep.insert(keep.end(), majority.begin(), majority.end());
  } else {
    Rng rng(seed);
    for (std::size_t k : rng.choose(majority.size(), minority.size())) keep.push_back(majority[k]);
  }
  return select(corpus, std::move(keep),
                lineage(corpus, "balance_undersample seed=" + std::to_string(seed)));
}

std::size_t train_share(std::size_t count, double ratio) {
  // Round half up; the epsilon absorbs binary representation error in ratio.
  return static_cast<std::size_t>(std::floor(static_cast<double>(count) * ratio + 0.5 + 1e-9));
}

DatasetSplit stratified_split(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0,1), got " + std::to_string(ratio));
  }
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (Label label : {Label::Safe, Label::Phishing}) {
    auto positions = positions_of(corpus, label);
    const std::size_t cut = train_share(positions.size(), ratio);
    if (positions.size() < 2 || cut == 0 || cut == positions.size()) {
      throw DataError("cannot split class '" + std::string(label_name(label)) + "' of " +
                      std::to_string(positions.size()) + " records at ratio " +
                      std::to_string(ratio));
    }
    rng.shuffle(positions);
    train.insert(train.end(), positions.begin(), positions.begin() + cut);
    test.insert(test.end(), positions.begin() + cut, positions.end());
  }
  const std::string note = "stratified_split ratio=" + std::to_string(ratio) +
                           " seed=" + std::to_string(seed);
  DatasetSplit split;
  split.train = select(corpus, std::move(train), lineage(corpus, note + " train"));
  split.test = select(corpus, std::move(test), lineage(corpus, note + " test"));
  split.seed = seed;
  split.ratio = ratio;
  return split;
}

}  // namespace osintphish
