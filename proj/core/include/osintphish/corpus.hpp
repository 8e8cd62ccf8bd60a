/**
 * @file corpus.hpp
 * @brief Labeled email corpora: loading, SHA-256 deduplication, seeded
 *        sampling, undersampling and stratified splitting.
 *
 * Every sampling operation is a pure function of (input, seed). Outputs keep
 * the relative order of the input records.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osintphish/csv.hpp"

namespace osintphish {

enum class Label : int { Safe = 0, Phishing = 1 };
enum class Language { En, Ar };

/// Canonical label text, matching the public source dataset ("Phishing Email").
std::string_view label_name(Label label);
/// Case-insensitive: "Phishing Email"/"phishing" and "Safe Email"/"safe".
std::optional<Label> parse_label(std::string_view text);

std::string_view language_tag(Language language);
/// Accepts "en" and "ar" (case-insensitive); throws ConfigError otherwise.
Language parse_language(std::string_view tag);

struct EmailRecord {
  std::string id;
  std::string body;
  Language language = Language::En;
  Label label = Label::Safe;
};

struct ClassCounts {
  std::size_t safe = 0;
  std::size_t phishing = 0;
  std::size_t total() const { return safe + phishing; }
  bool operator==(const ClassCounts&) const = default;
};

struct Corpus {
  std::vector<EmailRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  ClassCounts counts() const;
  /// Throws DataError on duplicate ids or empty bodies.
  void validate() const;
};

/// Column mapping for CSV input. `id` and `language` columns are optional.
struct CsvSchema {
  std::string text_column = "text";
  std::string label_column = "label";
  std::string id_column = "id";
  std::string language_column = "language";
  Language default_language = Language::En;
};

/// Trims leading and trailing whitespace; the only normalization applied.
std::string_view normalize_body(std::string_view body);

Corpus corpus_from_table(const csv::Table& table, const CsvSchema& schema = {});
Corpus load_csv(const std::string& path, const CsvSchema& schema = {});

/// Canonical columns: id, language, label, text.
csv::Table corpus_to_table(const Corpus& corpus);
void save_csv(const std::string& path, const Corpus& corpus);

/// Keeps the first record for each SHA-256 digest of the normalized body.
Corpus dedup_sha256(const Corpus& corpus);

/// Uniform sample of `n` records without replacement. With `require_links`,
/// only records containing at least one URL, domain or email address are
/// candidates. Throws DataError when n exceeds the candidate pool.
Corpus random_sample(const Corpus& corpus, std::size_t n, std::uint64_t seed,
                     bool require_links = false);

/// Down-samples the majority class to the minority count.
Corpus balance_undersample(const Corpus& corpus, std::uint64_t seed);

struct DatasetSplit {
  Corpus train;
  Corpus test;
  std::uint64_t seed = 0;
  double ratio = 0.7;
};

/// Per-class shuffle, then the first round-half-up(count * ratio) records of
/// each class go to train and the rest to test.
DatasetSplit stratified_split(const Corpus& corpus, double ratio, std::uint64_t seed);

/// Number of training records a class of `count` contributes at `ratio`.
std::size_t train_share(std::size_t count, double ratio);

}  // namespace osintphish
