/**
 * @file features.hpp
 * @brief Bag-of-words text features, OSINT column encoding and the sparse
 *        design matrix shared by every classifier.
 *
 * English and Arabic go through the same code path; only the vocabulary
 * contents differ. Every matrix entry is non-negative.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osintphish/corpus.hpp"
#include "osintphish/osint.hpp"

namespace osintphish {

/// Maximal runs of letters or digits. Latin letters are lowercased, Arabic
/// script is kept verbatim, combining marks stay attached to their word.
std::vector<std::string> tokenize(std::string_view body, Language language = Language::En);

struct Vocabulary {
  std::map<std::string, std::uint32_t> index;  ///< token -> column
  std::string fitted_on;

  std::size_t size() const { return index.size(); }
  std::optional<std::uint32_t> find(std::string_view token) const;
  /// Tokens in column order.
  std::vector<std::string> tokens() const;
};

/// Distinct training tokens, indexed in lexicographic (byte) order.
Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& documents,
                          std::string fitted_on = {});

struct SparseVector {
  std::vector<std::uint32_t> indices;  ///< strictly increasing
  std::vector<double> values;
  double sum() const;
  bool operator==(const SparseVector&) const = default;
};

/// Occurrence counts of in-vocabulary tokens.
SparseVector vectorize_counts(const std::vector<std::string>& tokens, const Vocabulary& vocabulary);

/// Label encoder for the three categorical OSINT columns. Codes start at 1 in
/// lexicographic order of the values seen when fitting; unseen values and the
/// empty marker map to 0.
class OsintEncoder {
 public:
  static constexpr std::size_t kColumns = 17;

  static OsintEncoder fit(const std::vector<OsintFeatureRow>& rows);
  std::vector<double> encode(const OsintFeatureRow& row) const;
  static const std::vector<std::string>& column_names();

  std::uint32_t code(std::size_t categorical, const std::string& value) const;

 private:
  // hostname, ip_address, rdns_record
  std::map<std::string, std::uint32_t> codes_[3];
};

/// Fits the encoder on the rows where `fit_partition` is true and encodes
/// every row. Returns one 17-wide row per input row.
std::vector<std::vector<double>> encode_osint(const std::vector<OsintFeatureRow>& rows,
                                              const std::vector<bool>& fit_partition);

/// Row-major CSR matrix with aligned labels.
struct FeatureMatrix {
  std::size_t cols = 0;
  std::vector<std::string> column_names;
  std::vector<Label> labels;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_index;
  std::vector<double> values;

  std::size_t rows() const { return row_ptr.size() - 1; }
  std::size_t nnz() const { return values.size(); }

  struct RowView {
    std::span<const std::uint32_t> indices;
    std::span<const double> values;
  };
  RowView row(std::size_t r) const;
  std::vector<double> dense_row(std::size_t r) const;
  /// Column-major dense copy: result[c][r].
  std::vector<std::vector<double>> dense_columns() const;

  /// Appends a row; entries must be sorted by column and within range.
  void append_row(const SparseVector& row, Label label);
  /// Throws DataError if shapes disagree or an entry is negative.
  void validate() const;
  /// Rows at the given positions, in the given order.
  FeatureMatrix subset(std::span<const std::size_t> positions) const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// Text columns first, then the OSINT columns when given. Throws DataError
/// on row-count mismatch.
FeatureMatrix assemble(const std::vector<SparseVector>& text_vectors, const Vocabulary& vocabulary,
                       const std::optional<std::vector<std::vector<double>>>& osint_columns,
                       const std::vector<Label>& labels);

struct FeaturizedSplit {
  FeatureMatrix train;
  FeatureMatrix test;
  Vocabulary vocabulary;
};

/// Fits the vocabulary (and OSINT encoder, when OSINT rows are given) on the
/// training partition and transforms both partitions.
FeaturizedSplit featurize(const std::vector<EmailRecord>& train, const std::vector<EmailRecord>& test,
                          const std::vector<OsintFeatureRow>* train_osint = nullptr,
                          const std::vector<OsintFeatureRow>* test_osint = nullptr);

/// Writes `<prefix>.triplets` (row col value lines) and
/// `<prefix>.manifest.json` (column names and labels).
void save_matrix(const std::string& prefix, const FeatureMatrix& matrix);
FeatureMatrix load_matrix(const std::string& prefix);

}  // namespace osintphish
