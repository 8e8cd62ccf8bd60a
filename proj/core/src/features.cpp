#include "osintphish/features.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "osintphish/error.hpp"
#include "osintphish/format.hpp"

namespace osintphish {

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  const auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocabulary::tokens() const {
  std::vector<std::string> out(index.size());
  for (const auto& [token, col] : index) out[col] = token;
  return out;
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& documents,
                          std::string fitted_on) {
  std::set<std::string> distinct;
  for (const auto& doc : documents) distinct.insert(doc.begin(), doc.end());
  Vocabulary vocabulary;
  vocabulary.fitted_on = std::move(fitted_on);
  std::uint32_t next = 0;
  for (const auto& token : distinct) vocabulary.index.emplace_hint(vocabulary.index.end(), token, next++);
  return vocabulary;
}

double SparseVector::sum() const {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

SparseVector vectorize_counts(const std::vector<std::string>& tokens, const Vocabulary& vocabulary) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokens) {
    if (auto col = vocabulary.find(token)) counts[*col] += 1.0;
  }
  SparseVector v;
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  for (const auto& [col, count] : counts) {
    v.indices.push_back(col);
    v.values.push_back(count);
  }
  return v;
}

OsintEncoder OsintEncoder::fit(const std::vector<OsintFeatureRow>& rows) {
  OsintEncoder encoder;
  std::set<std::string> seen[3];
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string& value = k == 0 ? row.hostname : k == 1 ? row.ip_address : row.rdns_record;
      if (value != kEmptyMarker) seen[k].insert(value);
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    std::uint32_t code = 1;
    for (const auto& value : seen[k]) encoder.codes_[k].emplace(value, code++);
  }
  return encoder;
}

std::uint32_t OsintEncoder::code(std::size_t categorical, const std::string& value) const {
  const auto& codes = codes_[categorical];
  const auto it = codes.find(value);
  return it == codes.end() ? 0 : it->second;
}

std::vector<double> OsintEncoder::encode(const OsintFeatureRow& row) const {
  return {static_cast<double>(code(0, row.hostname)),
          row.host_up,
          row.alternate_ip_count,
          static_cast<double>(code(1, row.ip_address)),
          row.common_web_ports_open,
          row.open_ports_count,
          row.filtered_ports_count,
          static_cast<double>(row.open_ports.size()),
          static_cast<double>(code(2, row.rdns_record)),
          row.https_supported,
          static_cast<double>(row.services.size()),
          row.host_found,
          row.interesting_url,
          row.asn_found,
          row.ip_found,
          row.latency,
          row.scan_duration};
}

const std::vector<std::string>& OsintEncoder::column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& feature : osint_feature_names()) {
      out.push_back("osint:" + (feature == "services" ? std::string("services_count") : feature));
    }
    return out;
  }();
  return names;
}

std::vector<std::vector<double>> encode_osint(const std::vector<OsintFeatureRow>& rows,
                                              const std::vector<bool>& fit_partition) {
  if (fit_partition.size() != rows.size()) {
    throw DataError("fit partition marks " + std::to_string(fit_partition.size()) + " rows, expected " +
                    std::to_string(rows.size()));
  }
  std::vector<OsintFeatureRow> fit_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (fit_partition[i]) fit_rows.push_back(rows[i]);
  }
  const OsintEncoder encoder = OsintEncoder::fit(fit_rows);
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(encoder.encode(row));
  return out;
}

FeatureMatrix::RowView FeatureMatrix::row(std::size_t r) const {
  const std::size_t begin = row_ptr[r];
  const std::size_t len = row_ptr[r + 1] - begin;
  return {std::span(col_index).subspan(begin, len), std::span(values).subspan(begin, len)};
}

std::vector<double> FeatureMatrix::dense_row(std::size_t r) const {
  std::vector<double> out(cols, 0.0);
  const auto view = row(r);
  for (std::size_t k = 0; k < view.indices.size(); ++k) out[view.indices[k]] = view.values[k];
  return out;
}

std::vector<std::vector<double>> FeatureMatrix::dense_columns() const {
  std::vector<std::vector<double>> out(cols, std::vector<double>(rows(), 0.0));
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto view = row(r);
    for (std::size_t k = 0; k < view.indices.size(); ++k) out[view.indices[k]][r] = view.values[k];
  }
  return out;
}

void FeatureMatrix::append_row(const SparseVector& v, Label label) {
  for (std::size_t k = 0; k < v.indices.size(); ++k) {
    if (v.indices[k] >= cols || (k > 0 && v.indices[k] <= v.indices[k - 1])) {
      throw DataError("sparse row entries must be sorted and within " + std::to_string(cols) + " columns");
    }
    if (v.values[k] == 0.0) continue;
    col_index.push_back(v.indices[k]);
    values.push_back(v.values[k]);
  }
  row_ptr.push_back(values.size());
  labels.push_back(label);
}

void FeatureMatrix::validate() const {
  if (labels.size() != rows()) throw DataError("label count does not match row count");
  if (column_names.size() != cols) throw DataError("column name count does not match column count");
  if (col_index.size() != values.size() || row_ptr.back() != values.size()) {
    throw DataError("inconsistent sparse storage");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 0.0)) throw DataError("negative or NaN matrix entry");
    if (col_index[k] >= cols) throw DataError("column index out of range");
  }
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> positions) const {
  FeatureMatrix out;
  out.cols = cols;
  out.column_names = column_names;
  for (std::size_t r : positions) {
    const auto view = row(r);
    out.col_index.insert(out.col_index.end(), view.indices.begin(), view.indices.end());
    out.values.insert(out.values.end(), view.values.begin(), view.values.end());
    out.row_ptr.push_back(out.values.size());
    out.labels.push_back(labels[r]);
  }
  return out;
}

FeatureMatrix assemble(const std::vector<SparseVector>& text_vectors, const Vocabulary& vocabulary,
                       const std::optional<std::vector<std::vector<double>>>& osint_columns,
                       const std::vector<Label>& labels) {
  if (text_vectors.size() != labels.size()) {
    throw DataError("row mismatch: " + std::to_string(text_vectors.size()) + " text rows, " +
                    std::to_string(labels.size()) + " labels");
  }
  const bool with_osint = osint_columns && !osint_columns->empty();
  if (with_osint && osint_columns->size() != text_vectors.size()) {
    throw DataError("row mismatch: " + std::to_string(text_vectors.size()) + " text rows, " +
                    std::to_string(osint_columns->size()) + " OSINT rows");
  }
  FeatureMatrix m;
  for (const auto& token : vocabulary.tokens()) m.column_names.push_back("text:" + token);
  if (with_osint) {
    const auto& names = OsintEncoder::column_names();
    m.column_names.insert(m.column_names.end(), names.begin(), names.end());
  }
  m.cols = m.column_names.size();
  const auto offset = static_cast<std::uint32_t>(vocabulary.size());
  for (std::size_t r = 0; r < text_vectors.size(); ++r) {
    SparseVector row = text_vectors[r];
    if (with_osint) {
      const auto& extra = (*osint_columns)[r];
      if (extra.size() != OsintEncoder::kColumns) throw DataError("OSINT row must have 17 values", r + 1);
      for (std::size_t k = 0; k < extra.size(); ++k) {
        if (extra[k] < 0) throw DataError("negative OSINT value", r + 1);
        if (extra[k] == 0.0) continue;
        row.indices.push_back(offset + static_cast<std::uint32_t>(k));
        row.values.push_back(extra[k]);
      }
    }
    m.append_row(row, labels[r]);
  }
  return m;
}

FeaturizedSplit featurize(const std::vector<EmailRecord>& train, const std::vector<EmailRecord>& test,
                          const std::vector<OsintFeatureRow>* train_osint,
                          const std::vector<OsintFeatureRow>* test_osint) {
  if ((train_osint == nullptr) != (test_osint == nullptr)) {
    throw ConfigError("OSINT rows must be given for both partitions or neither");
  }
  auto tokens_of = [](const std::vector<EmailRecord>& records) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(records.size());
    for (const auto& r : records) docs.push_back(tokenize(r.body, r.language));
    return docs;
  };
  auto labels_of = [](const std::vector<EmailRecord>& records) {
    std::vector<Label> labels;
    for (const auto& r : records) labels.push_back(r.label);
    return labels;
  };
  const auto train_docs = tokens_of(train);
  const auto test_docs = tokens_of(test);

  FeaturizedSplit out;
  out.vocabulary = fit_vocabulary(train_docs, "training partition");
  std::vector<SparseVector> train_vec, test_vec;
  for (const auto& d : train_docs) train_vec.push_back(vectorize_counts(d, out.vocabulary));
  for (const auto& d : test_docs) test_vec.push_back(vectorize_counts(d, out.vocabulary));

  std::optional<std::vector<std::vector<double>>> train_cols, test_cols;
  if (train_osint) {
    if (train_osint->size() != train.size() || test_osint->size() != test.size()) {
      throw DataError("OSINT rows do not align with email records");
    }
    const OsintEncoder encoder = OsintEncoder::fit(*train_osint);
    train_cols.emplace();
    test_cols.emplace();
    for (const auto& r : *train_osint) train_cols->push_back(encoder.encode(r));
    for (const auto& r : *test_osint) test_cols->push_back(encoder.encode(r));
  }
  out.train = assemble(train_vec, out.vocabulary, train_cols, labels_of(train));
  out.test = assemble(test_vec, out.vocabulary, test_cols, labels_of(test));
  // An empty test partition still needs the OSINT column layout.
  if (train_osint && test.empty()) {
    out.test.column_names = out.train.column_names;
    out.test.cols = out.train.cols;
  }
  return out;
}

void save_matrix(const std::string& prefix, const FeatureMatrix& m) {
  m.validate();
  std::ofstream triplets(prefix + ".triplets", std::ios::trunc);
  if (!triplets) throw ConfigError("cannot write '" + prefix + ".triplets'");
  triplets << "% rows cols nnz\n" << m.rows() << ' ' << m.cols << ' ' << m.nnz() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto view = m.row(r);
    for (std::size_t k = 0; k < view.indices.size(); ++k) {
      triplets << r << ' ' << view.indices[k] << ' ' << format_double(view.values[k]) << '\n';
    }
  }
  std::vector<int> labels;
  for (Label l : m.labels) labels.push_back(static_cast<int>(l));
  nlohmann::json manifest = {{"format", "osintphish-matrix"},
                             {"version", 1},
                             {"rows", m.rows()},
                             {"columns", m.column_names},
                             {"labels", labels}};
  std::ofstream out(prefix + ".manifest.json", std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + prefix + ".manifest.json'");
  out << manifest.dump(1) << '\n';
}

FeatureMatrix load_matrix(const std::string& prefix) {
  std::ifstream manifest_in(prefix + ".manifest.json");
  if (!manifest_in) throw SchemaError("cannot open '" + prefix + ".manifest.json'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed matrix manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "osintphish-matrix") throw SchemaError("not a matrix manifest");

  FeatureMatrix m;
  m.column_names = manifest.at("columns").get<std::vector<std::string>>();
  m.cols = m.column_names.size();
  const auto labels = manifest.at("labels").get<std::vector<int>>();

  std::ifstream in(prefix + ".triplets");
  if (!in) throw SchemaError("cannot open '" + prefix + ".triplets'");
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz) || cols != m.cols || rows != labels.size()) {
    throw SchemaError("triplet header disagrees with manifest");
  }
  std::vector<SparseVector> row_vectors(rows);
  std::size_t r = 0, c = 0;
  std::string value;
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!(in >> r >> c >> value) || r >= rows) throw DataError("malformed triplet", k + 1);
    row_vectors[r].indices.push_back(static_cast<std::uint32_t>(c));
    row_vectors[r].values.push_back(parse_double(value, "matrix entry"));
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("label must be 0 or 1", i + 1);
    m.append_row(row_vectors[i], static_cast<Label>(labels[i]));
  }
  m.validate();
  return m;
}

}  // namespace osintphish
