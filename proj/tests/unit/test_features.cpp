#include <doctest.h>

#include <filesystem>

#include "osintphish/error.hpp"
#include "osintphish/features.hpp"

using namespace osintphish;
using V = std::vector<std::string>;

TEST_CASE("tokenizer") {
  CHECK(tokenize("Win $100 NOW!") == V{"win", "100", "now"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("اربح المال الآن", Language::Ar) == V{"اربح", "المال", "الآن"});
  CHECK(tokenize("Café ÉTÉ") == V{"café", "été"});
  // Harakat stay attached to their word.
  CHECK(tokenize("مَرْحَبًا بك", Language::Ar) == V{"مَرْحَبًا", "بك"});
}

TEST_CASE("vocabulary is lexicographic and fit on training documents") {
  const Vocabulary v = fit_vocabulary({{"b", "a"}, {"a"}});
  CHECK(v.size() == 2);
  CHECK(v.find("a") == 0u);
  CHECK(v.find("b") == 1u);
  CHECK_FALSE(v.find("c").has_value());
  CHECK(v.tokens() == V{"a", "b"});
}

TEST_CASE("count vectors") {
  const Vocabulary v = fit_vocabulary({{"a", "b"}});
  const SparseVector x = vectorize_counts({"a", "a", "b"}, v);
  CHECK(x.indices == std::vector<std::uint32_t>{0, 1});
  CHECK(x.values == std::vector<double>{2, 1});
  CHECK(vectorize_counts({"zzz"}, v).indices.empty());
  CHECK(vectorize_counts({}, v).indices.empty());
}

TEST_CASE("OSINT encoder codes categoricals from 1 and maps unseen to 0") {
  OsintFeatureRow a, b, unseen;
  a.hostname = "a.com";
  b.hostname = "b.com";
  unseen.hostname = "c.com";
  const OsintEncoder enc = OsintEncoder::fit({b, a});
  CHECK(enc.code(0, "a.com") == 1);
  CHECK(enc.code(0, "b.com") == 2);
  CHECK(enc.code(0, "c.com") == 0);
  CHECK(enc.encode(unseen)[0] == 0);
  CHECK(enc.encode(OsintFeatureRow{}) == std::vector<double>(17, 0.0));
  OsintFeatureRow lat;
  lat.latency = 0.135;
  lat.open_ports = {22, 80, 443};
  lat.services = {"http", "ssh"};
  const auto row = enc.encode(lat);
  CHECK(row[15] == 0.135);
  CHECK(row[7] == 3);
  CHECK(row[10] == 2);
  CHECK(OsintEncoder::column_names().size() == 17);
}

TEST_CASE("assembly with and without OSINT columns") {
  const Vocabulary v = fit_vocabulary({{"a", "b", "c"}});
  const std::vector<SparseVector> text = {vectorize_counts({"a"}, v), vectorize_counts({"c", "c"}, v)};
  const std::vector<Label> labels = {Label::Safe, Label::Phishing};
  const FeatureMatrix plain = assemble(text, v, std::nullopt, labels);
  CHECK(plain.cols == 3);
  CHECK(plain.rows() == 2);
  CHECK(plain.column_names[0] == "text:a");
  const std::vector<std::vector<double>> osint(2, std::vector<double>(17, 1.0));
  const FeatureMatrix full = assemble(text, v, osint, labels);
  CHECK(full.cols == 3 + 17);
  CHECK(full.column_names[3] == "osint:hostname");
  CHECK(full.dense_row(1)[2] == 2);
  CHECK_THROWS_AS(assemble(text, v, std::nullopt, {Label::Safe}), DataError);
}

TEST_CASE("featurize fits on train only") {
  const std::vector<EmailRecord> train = {{"1", "win money", Language::En, Label::Phishing},
                                          {"2", "hello friend", Language::En, Label::Safe}};
  const std::vector<EmailRecord> test = {{"3", "win unseen", Language::En, Label::Phishing}};
  const FeaturizedSplit s = featurize(train, test);
  CHECK(s.vocabulary.size() == 4);
  CHECK(s.test.cols == s.train.cols);
  CHECK(s.test.nnz() == 1);
}

TEST_CASE("matrix persistence round-trip") {
  const Vocabulary v = fit_vocabulary({{"a", "b"}});
  const FeatureMatrix m = assemble({vectorize_counts({"a", "b", "b"}, v), vectorize_counts({}, v)}, v,
                                   std::nullopt, {Label::Phishing, Label::Safe});
  const auto prefix = (std::filesystem::temp_directory_path() / "osintphish_matrix_test").string();
  save_matrix(prefix, m);
  CHECK(load_matrix(prefix) == m);
  const FeatureMatrix sub = m.subset(std::vector<std::size_t>{1, 0});
  CHECK(sub.labels == std::vector<Label>{Label::Safe, Label::Phishing});
  CHECK(sub.dense_row(1) == std::vector<double>{1, 2});
}
