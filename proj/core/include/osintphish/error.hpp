#pragma once

#include <stdexcept>
#include <string>

namespace osintphish {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage (bad ratio, unknown parameter, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates its schema (missing column, wrong header).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A single data row or value is malformed. `row` is 1-based over data rows,
/// 0 when the error is not tied to a row.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0)
      : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Tool output could not be parsed. Carries the raw text for diagnosis.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// A scan backend could not produce a result for a domain.
class ProbeError : public Error {
 public:
  using Error::Error;
};

/// The fixture store has no recording for the requested domain.
class MissingFixtureError : public ProbeError {
 public:
  explicit MissingFixtureError(const std::string& domain)
      : ProbeError("no fixture recorded for domain '" + domain + "'"),
        domain_(domain) {}
  const std::string& domain() const noexcept { return domain_; }

 private:
  std::string domain_;
};

}  // namespace osintphish
