#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ontomatch {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries the 1-based line/column when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
      : Error(format(msg, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
    if (line == 0) return msg;
    return msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
  }
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a domain invariant (duplicate id, dangling edge, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an id that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an API precondition (dimension mismatch, variant mismatch, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Bad or missing run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Metric undefined for the given inputs (e.g. empty reference alignment).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// TF-IDF fitting failed (empty corpus, no tokens).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Remote provider failure. `retryable()` distinguishes transient transport
/// problems from hard contract violations.
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& msg, bool retryable = false)
      : Error(msg), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// The label-word probability mass was zero; no class can be derived.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage failed; names the stage and preserves the cause text.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& cause)
      : Error("stage " + stage + " failed: " + cause), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace ontomatch
