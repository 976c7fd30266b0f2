#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ewb {

// Every error raised by the library derives from Error and carries a short
// machine-readable kind ("parameter", "lookup", ...) used by the CLI when it
// reports failures as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message) : Error("parameter", message) {}
};

class LookupError : public Error {
 public:
  LookupError(const std::string& missing, const std::string& context)
      : Error("lookup", context + ": unknown label '" + missing + "'"), missing_(missing) {}
  const std::string& missing() const noexcept { return missing_; }

 private:
  std::string missing_;
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& message) : Error("insufficient_data", message) {}
};

class OutOfBoundsError : public Error {
 public:
  OutOfBoundsError(std::vector<std::size_t> events, const std::string& message)
      : Error("out_of_bounds", message), events_(std::move(events)) {}
  // Indices (into the caller's event list) whose window fell outside the recording.
  const std::vector<std::size_t>& events() const noexcept { return events_; }

 private:
  std::vector<std::size_t> events_;
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& message) : Error("training", message) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(std::size_t cap)
      : Error("convergence", "solver did not converge within " + std::to_string(cap) + " iterations"),
        cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& message) : Error("undefined_metric", message) {}
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& file, std::size_t row, const std::string& column, const std::string& message)
      : Error("schema", file + ": row " + std::to_string(row) + ", column '" + column + "': " + message),
        row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::vector<std::string> keys, const std::string& message)
      : Error("validation", message), keys_(std::move(keys)) {}
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace ewb
