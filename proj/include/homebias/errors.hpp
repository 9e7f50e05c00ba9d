#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homebias {

/// Violation of an operation precondition or a value-domain rule.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too few observations to evaluate a statistic.
struct InsufficientDataError : DomainError {
    using DomainError::DomainError;
};

/// Design matrix is rank deficient.
struct CollinearityError : DomainError {
    CollinearityError(const std::string& msg, std::vector<std::string> columns)
        : DomainError(msg), dependent_columns(std::move(columns)) {}
    std::vector<std::string> dependent_columns;
};

/// One malformed cell or row in an input file. Always pinpoints
/// file, line (1-based) and column header; no anonymous failures.
struct SchemaError {
    std::string file;
    int line = 0;
    std::string column;
    std::string rule;

    std::string to_string() const {
        return file + ":" + std::to_string(line) + ": column '" + column + "': " + rule;
    }
};

class SchemaException : public std::runtime_error {
  public:
    explicit SchemaException(std::vector<SchemaError> errors)
        : std::runtime_error(errors.empty() ? std::string("schema error")
                                            : errors.front().to_string()),
          errors_(std::move(errors)) {}

    const std::vector<SchemaError>& errors() const { return errors_; }

  private:
    std::vector<SchemaError> errors_;
};

/// Bad command line or run configuration.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace homebias
