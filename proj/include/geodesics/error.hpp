#pragma once

#include <stdexcept>
#include <string>

namespace geodesics {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  usage,                     // bad arguments, unsupported configuration
  data_integrity,            // corrupted files, non-hyperbolic classes
  statistical_precondition,  // cutoff exceeded, too few samples
  numerical,                 // solver non-convergence, bracketing failure
};

int exit_code(ErrorKind kind) noexcept;
const char* kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable tag, e.g. "cutoff_exceeded".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class NonHyperbolicError : public Error {
 public:
  explicit NonHyperbolicError(const std::string& msg)
      : Error(ErrorKind::data_integrity, "non_hyperbolic", msg) {}
};

class ChecksumError : public Error {
 public:
  explicit ChecksumError(const std::string& msg)
      : Error(ErrorKind::data_integrity, "checksum_mismatch", msg) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& msg)
      : Error(ErrorKind::data_integrity, "version_mismatch", msg) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg)
      : Error(ErrorKind::data_integrity, "format_error", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg)
      : Error(ErrorKind::data_integrity, "io_error", msg) {}
};

class MemoryBudgetExceeded : public Error {
 public:
  explicit MemoryBudgetExceeded(const std::string& msg)
      : Error(ErrorKind::usage, "memory_budget_exceeded", msg) {}
};

class CutoffExceeded : public Error {
 public:
  explicit CutoffExceeded(const std::string& msg)
      : Error(ErrorKind::statistical_precondition, "cutoff_exceeded", msg) {}
};

class EmptyWindow : public Error {
 public:
  explicit EmptyWindow(const std::string& msg)
      : Error(ErrorKind::statistical_precondition, "empty_window", msg) {}
};

class DegenerateVariance : public Error {
 public:
  explicit DegenerateVariance(const std::string& msg)
      : Error(ErrorKind::statistical_precondition, "degenerate_variance", msg) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& msg)
      : Error(ErrorKind::statistical_precondition, "insufficient_data", msg) {}
};

class BracketFailure : public Error {
 public:
  explicit BracketFailure(const std::string& msg)
      : Error(ErrorKind::numerical, "bracket_failure", msg) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& msg)
      : Error(ErrorKind::numerical, "convergence_failure", msg) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& msg)
      : Error(ErrorKind::numerical, "out_of_range", msg) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(ErrorKind::usage, "usage", msg) {}
};

}  // namespace geodesics
