#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwsreg/types.hpp"

namespace pwsreg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `offset()` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of an expression (zero denominator).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, Point2 at) : Error(what), at_(at) {}
  [[nodiscard]] Point2 where() const noexcept { return at_; }

 private:
  Point2 at_;
};

/// A caller-side contract was not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Degenerate contact: no Lie derivative up to the configured order is nonzero.
class ContactError : public Error {
 public:
  using Error::Error;
};

/// Filippov continuation is not unique at the reported point.
class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, Point2 at) : Error(what), at_(at) {}
  [[nodiscard]] Point2 where() const noexcept { return at_; }

 private:
  Point2 at_;
};

/// Numerical integration failed (time budget, step underflow, ...).
class IntegrationError : public Error {
 public:
  enum class Reason { max_time, step_underflow, step_budget, left_window, misconfigured_section };

  IntegrationError(Reason reason, const std::string& what, Point2 at, double t)
      : Error(what), reason_(reason), at_(at), t_(t) {}
  [[nodiscard]] Reason reason() const noexcept { return reason_; }
  [[nodiscard]] Point2 where() const noexcept { return at_; }
  [[nodiscard]] double when() const noexcept { return t_; }

 private:
  Reason reason_;
  Point2 at_;
  double t_;
};

/// One failed hypothesis check, labelled after the hypothesis it tests.
struct Diagnostic {
  std::string label;
  std::string message;
};

/// Scenario hypotheses do not hold; carries every failed check.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& ds) {
    std::string out = "scenario validation failed:";
    for (const auto& d : ds) out += "\n  " + d.label + ": " + d.message;
    return out;
  }
  std::vector<Diagnostic> diagnostics_;
};

/// A numerical estimator did not converge or produced inconsistent results.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pwsreg
