#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bpm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Wavelength (or other argument) outside the validated domain of a model.
class RangeError : public Error {
public:
  RangeError(const std::string& what, double value) : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

private:
  double value_;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), message_(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

  /// Same error with `context` (typically a file name) prepended.
  ParseError prefixed(const std::string& context) const { return ParseError(context + ": " + message_, line_); }

private:
  std::string message_;
  std::size_t line_;
};

/// A loaded model violates one of its invariants; `field()` names the culprit.
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& reason)
      : Error(field + ": " + reason), field_(std::move(field)), reason_(reason) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string field_;
  std::string reason_;
};

/// The phase-mismatch function keeps one sign over the whole search interval.
class NoCrossing : public Error {
public:
  NoCrossing(const std::string& what, int sign) : Error(what), sign_(sign) {}
  /// Sign of the mismatch over the interval (+1 or -1).
  int sign() const noexcept { return sign_; }

private:
  int sign_;
};

struct Bracket {
  double lo;
  double hi;
};

/// More than one root (or a continuum of roots) inside the search interval.
class MultipleRoots : public Error {
public:
  MultipleRoots(const std::string& what, std::vector<Bracket> brackets, bool degenerate)
      : Error(what), brackets_(std::move(brackets)), degenerate_(degenerate) {}
  const std::vector<Bracket>& brackets() const noexcept { return brackets_; }
  /// True when every sampled point is a root.
  bool degenerate() const noexcept { return degenerate_; }

private:
  std::vector<Bracket> brackets_;
  bool degenerate_;
};

/// An estimator was asked for a value its inputs cannot define (e.g. zero coincidences).
class UndefinedEstimate : public Error {
public:
  using Error::Error;
};

/// Counts contradict the supplied calibration (e.g. heralding efficiency above one).
class InconsistentCounts : public Error {
public:
  using Error::Error;
};

/// A simulation would exceed the configured event budget.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// Caller broke a documented precondition on its input data (e.g. unsorted stream).
class ContractViolation : public Error {
public:
  using Error::Error;
};

}  // namespace bpm
