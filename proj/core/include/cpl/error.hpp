#pragma once

#include <stdexcept>
#include <string>

namespace cpl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a failure is tied to a simulation time.
class TimedError : public Error {
 public:
  TimedError(const std::string& what, double t)
      : Error(what + " at t=" + std::to_string(t)), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Sup norm exceeded the configured ceiling.
class Blowup : public TimedError {
 public:
  explicit Blowup(double t) : TimedError("blow-up", t) {}
};

/// NaN or infinity appeared in the state.
class NonFinite : public TimedError {
 public:
  explicit NonFinite(double t) : TimedError("non-finite state", t) {}
};

/// Zero number is undefined: the field is identically zero at the given tolerance.
class DegenerateField : public Error {
 public:
  using Error::Error;
};

class MismatchedTrajectories : public Error {
 public:
  using Error::Error;
};

/// The argmax of a spatially homogeneous field is undefined.
class FlatField : public TimedError {
 public:
  explicit FlatField(double t) : TimedError("flat field", t) {}
};

class UnwrapFailure : public TimedError {
 public:
  explicit UnwrapFailure(double t) : TimedError("phase unwrap failure", t) {}
};

/// |u_xx| at the evaluation point is below the guard threshold.
class NearSingular : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A tangent frame vector collapsed between re-orthonormalizations.
class Degenerate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& reason)
      : Error(key + ": " + reason), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace cpl
