#pragma once

#include <stdexcept>
#include <string>

namespace g2mu {

/// Base of every error raised by the library. Invalid inputs raise one of the
/// subclasses below; programming errors inside the library are reported as
/// std::logic_error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (configs, matrices with non-integer entries, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

class GradeError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class NonUnimodular : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class NotG2Compatible : public Error {
 public:
  NotG2Compatible(const std::string& what, std::size_t element_index)
      : Error(what), element_index_(element_index) {}
  std::size_t element_index() const { return element_index_; }

 private:
  std::size_t element_index_;
};

class NonIntegerDimension : public Error {
 public:
  using Error::Error;
};

class NotFixed : public Error {
 public:
  using Error::Error;
};

class ConvergenceRegionViolated : public Error {
 public:
  using Error::Error;
};

class PoleEncountered : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  PreconditionFailed(const std::string& condition, const std::string& detail)
      : Error(condition + ": " + detail), condition_(condition) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

}  // namespace g2mu
