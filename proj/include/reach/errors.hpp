#pragma once

#include <stdexcept>
#include <string>

namespace reach {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroProbabilityObservation : public Error {
 public:
  using Error::Error;
};

class EmptyTargetSet : public Error {
 public:
  EmptyTargetSet() : Error("target set is empty") {}
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class NoAdmissibleAction : public Error {
 public:
  NoAdmissibleAction() : Error("no admissible action") {}
};

class NoAdmissibleObservation : public Error {
 public:
  NoAdmissibleObservation() : Error("no admissible observation") {}
};

class NonMonotoneVI : public Error {
 public:
  using Error::Error;
};

class EmptyPolicy : public Error {
 public:
  EmptyPolicy() : Error("policy has no alpha-vectors") {}
};

}  // namespace reach
