#pragma once

#include <stdexcept>
#include <string>

namespace trunclr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The Gaussian places no representable mass on the requested set.
class ZeroMassError : public Error {
 public:
  using Error::Error;
};

// A single truncated sample needed more draws than the rejection cap allows.
class TruncationTooSevere : public Error {
 public:
  using Error::Error;
};

class SingularDesign : public Error {
 public:
  SingularDesign(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

class NoSurvivingSamples : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure raised inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace trunclr
