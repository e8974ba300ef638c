#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvfuse {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry

class GeometryError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDepth : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateHomography : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class PointAtInfinity : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateConic : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// filter

class FilterError : public Error {
 public:
  using Error::Error;
};

class CholeskyFailure : public FilterError {
 public:
  using FilterError::FilterError;
};

class DimensionMismatch : public FilterError {
 public:
  using FilterError::FilterError;
};

class SigmaPointProjectionFailure : public FilterError {
 public:
  using FilterError::FilterError;
};

class SingularInnovation : public FilterError {
 public:
  using FilterError::FilterError;
};

class InvalidDt : public FilterError {
 public:
  using FilterError::FilterError;
};

// tracker / pose / metrics

class NoObservation : public Error {
 public:
  using Error::Error;
};

class UnknownSkeleton : public Error {
 public:
  using Error::Error;
};

class EmptyGroundTruth : public Error {
 public:
  using Error::Error;
};

class SkeletonMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// io

class IoError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed. `line` is 1-based; 0 when the whole document
// failed (single-document JSON files).
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::string reason)
      : Error(file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line),
        reason_(std::move(reason)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string reason_;
};

// Input parsed but violates a semantic rule.
class ValidationError : public Error {
 public:
  ValidationError(std::string entity, std::string rule)
      : Error(entity + ": " + rule),
        entity_(std::move(entity)),
        rule_(std::move(rule)) {}

  const std::string& entity() const noexcept { return entity_; }
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string entity_;
  std::string rule_;
};

}  // namespace mvfuse
