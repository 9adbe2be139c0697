#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vote_audit {

// Base of every data- or model-level failure the library reports. The CLI
// maps anything derived from this to exit status 1.
class AuditError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public AuditError {
public:
  using AuditError::AuditError;
};

class ConvergenceError : public AuditError {
public:
  using AuditError::AuditError;
};

// CSV ingestion failure. line() is 1-based; 0 means "no particular line".
class ParseError : public AuditError {
public:
  ParseError(std::size_t line, std::string reason)
      : AuditError(line == 0 ? reason : "line " + std::to_string(line) + ": " + reason),
        line_(line), reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::size_t line_;
  std::string reason_;
};

class InsufficientDataError : public AuditError {
public:
  using AuditError::AuditError;
};

class RankDeficientError : public AuditError {
public:
  using AuditError::AuditError;
};

class DegenerateFitError : public AuditError {
public:
  using AuditError::AuditError;
};

class CapacityError : public AuditError {
public:
  CapacityError(std::string message, long long shortfall)
      : AuditError(std::move(message)), shortfall_(shortfall) {}
  long long shortfall() const noexcept { return shortfall_; }

private:
  long long shortfall_;
};

}  // namespace vote_audit
