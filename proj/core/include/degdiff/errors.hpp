#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace degdiff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LambertBranch { W0, Upper };

/// Argument outside the domain of a Lambert branch: y < -1/e for W0,
/// y < e for the inverse of e^x/x.
class BranchDomainError : public Error {
 public:
  BranchDomainError(double input, LambertBranch branch);
  double input() const noexcept { return input_; }
  LambertBranch branch() const noexcept { return branch_; }

 private:
  double input_;
  LambertBranch branch_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  /// Byte offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Both Dirichlet data subcritical: existence is not established there.
class NotCoveredError : public Error {
 public:
  using Error::Error;
};

/// Shooting bracket could not be established below the c ceiling.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A Cauchy solution dropped below the positivity floor.
class CollapseError : public Error {
 public:
  using Error::Error;
};

/// Linear solver failure (singular matrix or no convergence).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Explicit scheme left its stability envelope.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected; the message starts with a field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace degdiff
