#include "degdiff/errors.hpp"

#include <sstream>

namespace degdiff {

namespace {

std::string branch_message(double input, LambertBranch branch) {
  std::ostringstream os;
  os.precision(17);
  if (branch == LambertBranch::W0) {
    os << "lambert_w0: argument " << input << " is below -1/e";
  } else {
    os << "lambert_w_upper: argument " << input << " is below e";
  }
  return os.str();
}

}  // namespace

BranchDomainError::BranchDomainError(double input, LambertBranch branch)
    : Error(branch_message(input, branch)), input_(input), branch_(branch) {}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error(message + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

ConfigError::ConfigError(const std::string& path, const std::string& message)
    : Error(path + ": " + message), path_(path) {}

}  // namespace degdiff
