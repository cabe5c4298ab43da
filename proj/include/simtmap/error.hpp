#pragma once

#include <stdexcept>
#include <string>

namespace simtmap {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user input: bad device/workload parameters, unknown kernel,
// contradictory options. CLI exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed data: trace files, kernel files, reports. CLI exit code 2.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Simulation failures: plan/device mismatch, cycle budget exceeded.
// CLI exit code 3.
class SimError : public Error {
 public:
  using Error::Error;
};

}  // namespace simtmap
