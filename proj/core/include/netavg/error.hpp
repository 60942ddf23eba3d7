#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netavg {

// Bad flags, malformed configuration, unusable parameter values. Maps to
// process exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (CSV cells, network files, cyclic
// structures read from disk). Maps to process exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A directed cycle where a DAG was required. Carries one offending cycle.
class CycleError : public DataError {
 public:
  CycleError(const std::string& what, std::vector<int> cycle)
      : DataError(what), cycle_(std::move(cycle)) {}

  // Node indices along the cycle, first node repeated at the end.
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

}  // namespace netavg
