#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "calkit/dataset.hpp"

namespace calkit {

// Input/config problems: bad CSV cells, violated dataset invariants,
// unresolvable config keys. The CLI maps these to exit status 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures while executing a valid request. The CLI maps these to exit
// status 2.
struct ExecutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ColumnRoles {
  std::vector<std::string> features;
  std::string label;
  std::string prediction;
};

// Loads a comma-separated file with a header row into a Dataset. Role
// columns must exist and be disjoint. Rejects non-numeric cells, non-binary
// labels, out-of-range predictions, and inconsistent predictions on
// duplicate inputs; diagnostics cite the offending data row number(s)
// (first data row = row 1).
Dataset load_dataset(const std::string& path, const ColumnRoles& roles);

}  // namespace calkit
