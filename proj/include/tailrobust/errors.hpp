#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tailrobust {

// Data-dependent failure of an estimator (as opposed to a caller error,
// which is reported with std::invalid_argument).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanPoint {
  double x;
  double f;
};

// The estimating equation could not be solved. Carries the scan of the
// equation over the search grid for diagnostics.
class SolverFailure : public EstimationError {
 public:
  SolverFailure(const std::string& what, std::vector<ScanPoint> scan)
      : EstimationError(what), scan_(std::move(scan)) {}

  const std::vector<ScanPoint>& scan() const { return scan_; }

 private:
  std::vector<ScanPoint> scan_;
};

}  // namespace tailrobust
