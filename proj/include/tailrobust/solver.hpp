#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tailrobust/errors.hpp"

namespace tailrobust {

struct SolveOptions {
  double lo = 1e-3;
  double hi = 10.0;
  std::size_t grid_points = 200;  // log-spaced scan points on [lo, hi]
  double tol = 1e-9;              // on |f(root)|
  std::size_t max_evaluations = 200;  // per bracket refinement
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;  // |f(root)|
  std::size_t evaluations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool tangent = false;  // found at a stationary point rather than a sign change
};

std::vector<double> log_grid(double lo, double hi, std::size_t points);

// Scans f on the log grid, picks the sign-change bracket containing `hint`
// (or nearest to it; the first bracket without a hint) and refines it with
// TOMS 748. With no sign change, an interior local minimum of |f| that is
// within tol of zero is accepted as a tangent root. Throws SolverFailure
// carrying the scan otherwise. The returned residual may exceed tol when the
// bracket collapses to machine precision first; callers decide.
RootResult find_root(const std::function<double(double)>& f, const SolveOptions& options,
                     std::optional<double> hint = std::nullopt);

// Root of f on [lo, hi] to tolerance `tol`.
double solve_scalar(const std::function<double(double)>& f, double lo, double hi,
                    double tol = 1e-9);

}  // namespace tailrobust
