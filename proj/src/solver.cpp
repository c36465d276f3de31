#include "tailrobust/solver.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace tailrobust {

namespace {

bool sign_change(double a, double b) {
  return std::isfinite(a) && std::isfinite(b) && ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0));
}

double distance_to(double hint, double lo, double hi) {
  if (hint >= lo && hint <= hi) return 0.0;
  return std::min(std::abs(hint - lo), std::abs(hint - hi));
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("log grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

RootResult find_root(const std::function<double(double)>& f, const SolveOptions& options,
                     std::optional<double> hint) {
  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };

  const auto grid = log_grid(options.lo, options.hi, options.grid_points);
  std::vector<ScanPoint> scan;
  scan.reserve(grid.size());
  for (double x : grid) scan.push_back({x, counted(x)});

  std::optional<std::size_t> chosen;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
    if (!sign_change(scan[i].f, scan[i + 1].f)) continue;
    if (!hint) {
      chosen = i;
      break;
    }
    const double d = distance_to(*hint, scan[i].x, scan[i + 1].x);
    if (d < best) {
      best = d;
      chosen = i;
    }
  }

  RootResult result;
  if (chosen) {
    const ScanPoint a = scan[*chosen];
    const ScanPoint b = scan[*chosen + 1];
    result.bracket_lo = a.x;
    result.bracket_hi = b.x;
    if (a.f == 0.0 || b.f == 0.0) {
      result.root = a.f == 0.0 ? a.x : b.x;
    } else {
      std::uintmax_t max_iter = options.max_evaluations;
      auto narrow = [](double lo, double hi) {
        return std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                        std::max(std::abs(lo), std::abs(hi));
      };
      const auto [lo, hi] =
          boost::math::tools::toms748_solve(counted, a.x, b.x, a.f, b.f, narrow, max_iter);
      const double flo = counted(lo);
      const double fhi = counted(hi);
      result.root = std::abs(flo) <= std::abs(fhi) ? lo : hi;
      result.bracket_lo = lo;
      result.bracket_hi = hi;
    }
    result.residual = std::abs(counted(result.root));
    result.evaluations = evaluations;
    return result;
  }

  // No sign change: look for a tangent root at an interior minimum of |f|.
  std::optional<std::size_t> valley;
  for (std::size_t i = 1; i + 1 < scan.size(); ++i) {
    const double here = std::abs(scan[i].f);
    if (std::isfinite(here) && here <= std::abs(scan[i - 1].f) &&
        here <= std::abs(scan[i + 1].f) && (!valley || here < std::abs(scan[*valley].f))) {
      valley = i;
    }
  }
  if (valley) {
    std::uintmax_t max_iter = options.max_evaluations;
    auto magnitude = [&](double x) { return std::abs(counted(x)); };
    const auto [x, fx] = boost::math::tools::brent_find_minima(
        magnitude, scan[*valley - 1].x, scan[*valley + 1].x, 52, max_iter);
    if (fx <= options.tol) {
      result.root = x;
      result.residual = fx;
      result.bracket_lo = scan[*valley - 1].x;
      result.bracket_hi = scan[*valley + 1].x;
      result.tangent = true;
      result.evaluations = evaluations;
      return result;
    }
  }

  std::ostringstream msg;
  msg << "no sign change of the estimating equation on [" << options.lo << ", " << options.hi
      << "] (" << options.grid_points << " log-spaced points) and no interior root";
  throw SolverFailure(msg.str(), std::move(scan));
}

double solve_scalar(const std::function<double(double)>& f, double lo, double hi, double tol) {
  SolveOptions options;
  options.lo = lo;
  options.hi = hi;
  options.tol = tol;
  const auto result = find_root(f, options);
  if (result.residual > tol && result.bracket_hi - result.bracket_lo > tol) {
    throw SolverFailure("root refinement stopped with residual above tolerance", {});
  }
  return result.root;
}

}  // namespace tailrobust
