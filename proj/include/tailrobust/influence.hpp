#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace tailrobust {

// Influence function of the DPD estimator at the exponential model.
struct IfDpdParams {
  double alpha = 0.0;
  double eta = 0.5;
  double b = 0.75;  // threshold quantile b(n/k_n)

  void validate() const;
};

// Influence function of the ERM estimator at the exponential regression
// model. `j0` is the contaminated index in the single-point case.
struct IfErmParams {
  double alpha = 0.0;
  double eta = 0.5;
  std::size_t k = 50;
  std::size_t j0 = 1;

  void validate() const;
};

// b(n/k_n) ~ 1 - k_n/n.
inline double approximate_threshold_quantile(double k_over_n) { return 1.0 - k_over_n; }

// (1+a)^3/(1+a^2) [(m - eta) exp(-a m/eta) + a eta/(1+a)^2], m = b min(e^t1, e^t2).
double if_dpd(double t1, double t2, const IfDpdParams& p);

// Contamination of W_j0 alone at t0.
double if_erm_single(double t0, const IfErmParams& p);

// Contamination of every W_j, j = 1..k-1, at t[j-1]. `p.j0` is ignored.
double if_erm_all(std::span<const double> t, const IfErmParams& p);

enum class InfluenceKind { Dpd, ErmSingle, ErmAllConstant };

using InfluenceParams = std::variant<IfDpdParams, IfErmParams>;

// Evenly spaced evaluation points "lo:hi:steps", both ends included.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 1;

  static GridSpec parse(std::string_view text);
  std::vector<double> points() const;
};

struct InfluencePoint {
  double t;
  double value;
};

// Tabulates an influence function over the grid. The DPD curve runs along
// the diagonal t1 = t2 = t; ErmAllConstant contaminates every W_j at t.
std::vector<InfluencePoint> influence_curve(InfluenceKind kind, const InfluenceParams& params,
                                            const GridSpec& grid);

}  // namespace tailrobust
