#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tailrobust/solver.hpp"
#include "tailrobust/transforms.hpp"

namespace tailrobust {

enum class EstimatorFamily { Hill, DPD, ERM };

std::string_view to_string(EstimatorFamily family);
EstimatorFamily parse_estimator_family(std::string_view text);

struct EstimatorConfig {
  EstimatorFamily family = EstimatorFamily::DPD;
  double alpha = 0.0;  // ignored by Hill
  std::size_t k = 0;
  MarginalKind marginal = MarginalKind::Frechet;

  // Checks alpha in [0, 1] and k against the transform for sample size n.
  void validate(std::size_t n) const;
};

struct EstimateFlags {
  bool degenerate = false;  // Hill with no excess over the threshold
  bool above_one = false;   // eta_hat > 1, reported unclamped
  bool tangent = false;     // root found at a stationary point
};

struct EstimateResult {
  double eta_hat = 0.0;
  double residual = 0.0;  // |estimating equation| at eta_hat
  std::size_t evaluations = 0;
  std::size_t effective_count = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  EstimateFlags flags;

  std::vector<std::string> flag_names() const;
};

// Hill estimator: mean log-excess of the k largest order statistics over
// Z_(n-k). Requires 1 <= k <= n - 1.
EstimateResult hill(const PseudoSample& ps, std::size_t k);

// Density power divergence estimating equation for exponential
// log-relative excesses, evaluated at trial `eta`:
//   alpha / ((1+alpha)^2 eta) + (1/k) sum (e/eta^2 - 1/eta) exp(-alpha e/eta)
// where the sum runs over the excesses e of the k largest order statistics.
double dpd_equation(const ExcessData& ed, double alpha, double eta);

// Root of dpd_equation nearest the Hill estimate. alpha = 0 reproduces Hill.
// Throws EstimationError/SolverFailure when no root can be located.
EstimateResult dpd_estimate(const ExcessData& ed, double alpha, const SolveOptions& options = {});

struct ErmWeights {
  std::vector<double> theta;   // eta / (1 - (j/k)^eta), j = 1..k-1
  std::vector<double> jtilde;  // J~_alpha(j / (k+1)), j = 1..k-1
};

// Exponential-regression means and weights at trial `eta`. Requires eta > 0
// and k >= 3.
ErmWeights erm_weights(double eta, std::size_t k, double alpha);

// theta_j = eta / (1 - (j/k)^eta).
double erm_theta(double eta, std::size_t j, std::size_t k);

// J~_alpha(u) = (u^eta - 1 - eta u^eta log u) (1 - u^eta)^alpha eta^(-alpha-2).
double erm_jtilde(double u, double eta, double alpha);

// sum over retained j of J~_alpha(j/(k+1)) [alpha theta_j/(1+alpha)^2
//   + (W_j - theta_j) exp(-alpha W_j / theta_j)]
double erm_equation(const ScaledLogRatios& w, double alpha, double eta);

// Root of erm_equation. For alpha > 0 the root nearest the alpha = 0 solution
// is selected.
EstimateResult erm_estimate(const ScaledLogRatios& w, double alpha,
                            const SolveOptions& options = {});

// Runs the configured estimator on a pseudo-sample.
EstimateResult estimate(const PseudoSample& ps, const EstimatorConfig& config,
                        const SolveOptions& options = {});

}  // namespace tailrobust
