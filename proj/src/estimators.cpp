#include "tailrobust/estimators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tailrobust/format.hpp"

namespace tailrobust {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1], got " + format_double(alpha));
  }
}

EstimateResult from_root(const RootResult& root, double tol, std::size_t effective_count,
                         const char* name) {
  if (root.residual > tol) {
    throw SolverFailure(std::string(name) + " root refinement stopped at residual " +
                            format_double(root.residual) + " above tolerance " + format_double(tol),
                        {});
  }
  EstimateResult out;
  out.eta_hat = root.root;
  out.residual = root.residual;
  out.evaluations = root.evaluations;
  out.effective_count = effective_count;
  out.bracket_lo = root.bracket_lo;
  out.bracket_hi = root.bracket_hi;
  out.flags.above_one = root.root > 1.0;
  out.flags.tangent = root.tangent;
  return out;
}

}  // namespace

std::string_view to_string(EstimatorFamily family) {
  switch (family) {
    case EstimatorFamily::Hill:
      return "hill";
    case EstimatorFamily::DPD:
      return "dpd";
    case EstimatorFamily::ERM:
      return "erm";
  }
  return {};
}

EstimatorFamily parse_estimator_family(std::string_view text) {
  if (text == "hill") return EstimatorFamily::Hill;
  if (text == "dpd") return EstimatorFamily::DPD;
  if (text == "erm") return EstimatorFamily::ERM;
  throw std::invalid_argument("unknown estimator family '" + std::string(text) +
                              "', expected hill, dpd or erm");
}

void EstimatorConfig::validate(std::size_t n) const {
  check_alpha(alpha);
  const std::size_t k_min = family == EstimatorFamily::ERM ? 3 : 1;
  if (n < 2 || k < k_min || k > n - 1) {
    throw std::invalid_argument("k must be in [" + std::to_string(k_min) + ", n-1] for n = " +
                                std::to_string(n) + ", got " + std::to_string(k));
  }
}

std::vector<std::string> EstimateResult::flag_names() const {
  std::vector<std::string> names;
  if (flags.degenerate) names.emplace_back("degenerate");
  if (flags.above_one) names.emplace_back("eta_above_one");
  if (flags.tangent) names.emplace_back("tangent_root");
  return names;
}

EstimateResult hill(const PseudoSample& ps, std::size_t k) {
  const auto ed = log_relative_excesses(ps, k);
  EstimateResult out;
  out.eta_hat = std::accumulate(ed.top_excesses.begin(), ed.top_excesses.end(), 0.0) /
                static_cast<double>(k);
  out.effective_count = k;
  out.bracket_lo = out.bracket_hi = out.eta_hat;
  out.flags.degenerate = ed.positive_count == 0;
  out.flags.above_one = out.eta_hat > 1.0;
  return out;
}

double dpd_equation(const ExcessData& ed, double alpha, double eta) {
  double sum = 0.0;
  for (double e : ed.top_excesses) {
    sum += (e / (eta * eta) - 1.0 / eta) * std::exp(-alpha * e / eta);
  }
  return alpha / ((1.0 + alpha) * (1.0 + alpha) * eta) + sum / static_cast<double>(ed.k);
}

EstimateResult dpd_estimate(const ExcessData& ed, double alpha, const SolveOptions& options) {
  check_alpha(alpha);
  if (ed.positive_count == 0) {
    throw EstimationError("dpd estimate needs at least one positive log-relative excess");
  }
  const double hill_value =
      std::accumulate(ed.top_excesses.begin(), ed.top_excesses.end(), 0.0) /
      static_cast<double>(ed.k);
  const auto root =
      find_root([&](double eta) { return dpd_equation(ed, alpha, eta); }, options, hill_value);
  return from_root(root, options.tol, ed.k, "dpd");
}

double erm_theta(double eta, std::size_t j, std::size_t k) {
  const double log_ratio = std::log(static_cast<double>(j) / static_cast<double>(k));
  return eta / -std::expm1(eta * log_ratio);
}

double erm_jtilde(double u, double eta, double alpha) {
  const double log_x = eta * std::log(u);  // log u^eta
  const double x = std::exp(log_x);
  const double x_minus_one = std::expm1(log_x);
  const double base = x_minus_one - x * log_x;
  const double damp = alpha == 0.0 ? 1.0 : std::pow(-x_minus_one, alpha);
  return base * damp * std::pow(eta, -alpha - 2.0);
}

ErmWeights erm_weights(double eta, std::size_t k, double alpha) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("erm weights need eta > 0, got " + format_double(eta));
  }
  if (k < 3) {
    throw std::invalid_argument("erm weights need k >= 3, got " + std::to_string(k));
  }
  ErmWeights out;
  out.theta.reserve(k - 1);
  out.jtilde.reserve(k - 1);
  const double k1 = static_cast<double>(k + 1);
  for (std::size_t j = 1; j < k; ++j) {
    out.theta.push_back(erm_theta(eta, j, k));
    out.jtilde.push_back(erm_jtilde(static_cast<double>(j) / k1, eta, alpha));
  }
  return out;
}

double erm_equation(const ScaledLogRatios& w, double alpha, double eta) {
  const double shift = alpha / ((1.0 + alpha) * (1.0 + alpha));
  const double k1 = static_cast<double>(w.k + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    const std::size_t j = w.j[i];
    const double theta = erm_theta(eta, j, w.k);
    const double weight = erm_jtilde(static_cast<double>(j) / k1, eta, alpha);
    sum += weight * (shift * theta + (w.w[i] - theta) * std::exp(-alpha * w.w[i] / theta));
  }
  return sum;
}

EstimateResult erm_estimate(const ScaledLogRatios& w, double alpha, const SolveOptions& options) {
  check_alpha(alpha);
  if (w.w.size() < 2) {
    throw EstimationError("erm estimate needs at least 2 retained scaled log-ratios");
  }
  std::optional<double> pilot;
  std::size_t pilot_evaluations = 0;
  if (alpha > 0.0) {
    try {
      const auto classical =
          find_root([&](double eta) { return erm_equation(w, 0.0, eta); }, options);
      pilot = classical.root;
      pilot_evaluations = classical.evaluations;
    } catch (const SolverFailure&) {
      // Without a pilot the first sign change is taken.
    }
  }
  const auto root =
      find_root([&](double eta) { return erm_equation(w, alpha, eta); }, options, pilot);
  auto out = from_root(root, options.tol, w.w.size(), "erm");
  out.evaluations += pilot_evaluations;
  return out;
}

EstimateResult estimate(const PseudoSample& ps, const EstimatorConfig& config,
                        const SolveOptions& options) {
  config.validate(ps.size());
  switch (config.family) {
    case EstimatorFamily::Hill:
      return hill(ps, config.k);
    case EstimatorFamily::DPD:
      return dpd_estimate(log_relative_excesses(ps, config.k), config.alpha, options);
    case EstimatorFamily::ERM:
      break;
  }
  return erm_estimate(scaled_log_ratios(ps, config.k), config.alpha, options);
}

}  // namespace tailrobust
