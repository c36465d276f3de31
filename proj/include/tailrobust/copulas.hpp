#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tailrobust {

enum class CopulaFamily { BivariateNormal, Gumbel, Clayton };

// A bivariate law from the model catalog. `param` is the correlation rho
// for the normal family and delta for Gumbel and Clayton.
class CopulaModel {
 public:
  // Throws std::invalid_argument when `param` is outside the family's range:
  // rho in [-1, 1], delta > 0.
  CopulaModel(CopulaFamily family, double param);

  static CopulaModel normal(double rho) { return {CopulaFamily::BivariateNormal, rho}; }
  static CopulaModel gumbel(double delta) { return {CopulaFamily::Gumbel, delta}; }
  static CopulaModel clayton(double delta) { return {CopulaFamily::Clayton, delta}; }

  CopulaFamily family() const { return family_; }
  double param() const { return param_; }

  // Normal draws live on the real line; Gumbel and Clayton draws have
  // uniform marginals.
  bool uniform_marginals() const { return family_ != CopulaFamily::BivariateNormal; }

  // Canonical model spec, e.g. "normal:rho=0.75" or "clayton:delta=200".
  std::string to_string() const;

  friend bool operator==(const CopulaModel&, const CopulaModel&) = default;

 private:
  CopulaFamily family_;
  double param_;
};

// Parses the grammar `normal:rho=<f> | gumbel:delta=<f> | clayton:delta=<f>`.
CopulaModel parse_model_spec(std::string_view spec);

// Closed-form tail dependence coefficient where one is known: (1+rho)/2 for
// the normal family and 0.5 for Gumbel/Clayton at delta = 1. std::nullopt
// otherwise.
std::optional<double> true_eta(const CopulaModel& model);

// C(u, v) for the Gumbel and Clayton copulas. Throws for the normal family.
double copula_cdf(const CopulaModel& model, double u, double v);

struct Point {
  double x;
  double y;
  friend bool operator==(const Point&, const Point&) = default;
};

struct BivariateSample {
  std::vector<Point> pairs;
  std::uint64_t seed = 0;
  // Number of observations drawn from the contaminant (0 for pure samples).
  std::size_t contaminant_count = 0;

  std::size_t size() const { return pairs.size(); }
  std::vector<double> xs() const;
  std::vector<double> ys() const;

  // Throws std::invalid_argument unless n >= 2 and every value is finite.
  void validate() const;
};

enum class ContaminationMode {
  Bernoulli,   // each observation independently contaminated with prob. epsilon
  FixedCount,  // exactly ceil(epsilon * n) contaminated observations
};

struct ContaminationSpec {
  CopulaModel base;
  CopulaModel contaminant;
  double epsilon = 0.0;
  ContaminationMode mode = ContaminationMode::Bernoulli;

  // Throws std::invalid_argument unless epsilon is in [0, 1).
  ContaminationSpec(CopulaModel base, CopulaModel contaminant, double epsilon,
                    ContaminationMode mode = ContaminationMode::Bernoulli);
};

// n i.i.d. draws from `model`. Identical (model, n, seed) give bit-identical
// output. The Gumbel sampler needs delta >= 1; below that the copula
// expression is not 2-increasing and sampling is rejected.
BivariateSample sample(const CopulaModel& model, std::size_t n, std::uint64_t seed);

// Mixture (1 - epsilon) * base + epsilon * contaminant. The base draws use
// exactly the stream sample(base, n, seed) uses, so epsilon = 0 reproduces
// it. When the two models live on different marginal scales the contaminant
// draws are mapped onto the base scale through the normal CDF, which leaves
// their copula unchanged.
BivariateSample sample_contaminated(const ContaminationSpec& spec, std::size_t n,
                                    std::uint64_t seed);

}  // namespace tailrobust
