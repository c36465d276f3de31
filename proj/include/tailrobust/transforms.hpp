#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tailrobust/copulas.hpp"

namespace tailrobust {

enum class MarginalKind { Frechet, Pareto };

std::string_view to_string(MarginalKind marginal);
MarginalKind parse_marginal(std::string_view text);

// Ranks 1..n. Ties go to the earlier index first, so the result is always a
// permutation of 1..n. Throws std::invalid_argument for n < 2 or non-finite
// input.
std::vector<std::size_t> ranks(std::span<const double> values);

// Univariate sample of componentwise minima after standardizing both
// marginals, with its order statistics.
class PseudoSample {
 public:
  // Throws unless n >= 2 and every value is in the marginal's support
  // (> 0 for Frechet, > 1 for Pareto).
  PseudoSample(std::vector<double> z, MarginalKind marginal);

  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& sorted() const { return sorted_; }
  MarginalKind marginal() const { return marginal_; }
  std::size_t size() const { return z_.size(); }

  // 1-based order statistic Z_(i), i.e. the i-th smallest value.
  double order_stat(std::size_t i) const { return sorted_[i - 1]; }

 private:
  std::vector<double> z_;
  std::vector<double> sorted_;
  MarginalKind marginal_;
};

// Z_i = min of the rank-standardized coordinates:
//   Frechet: -1 / log(R / (n + 1)),  Pareto: 1 / (1 - R / (n + 1)).
PseudoSample to_pseudo_sample(const BivariateSample& sample, MarginalKind marginal);

// Log-relative excesses over the threshold Z_(n-k).
struct ExcessData {
  std::vector<double> z_tilde;      // log Z_i - log Z_(n-k), original order
  std::vector<double> top_excesses;  // excesses of Z_(n), ..., Z_(n-k+1)
  std::size_t k = 0;
  std::size_t positive_count = 0;  // #{i : z_tilde_i > 0}, at most k
  double threshold = 0.0;          // Z_(n-k)
};

// Requires 1 <= k <= n - 1.
ExcessData log_relative_excesses(const PseudoSample& ps, std::size_t k);

// W_j = j * log((Z_(n-j+1) - Z_(n-k)) / (Z_(n-j) - Z_(n-k))), j = 1..k-1.
// Non-finite W_j (a zero spacing against the threshold) are dropped and the
// index recorded; retained entries keep their original j.
struct ScaledLogRatios {
  std::vector<double> w;
  std::vector<std::size_t> j;        // 1-based index of each retained w
  std::vector<std::size_t> dropped;  // indices whose W_j was not finite
  std::size_t k = 0;
};

// Requires 3 <= k <= n - 1; throws EstimationError when fewer than 2
// finite W_j remain.
ScaledLogRatios scaled_log_ratios(const PseudoSample& ps, std::size_t k);

}  // namespace tailrobust
