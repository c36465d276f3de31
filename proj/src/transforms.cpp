#include "tailrobust/transforms.hpp"

#include "tailrobust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailrobust {

std::string_view to_string(MarginalKind marginal) {
  return marginal == MarginalKind::Frechet ? "frechet" : "pareto";
}

MarginalKind parse_marginal(std::string_view text) {
  if (text == "frechet") return MarginalKind::Frechet;
  if (text == "pareto") return MarginalKind::Pareto;
  throw std::invalid_argument("unknown marginal '" + std::string(text) +
                              "', expected frechet or pareto");
}

std::vector<std::size_t> ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw std::invalid_argument("ranks need at least 2 values, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("non-finite value at position " + std::to_string(i + 1));
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r + 1;
  return rank;
}

PseudoSample::PseudoSample(std::vector<double> z, MarginalKind marginal)
    : z_(std::move(z)), marginal_(marginal) {
  if (z_.size() < 2) {
    throw std::invalid_argument("pseudo-sample needs at least 2 values");
  }
  const double floor = marginal_ == MarginalKind::Frechet ? 0.0 : 1.0;
  for (double v : z_) {
    if (!std::isfinite(v) || !(v > floor)) {
      throw std::invalid_argument(std::string("pseudo-sample value ") + std::to_string(v) +
                                  " outside the " + std::string(to_string(marginal_)) +
                                  " support");
    }
  }
  sorted_ = z_;
  std::sort(sorted_.begin(), sorted_.end());
}

PseudoSample to_pseudo_sample(const BivariateSample& sample, MarginalKind marginal) {
  sample.validate();
  const auto rx = ranks(sample.xs());
  const auto ry = ranks(sample.ys());
  const double n1 = static_cast<double>(sample.size() + 1);
  auto standardize = [&](std::size_t r) {
    const double p = static_cast<double>(r) / n1;
    return marginal == MarginalKind::Frechet ? -1.0 / std::log(p) : 1.0 / (1.0 - p);
  };
  std::vector<double> z(sample.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = std::min(standardize(rx[i]), standardize(ry[i]));
  }
  return PseudoSample(std::move(z), marginal);
}

ExcessData log_relative_excesses(const PseudoSample& ps, std::size_t k) {
  const std::size_t n = ps.size();
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("k must be in [1, n-1] = [1, " + std::to_string(n - 1) +
                                "], got " + std::to_string(k));
  }
  ExcessData out;
  out.k = k;
  out.threshold = ps.order_stat(n - k);
  const double log_threshold = std::log(out.threshold);
  out.z_tilde.reserve(n);
  for (double z : ps.z()) {
    const double e = std::log(z) - log_threshold;
    out.z_tilde.push_back(e);
    if (e > 0.0) ++out.positive_count;
  }
  out.top_excesses.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    out.top_excesses.push_back(std::log(ps.order_stat(n - i + 1)) - log_threshold);
  }
  return out;
}

ScaledLogRatios scaled_log_ratios(const PseudoSample& ps, std::size_t k) {
  const std::size_t n = ps.size();
  if (k < 3 || k > n - 1) {
    throw std::invalid_argument("k must be in [3, n-1] = [3, " + std::to_string(n - 1) +
                                "], got " + std::to_string(k));
  }
  ScaledLogRatios out;
  out.k = k;
  const double threshold = ps.order_stat(n - k);
  for (std::size_t j = 1; j < k; ++j) {
    const double num = ps.order_stat(n - j + 1) - threshold;
    const double den = ps.order_stat(n - j) - threshold;
    const double w = static_cast<double>(j) * std::log(num / den);
    if (den > 0.0 && std::isfinite(w)) {
      out.w.push_back(w);
      out.j.push_back(j);
    } else {
      out.dropped.push_back(j);
    }
  }
  if (out.w.size() < 2) {
    throw EstimationError("only " + std::to_string(out.w.size()) +
                                " finite scaled log-ratios at k = " + std::to_string(k) +
                                "; estimation impossible");
  }
  return out;
}

}  // namespace tailrobust
