#include "tailrobust/influence.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tailrobust/estimators.hpp"
#include "tailrobust/format.hpp"

namespace tailrobust {

namespace {

void check_common(double alpha, double eta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1], got " + format_double(alpha));
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be > 0, got " + format_double(eta));
  }
}

double gain(double alpha) {
  return std::pow(1.0 + alpha, 3) / (1.0 + alpha * alpha);
}

// (t - theta) exp(-a t / theta) + a theta / (1+a)^2
double bounded_score(double t, double theta, double alpha) {
  return (t - theta) * std::exp(-alpha * t / theta) +
         alpha * theta / ((1.0 + alpha) * (1.0 + alpha));
}

// sum_j theta_j^(-alpha-2) J~_0(j/(k+1))
double erm_normalizer(const IfErmParams& p) {
  const double k1 = static_cast<double>(p.k + 1);
  double sum = 0.0;
  for (std::size_t j = 1; j < p.k; ++j) {
    sum += std::pow(erm_theta(p.eta, j, p.k), -p.alpha - 2.0) *
           erm_jtilde(static_cast<double>(j) / k1, p.eta, 0.0);
  }
  if (sum == 0.0 || !std::isfinite(sum)) {
    throw std::invalid_argument("degenerate ERM influence normalization");
  }
  return sum;
}

double parse_field(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw std::invalid_argument("malformed grid '" + std::string(whole) +
                                "', expected lo:hi:steps");
  }
  return value;
}

}  // namespace

void IfDpdParams::validate() const {
  check_common(alpha, eta);
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("b must be > 0, got " + format_double(b));
  }
}

void IfErmParams::validate() const {
  check_common(alpha, eta);
  if (k < 3) throw std::invalid_argument("k must be >= 3, got " + std::to_string(k));
  if (j0 < 1 || j0 > k - 1) {
    throw std::invalid_argument("j0 must be in [1, k-1] = [1, " + std::to_string(k - 1) +
                                "], got " + std::to_string(j0));
  }
}

double if_dpd(double t1, double t2, const IfDpdParams& p) {
  p.validate();
  const double m = p.b * std::min(std::exp(t1), std::exp(t2));
  if (p.alpha == 0.0) return m - p.eta;
  return gain(p.alpha) * bounded_score(m, p.eta, p.alpha);
}

double if_erm_single(double t0, const IfErmParams& p) {
  p.validate();
  const double normalizer = erm_normalizer(p) / static_cast<double>(p.k - 1);
  const double theta = erm_theta(p.eta, p.j0, p.k);
  const double weight = erm_jtilde(static_cast<double>(p.j0) / static_cast<double>(p.k + 1),
                                   p.eta, p.alpha);
  return gain(p.alpha) / normalizer * weight * bounded_score(t0, theta, p.alpha);
}

double if_erm_all(std::span<const double> t, const IfErmParams& p) {
  IfErmParams checked = p;
  checked.j0 = 1;
  checked.validate();
  if (t.size() != p.k - 1) {
    throw std::invalid_argument("all-points ERM influence needs k-1 = " +
                                std::to_string(p.k - 1) + " contamination points, got " +
                                std::to_string(t.size()));
  }
  const double k1 = static_cast<double>(p.k + 1);
  double sum = 0.0;
  for (std::size_t j = 1; j < p.k; ++j) {
    const double theta = erm_theta(p.eta, j, p.k);
    sum += erm_jtilde(static_cast<double>(j) / k1, p.eta, p.alpha) *
           bounded_score(t[j - 1], theta, p.alpha);
  }
  return gain(p.alpha) / erm_normalizer(checked) * sum;
}

GridSpec GridSpec::parse(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) {
    throw std::invalid_argument("malformed grid '" + std::string(text) +
                                "', expected lo:hi:steps");
  }
  GridSpec grid;
  grid.lo = parse_field(text.substr(0, first), text);
  grid.hi = parse_field(text.substr(first + 1, second - first - 1), text);
  const auto steps_text = text.substr(second + 1);
  auto [ptr, ec] =
      std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), grid.steps);
  if (steps_text.empty() || ec != std::errc{} || ptr != steps_text.data() + steps_text.size() ||
      grid.steps < 1) {
    throw std::invalid_argument("grid steps must be a positive integer in '" +
                                std::string(text) + "'");
  }
  if (grid.hi < grid.lo) {
    throw std::invalid_argument("grid upper end below lower end in '" + std::string(text) + "'");
  }
  return grid;
}

std::vector<double> GridSpec::points() const {
  if (steps == 1) return {lo};
  std::vector<double> out(steps);
  const double h = (hi - lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) out[i] = lo + h * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<InfluencePoint> influence_curve(InfluenceKind kind, const InfluenceParams& params,
                                            const GridSpec& grid) {
  const auto ts = grid.points();
  std::vector<InfluencePoint> out;
  out.reserve(ts.size());
  if (kind == InfluenceKind::Dpd) {
    const auto* p = std::get_if<IfDpdParams>(&params);
    if (!p) throw std::invalid_argument("dpd influence curve needs IfDpdParams");
    for (double t : ts) out.push_back({t, if_dpd(t, t, *p)});
    return out;
  }
  const auto* p = std::get_if<IfErmParams>(&params);
  if (!p) throw std::invalid_argument("erm influence curve needs IfErmParams");
  for (double t : ts) {
    if (kind == InfluenceKind::ErmSingle) {
      out.push_back({t, if_erm_single(t, *p)});
    } else {
      const std::vector<double> constant(p->k - 1, t);
      out.push_back({t, if_erm_all(constant, *p)});
    }
  }
  return out;
}

}  // namespace tailrobust
