#include "tailrobust/copulas.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "tailrobust/format.hpp"
#include "tailrobust/rng.hpp"

namespace tailrobust {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_gamma_variate(double shape, Engine& engine) {
  // For shape < 1 use G(shape) = G(shape + 1) * U^(1/shape) in log space;
  // the direct draw underflows to 0 for the tiny shapes Clayton(200) needs.
  if (shape < 1.0) {
    std::gamma_distribution<double> gamma(shape + 1.0, 1.0);
    return std::log(gamma(engine)) + std::log(uniform_open(engine)) / shape;
  }
  std::gamma_distribution<double> gamma(shape, 1.0);
  return std::log(gamma(engine));
}

// Positive stable variate with Laplace transform exp(-s^a), 0 < a < 1, via
// Kanter's representation. Returned on the log scale.
double log_positive_stable(double a, Engine& engine) {
  const double u = std::numbers::pi * uniform_open(engine);
  const double e = standard_exponential(engine);
  return std::log(std::sin(a * u)) - std::log(std::sin(u)) / a +
         (1.0 - a) / a * (std::log(std::sin((1.0 - a) * u)) - std::log(e));
}

void sample_normal(double rho, std::span<Point> out, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double tail = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (auto& p : out) {
    const double z1 = normal(engine);
    const double z2 = normal(engine);
    p = {z1, rho * z1 + tail * z2};
  }
}

void sample_gumbel(double delta, std::span<Point> out, Engine& engine) {
  if (delta < 1.0) {
    throw std::invalid_argument(
        "gumbel sampling requires delta >= 1 (the copula expression is not "
        "2-increasing below 1), got " + format_double(delta));
  }
  if (delta == 1.0) {
    for (auto& p : out) p = {uniform_open(engine), uniform_open(engine)};
    return;
  }
  // Marshall-Olkin: U = exp(-(E / S)^(1/delta)) with S positive stable of
  // index 1/delta.
  const double a = 1.0 / delta;
  for (auto& p : out) {
    const double log_s = log_positive_stable(a, engine);
    const double e1 = standard_exponential(engine);
    const double e2 = standard_exponential(engine);
    p = {std::exp(-std::exp(a * (std::log(e1) - log_s))),
         std::exp(-std::exp(a * (std::log(e2) - log_s)))};
  }
}

void sample_clayton(double delta, std::span<Point> out, Engine& engine) {
  // Gamma frailty: U = (1 + E / V)^(-1/delta), V ~ Gamma(1/delta, 1).
  const double shape = 1.0 / delta;
  for (auto& p : out) {
    const double log_v = log_gamma_variate(shape, engine);
    const double e1 = standard_exponential(engine);
    const double e2 = standard_exponential(engine);
    p = {std::exp(-softplus(std::log(e1) - log_v) / delta),
         std::exp(-softplus(std::log(e2) - log_v) / delta)};
  }
}

void draw(const CopulaModel& model, std::span<Point> out, Engine& engine) {
  switch (model.family()) {
    case CopulaFamily::BivariateNormal:
      sample_normal(model.param(), out, engine);
      break;
    case CopulaFamily::Gumbel:
      sample_gumbel(model.param(), out, engine);
      break;
    case CopulaFamily::Clayton:
      sample_clayton(model.param(), out, engine);
      break;
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

Point to_scale(Point p, bool from_uniform, bool to_uniform) {
  if (from_uniform == to_uniform) return p;
  if (to_uniform) return {normal_cdf(p.x), normal_cdf(p.y)};
  return {normal_quantile(p.x), normal_quantile(p.y)};
}

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::invalid_argument("malformed model spec '" + std::string(spec) +
                                "': bad number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

CopulaModel::CopulaModel(CopulaFamily family, double param)
    : family_(family), param_(param) {
  if (!std::isfinite(param)) {
    throw std::invalid_argument("copula parameter must be finite");
  }
  if (family == CopulaFamily::BivariateNormal && (param < -1.0 || param > 1.0)) {
    throw std::invalid_argument("normal copula requires rho in [-1, 1], got " +
                                format_double(param));
  }
  if (family != CopulaFamily::BivariateNormal && !(param > 0.0)) {
    throw std::invalid_argument(std::string(family == CopulaFamily::Gumbel ? "gumbel" : "clayton") +
                                " copula requires delta > 0, got " + format_double(param));
  }
}

std::string CopulaModel::to_string() const {
  switch (family_) {
    case CopulaFamily::BivariateNormal:
      return "normal:rho=" + format_double(param_);
    case CopulaFamily::Gumbel:
      return "gumbel:delta=" + format_double(param_);
    case CopulaFamily::Clayton:
      return "clayton:delta=" + format_double(param_);
  }
  return {};
}

CopulaModel parse_model_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto eq = spec.find('=');
  if (colon == std::string_view::npos || eq == std::string_view::npos || eq < colon) {
    throw std::invalid_argument("malformed model spec '" + std::string(spec) +
                                "', expected e.g. normal:rho=0.75");
  }
  const auto family = spec.substr(0, colon);
  const auto key = spec.substr(colon + 1, eq - colon - 1);
  const double value = parse_number(spec.substr(eq + 1), spec);
  if (family == "normal" && key == "rho") return CopulaModel::normal(value);
  if (family == "gumbel" && key == "delta") return CopulaModel::gumbel(value);
  if (family == "clayton" && key == "delta") return CopulaModel::clayton(value);
  throw std::invalid_argument("unknown model spec '" + std::string(spec) +
                              "', expected normal:rho=<f>, gumbel:delta=<f> or clayton:delta=<f>");
}

std::optional<double> true_eta(const CopulaModel& model) {
  if (model.family() == CopulaFamily::BivariateNormal) return (1.0 + model.param()) / 2.0;
  if (model.param() == 1.0) return 0.5;
  return std::nullopt;
}

double copula_cdf(const CopulaModel& model, double u, double v) {
  const double d = model.param();
  switch (model.family()) {
    case CopulaFamily::Gumbel:
      return std::exp(-std::pow(std::pow(-std::log(u), d) + std::pow(-std::log(v), d), 1.0 / d));
    case CopulaFamily::Clayton:
      return std::pow(std::pow(u, -d) + std::pow(v, -d) - 1.0, -1.0 / d);
    case CopulaFamily::BivariateNormal:
      break;
  }
  throw std::invalid_argument("copula_cdf is only available for gumbel and clayton");
}

std::vector<double> BivariateSample::xs() const {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(), [](const Point& p) { return p.x; });
  return out;
}

std::vector<double> BivariateSample::ys() const {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(), [](const Point& p) { return p.y; });
  return out;
}

void BivariateSample::validate() const {
  if (pairs.size() < 2) {
    throw std::invalid_argument("bivariate sample needs at least 2 observations, got " +
                                std::to_string(pairs.size()));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!std::isfinite(pairs[i].x) || !std::isfinite(pairs[i].y)) {
      throw std::invalid_argument("non-finite value in observation " + std::to_string(i + 1));
    }
  }
}

ContaminationSpec::ContaminationSpec(CopulaModel base_model, CopulaModel contaminant_model,
                                     double eps, ContaminationMode contamination_mode)
    : base(base_model), contaminant(contaminant_model), epsilon(eps), mode(contamination_mode) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must be in [0, 1), got " + format_double(epsilon));
  }
}

BivariateSample sample(const CopulaModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("sample size n must be >= 2, got " + std::to_string(n));
  }
  BivariateSample out;
  out.seed = seed;
  out.pairs.resize(n);
  auto engine = make_engine(seed);
  draw(model, out.pairs, engine);
  return out;
}

BivariateSample sample_contaminated(const ContaminationSpec& spec, std::size_t n,
                                    std::uint64_t seed) {
  BivariateSample out = sample(spec.base, n, seed);
  if (spec.epsilon == 0.0) return out;

  std::vector<char> contaminated(n, 0);
  auto selector = make_engine(derive_seed(seed, 2));
  if (spec.mode == ContaminationMode::Bernoulli) {
    for (auto& c : contaminated) c = uniform_open(selector) < spec.epsilon;
  } else {
    const auto count = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(spec.epsilon * static_cast<double>(n) - 1e-9)));
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(index[i], index[pick(selector)]);
      contaminated[index[i]] = 1;
    }
  }

  const auto count = static_cast<std::size_t>(std::count(contaminated.begin(), contaminated.end(), 1));
  std::vector<Point> outliers(count);
  if (count > 0) {
    auto engine = make_engine(derive_seed(seed, 1));
    draw(spec.contaminant, outliers, engine);
  }
  const bool from_uniform = spec.contaminant.uniform_marginals();
  const bool to_uniform = spec.base.uniform_marginals();
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (contaminated[i]) out.pairs[i] = to_scale(outliers[next++], from_uniform, to_uniform);
  }
  out.contaminant_count = count;
  return out;
}

}  // namespace tailrobust
