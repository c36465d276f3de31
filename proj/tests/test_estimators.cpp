#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tailrobust/estimators.hpp"
#include "tailrobust/rng.hpp"

using namespace tailrobust;

namespace {

const PseudoSample kGeometric({1.0, 2.0, 4.0, 8.0}, MarginalKind::Frechet);

// Pseudo-sample from an independent-coordinates normal model (eta = 0.5).
PseudoSample model_pseudo_sample(std::uint64_t seed, std::size_t n = 1000,
                                 MarginalKind m = MarginalKind::Frechet) {
  return to_pseudo_sample(sample(CopulaModel::normal(0.0), n, seed), m);
}

ScaledLogRatios synthetic_erm(double eta, std::size_t k, std::uint64_t seed) {
  auto engine = make_engine(seed);
  ScaledLogRatios w;
  w.k = k;
  for (std::size_t j = 1; j < k; ++j) {
    w.j.push_back(j);
    w.w.push_back(oracle::erm_theta(eta, double(j), double(k)) * standard_exponential(engine));
  }
  return w;
}

}  // namespace

TEST_CASE("hill closed form") {
  const auto r = hill(kGeometric, 2);
  CHECK(r.eta_hat == doctest::Approx(1.0397207708399177).epsilon(1e-14));
  CHECK(r.eta_hat == doctest::Approx(oracle::hill(kGeometric.z(), 2)).epsilon(1e-14));
  CHECK(r.residual == 0.0);
  CHECK(r.effective_count == 2);
  CHECK(r.flags.above_one);

  const auto flat = hill(PseudoSample({2.0, 2.0, 2.0, 2.0}, MarginalKind::Frechet), 2);
  CHECK(flat.eta_hat == 0.0);
  CHECK(flat.flags.degenerate);
}

TEST_CASE("hill on independent unit Frechet minima") {
  // Population value of the Hill functional at the upper quartile of Z:
  // integral of S(s)/(s S(t0)) over s > t0 with S(s) = (1 - exp(-1/s))^2.
  auto survival = [](double s) { return std::pow(-std::expm1(-1.0 / s), 2); };
  const double t0 = -1.0 / std::log(0.5);
  const double target =
      oracle::simpson([&](double v) { return v > 0 ? survival(t0 / v) / (v * survival(t0)) : 0.0; },
                      0.0, 1.0, 200000);
  CHECK(target == doctest::Approx(0.62494).epsilon(1e-4));

  const std::size_t n = 10000, k = n / 4, reps = 200;
  double total = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    auto engine = make_engine(derive_seed(77, rep));
    std::vector<double> z(n);
    for (auto& v : z) {
      const double x = -1.0 / std::log(uniform_open(engine));
      const double y = -1.0 / std::log(uniform_open(engine));
      v = std::min(x, y);
    }
    total += hill(PseudoSample(z, MarginalKind::Frechet), k).eta_hat;
  }
  CHECK(std::abs(total / reps - target) < 0.005);
  // The upper quartile is too low a threshold for the limiting value.
  CHECK(total / reps - 0.5 > 0.1);
}

TEST_CASE("dpd at alpha = 0 coincides with hill") {
  const auto ed = log_relative_excesses(kGeometric, 2);
  const auto r = dpd_estimate(ed, 0.0);
  CHECK(std::abs(r.eta_hat - 1.0397207708399177) < 1e-8);
  CHECK(r.eta_hat > r.bracket_lo - 1e-15);
  CHECK(r.eta_hat < r.bracket_hi + 1e-15);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ps = model_pseudo_sample(seed);
    for (std::size_t k : {50u, 250u}) {
      const auto est = dpd_estimate(log_relative_excesses(ps, k), 0.0);
      REQUIRE(std::abs(est.eta_hat - hill(ps, k).eta_hat) < 1e-6);
    }
  }
}

TEST_CASE("dpd single positive excess is the one-point exponential MLE") {
  const PseudoSample ps({1.0, std::exp(0.7)}, MarginalKind::Frechet);
  CHECK(dpd_estimate(log_relative_excesses(ps, 1), 0.0).eta_hat == doctest::Approx(0.7));
}

TEST_CASE("dpd rejects invalid input") {
  const auto ed = log_relative_excesses(kGeometric, 2);
  CHECK_THROWS_AS(dpd_estimate(ed, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(dpd_estimate(ed, -0.1), std::invalid_argument);
  const auto flat = log_relative_excesses(PseudoSample({2.0, 2.0, 2.0}, MarginalKind::Frechet), 1);
  CHECK_THROWS_AS(dpd_estimate(flat, 0.5), EstimationError);
}

TEST_CASE("dpd residual contract, re-evaluated independently") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto ps = model_pseudo_sample(100 + seed);
    for (std::size_t k : {50u, 150u, 250u}) {
      for (double alpha : {0.0, 0.1, 0.5, 1.0}) {
        const auto r = dpd_estimate(log_relative_excesses(ps, k), alpha);
        REQUIRE(std::abs(oracle::dpd_equation(ps.z(), k, alpha, r.eta_hat)) <= 1e-9);
        REQUIRE(r.residual <= 1e-9);
        REQUIRE(r.effective_count == k);
      }
    }
  }
}

TEST_CASE("dpd equation is unbiased at the exponential model") {
  for (double eta : {0.25, 0.5, 1.0}) {
    for (double alpha : {0.0, 0.1, 0.5, 1.0}) {
      CAPTURE(eta);
      CAPTURE(alpha);
      // A one-excess ExcessData turns dpd_equation into psi(x, eta).
      auto psi = [&](double x) {
        ExcessData ed;
        ed.k = 1;
        ed.top_excesses = {x};
        ed.positive_count = 1;
        return dpd_equation(ed, alpha, eta) * std::exp(-x / eta) / eta;
      };
      CHECK(std::abs(oracle::simpson(psi, 0.0, 80.0 * eta, 200000)) < 1e-6);
    }
  }
}

TEST_CASE("erm weights") {
  SUBCASE("eta = 1 collapses the powers") {
    const auto w = erm_weights(1.0, 10, 0.5);
    for (std::size_t j = 1; j < 10; ++j) {
      const double u = j / 11.0;
      CHECK(w.jtilde[j - 1] == doctest::Approx((u - 1 - u * std::log(u)) * std::pow(1 - u, 0.5)));
    }
    CHECK(w.theta[4] == doctest::Approx(2.0));  // j = k/2
  }
  SUBCASE("hand-evaluated point") {
    const auto w = erm_weights(0.5, 4, 0.0);
    REQUIRE(w.theta.size() == 3);
    CHECK(w.theta[0] == doctest::Approx(1.0));
    CHECK(w.jtilde[0] == doctest::Approx(-0.7716205868929678).epsilon(1e-12));
  }
  SUBCASE("matches the direct definition and the alpha factorization") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> unif(0.01, 0.99), eta_dist(0.05, 2.0),
        alpha_dist(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double u = unif(gen), eta = eta_dist(gen), alpha = alpha_dist(gen);
      const double direct = oracle::erm_jtilde(u, eta, alpha);
      REQUIRE(erm_jtilde(u, eta, alpha) == doctest::Approx(direct).epsilon(1e-9));
      const double factored =
          erm_jtilde(u, eta, 0.0) * std::pow(1.0 - std::pow(u, eta), alpha) * std::pow(eta, -alpha);
      REQUIRE(erm_jtilde(u, eta, alpha) == doctest::Approx(factored).epsilon(1e-12));
    }
  }
  SUBCASE("theta is positive") {
    for (double eta : {0.01, 0.5, 1.0, 3.0}) {
      const auto w = erm_weights(eta, 50, 0.3);
      CHECK(w.theta.size() == 49);
      CHECK(w.jtilde.size() == 49);
      CHECK(std::all_of(w.theta.begin(), w.theta.end(), [](double t) { return t > 0.0; }));
    }
  }
  CHECK_THROWS_AS(erm_weights(0.0, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(erm_weights(0.5, 2, 0.1), std::invalid_argument);
}

TEST_CASE("erm at alpha = 0 against direct maximum likelihood") {
  // The estimating equation weights each term by J~_0 at j/(k+1) while the
  // exact score uses j/k; the two roots agree closely but not exactly.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t k : {50u, 250u}) {
      const auto w = synthetic_erm(0.5, k, seed);
      const double ml = oracle::erm_maximum_likelihood(w.j, w.w, k);
      const auto r = erm_estimate(w, 0.0);
      CAPTURE(k);
      CHECK(std::abs(r.eta_hat - ml) < 0.02);
    }
  }
}

TEST_CASE("erm recovers eta under the exponential regression model") {
  double total = 0.0;
  const std::size_t reps = 200;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    total += erm_estimate(synthetic_erm(0.5, 250, 1000 + rep), 0.1).eta_hat;
  }
  CHECK(std::abs(total / reps - 0.5) < 0.05);
}

TEST_CASE("erm residual contract, re-evaluated independently") {
  int cases = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto m : {MarginalKind::Frechet, MarginalKind::Pareto}) {
      const auto ps = model_pseudo_sample(500 + seed, 1000, m);
      for (std::size_t k : {50u, 250u, 500u}) {
        const auto w = scaled_log_ratios(ps, k);
        for (double alpha : {0.0, 0.1, 0.5, 1.0}) {
          ++cases;
          try {
            const auto r = erm_estimate(w, alpha);
            REQUIRE(std::abs(oracle::erm_equation(w.j, w.w, k, alpha, r.eta_hat)) <= 1e-9);
            REQUIRE(r.effective_count == w.w.size());
          } catch (const SolverFailure& e) {
            // Strong downweighting at small k can leave the equation without a root.
            REQUIRE(alpha > 0.0);
            REQUIRE(e.scan().size() == 200);
            ++failures;
          }
        }
      }
    }
  }
  CHECK(failures * 20 < cases);
}

TEST_CASE("estimate dispatch and validation") {
  const auto ps = model_pseudo_sample(9);
  CHECK(estimate(ps, {EstimatorFamily::Hill, 0.7, 100, MarginalKind::Frechet}).eta_hat ==
        hill(ps, 100).eta_hat);
  CHECK(estimate(ps, {EstimatorFamily::DPD, 0.3, 100, MarginalKind::Frechet}).eta_hat > 0.0);
  CHECK(estimate(ps, {EstimatorFamily::ERM, 0.3, 100, MarginalKind::Frechet}).eta_hat > 0.0);
  CHECK_THROWS_AS(estimate(ps, {EstimatorFamily::DPD, 1.5, 100, MarginalKind::Frechet}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate(ps, {EstimatorFamily::ERM, 0.1, 2, MarginalKind::Frechet}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate(ps, {EstimatorFamily::Hill, 0.0, 1000, MarginalKind::Frechet}),
                  std::invalid_argument);
  CHECK(parse_estimator_family("erm") == EstimatorFamily::ERM);
  CHECK_THROWS_AS(parse_estimator_family("moment"), std::invalid_argument);
}

TEST_CASE("pipeline is invariant to increasing marginal transformations") {
  const auto s = sample(CopulaModel::clayton(1.0), 800, 21);
  BivariateSample mapped = s;
  for (auto& p : mapped.pairs) p = {-1.0 / std::log(p.x), std::log(p.y / (1.0 - p.y))};
  for (auto family : {EstimatorFamily::Hill, EstimatorFamily::DPD, EstimatorFamily::ERM}) {
    const EstimatorConfig config{family, 0.25, 200, MarginalKind::Pareto};
    CHECK(estimate(to_pseudo_sample(s, config.marginal), config).eta_hat ==
          estimate(to_pseudo_sample(mapped, config.marginal), config).eta_hat);
  }
}
