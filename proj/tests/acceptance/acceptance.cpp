// Acceptance checks. `acceptance <n>` runs one criterion, no argument runs
// all of them. Each criterion prints one PASS or FAIL line; the exit status
// is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "tailrobust/estimators.hpp"
#include "tailrobust/influence.hpp"
#include "tailrobust/mc_harness.hpp"
#include "tailrobust/rng.hpp"

using namespace tailrobust;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// The scenario's own default seed, as used by `mc-study --scenario <name>`.
ExperimentSpec single_cell(std::string_view scenario, double epsilon, std::size_t k,
                           std::vector<double> alphas, std::vector<StudyFamily> families) {
  auto spec = scenario_spec(scenario, epsilon);
  spec.n = 1000;
  spec.reps = 200;
  spec.k_grid = {k};
  spec.alpha_grid = std::move(alphas);
  spec.families = std::move(families);
  return spec;
}

Verdict oracle_equivalence() {
  Stopwatch clock;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto ps =
        to_pseudo_sample(sample(CopulaModel::normal(0.0), 1000, derive_seed(kSeed, i)),
                         MarginalKind::Frechet);
    for (std::size_t k : {50u, 250u}) {
      const double d = dpd_estimate(log_relative_excesses(ps, k), 0.0).eta_hat;
      worst = std::max(worst, std::abs(d - oracle::hill(ps.z(), k)));
    }
  }
  const double t = clock.seconds();
  return {worst < 1e-6 && t < 10.0,
          fmt("max |dpd(alpha=0) - hill| = %.3g over 200 fits (< 1e-6), %.2f s (< 10 s)", worst, t)};
}

Verdict residual_contract() {
  std::size_t successes = 0, failures = 0, violations = 0;
  double worst = 0.0;
  for (const auto& scenario : builtin_scenarios()) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto data = sample_contaminated(scenario.spec.contamination, 1000,
                                            derive_seed(kSeed + 1, rep));
      for (auto marginal : {MarginalKind::Frechet, MarginalKind::Pareto}) {
        const auto ps = to_pseudo_sample(data, marginal);
        for (std::size_t k : default_k_grid(1000)) {
          for (double alpha : default_alpha_grid()) {
            for (auto family : {EstimatorFamily::DPD, EstimatorFamily::ERM}) {
              if (family == EstimatorFamily::DPD && marginal == MarginalKind::Pareto) continue;
              try {
                const auto r = estimate(ps, {family, alpha, k, marginal});
                double f;
                if (family == EstimatorFamily::DPD) {
                  f = oracle::dpd_equation(ps.z(), k, alpha, r.eta_hat);
                } else {
                  const auto w = scaled_log_ratios(ps, k);
                  f = oracle::erm_equation(w.j, w.w, k, alpha, r.eta_hat);
                }
                ++successes;
                worst = std::max(worst, std::abs(f));
                if (!(std::abs(f) <= 1e-9)) ++violations;
              } catch (const EstimationError&) {
                ++failures;
              }
            }
          }
        }
      }
    }
  }
  return {violations == 0 && successes > 0,
          fmt("%zu successful fits, %zu solver failures, max |equation(eta_hat)| = %.3g (<= 1e-9)",
              successes, failures, worst)};
}

Verdict pure_model_recovery() {
  Stopwatch clock;
  bool pass = true;
  std::string detail;
  for (auto [name, k] : {std::pair<const char*, std::size_t>{"M1", 250}, {"M2", 500},
                         {"M3", 250}, {"M4", 250}}) {
    const auto spec = single_cell(name, 0.0, k, {0.1}, {StudyFamily::ErmFrechet});
    const auto& row = run_experiment(spec, 0).rows.front();
    const bool ok = std::abs(*row.bias) < 0.05 && *row.mse < 0.01;
    pass = pass && ok;
    detail += fmt("%s k=%zu bias=%+.4f mse=%.4f; ", name, k, *row.bias, *row.mse);
  }
  const double t = clock.seconds();
  pass = pass && t < 300.0;
  return {pass, detail + fmt("|bias| < 0.05 and mse < 0.01, %.1f s (< 300 s)", t)};
}

Verdict robustness_ordering() {
  Stopwatch clock;
  const auto spec = single_cell("M1p", 0.15, 50, {0.0, 0.5}, {StudyFamily::DPD});
  const auto report = run_experiment(spec, 0);
  const auto& classical = report.row(StudyFamily::DPD, 0.0, 50);
  const auto& robust = report.row(StudyFamily::DPD, 0.5, 50);
  const double bias_gap = std::abs(*robust.bias) - std::abs(*classical.bias);
  const double mse_gap = *robust.mse - *classical.mse;
  const double t = clock.seconds();
  const bool pass = bias_gap <= 2 * *robust.bias_se && mse_gap <= 2 * *robust.mse_se &&
                    robust.failures == 0 && classical.failures == 0 && t < 180.0;
  return {pass, fmt("bias %+.4f (alpha=0.5) vs %+.4f (alpha=0), allowance %.4f; "
                    "mse %.5f vs %.5f, allowance %.5f; %.1f s (< 180 s)",
                    *robust.bias, *classical.bias, 2 * *robust.bias_se, *robust.mse,
                    *classical.mse, 2 * *robust.mse_se, t)};
}

std::function<double(double)> dpd_diagonal(double alpha) {
  return [alpha](double t) { return if_dpd(t, t, {alpha, 0.5, 0.75}); };
}

std::function<double(double)> erm_single(double alpha, std::size_t k = 50, std::size_t j0 = 1) {
  return [=](double t) { return if_erm_single(t, {alpha, 0.5, k, j0}); };
}

Verdict influence_dichotomy() {
  Stopwatch clock;
  bool finite = true, abs_monotone = true, signed_monotone = true;
  std::string abs_detail, signed_detail;
  double prev_dpd = INFINITY, prev_erm = INFINITY, prev_dpd_s = INFINITY, prev_erm_s = INFINITY;
  for (double alpha : {0.1, 0.5, 1.0}) {
    const auto d = oracle::grid_max(dpd_diagonal(alpha), -10.0, 10.0, 20000);
    const auto e = oracle::grid_max(erm_single(alpha), 0.0, 50.0, 20000);
    finite = finite && std::isfinite(d.sup_abs) && std::isfinite(e.sup_abs);
    abs_monotone = abs_monotone && d.sup_abs <= prev_dpd && e.sup_abs <= prev_erm;
    signed_monotone = signed_monotone && d.sup <= prev_dpd_s && e.sup <= prev_erm_s;
    prev_dpd = d.sup_abs;
    prev_erm = e.sup_abs;
    prev_dpd_s = d.sup;
    prev_erm_s = e.sup;
    abs_detail += fmt("a=%g dpd %.3f erm %.3f; ", alpha, d.sup_abs, e.sup_abs);
    signed_detail += fmt("a=%g dpd %.3f erm %.3f; ", alpha, d.sup, e.sup);
  }
  // Extended grid: contamination magnitudes up to e^20.
  const double dpd0 = oracle::grid_max(dpd_diagonal(0.0), -10.0, 20.0, 30000).sup_abs;
  const double erm0 = oracle::grid_max(
      [](double t) { return erm_single(0.0)(std::exp(t)); }, 0.0, 20.0, 20000).sup_abs;
  const bool unbounded = dpd0 > 1e3 && erm0 > 1e3;
  const double t = clock.seconds();
  std::cout << "  note: signed suprema " << signed_detail
            << (signed_monotone ? "nonincreasing" : "not monotone") << '\n';
  return {finite && abs_monotone && unbounded && t < 5.0,
          fmt("sup|IF| %s%s; alpha=0 extended sup|IF| dpd %.3g erm %.3g (> 1e3); %.2f s (< 5 s)",
              abs_detail.c_str(), abs_monotone ? "nonincreasing" : "NOT nonincreasing", dpd0,
              erm0, t)};
}

Verdict erm_k_j0_monotonicity() {
  bool pass = true;
  std::string detail;
  for (double alpha : {0.1, 0.5, 1.0}) {
    const double small = oracle::grid_max(erm_single(alpha, 50, 1), 0.0, 50.0, 20000).sup_abs;
    const double large = oracle::grid_max(erm_single(alpha, 100, 30), 0.0, 50.0, 20000).sup_abs;
    pass = pass && large < small;
    detail += fmt("; a=%g: %.4f -> %.4f", alpha, small, large);
  }
  return {pass, "sup|IF_erm| from (k=50, j0=1) to (k=100, j0=30)" + detail};
}

Verdict marginal_robustness() {
  const auto spec =
      single_cell("M1", 0.0, 250, {0.1}, {StudyFamily::ErmFrechet, StudyFamily::ErmPareto});
  std::vector<double> gaps;
  for (const auto& rep : run_replications(spec, 0)) {
    const auto f = rep.at({StudyFamily::ErmFrechet, 0.1, 250});
    const auto p = rep.at({StudyFamily::ErmPareto, 0.1, 250});
    if (f && p) gaps.push_back(std::abs(*f - *p));
  }
  const double m = gaps.empty() ? INFINITY : median(gaps);
  return {m < 0.05 && gaps.size() == spec.reps,
          fmt("median |eta_F - eta_P| = %.4f over %zu reps (< 0.05)", m, gaps.size())};
}

Verdict influence_linkage() {
  // Pseudo-sample with threshold 1 and log-relative excesses drawn from the
  // exponential model with mean 0.5; a further 1% of excesses sit at y.
  const std::size_t total = 100000, contaminated = 1000, clean = total - contaminated;
  const double epsilon = double(contaminated) / double(total);
  auto engine = make_engine(kSeed + 8);
  std::vector<double> z{1.0};
  for (std::size_t i = 0; i < clean; ++i) z.push_back(std::exp(0.5 * standard_exponential(engine)));
  const PseudoSample base(z, MarginalKind::Frechet);

  bool pass = true;
  std::string detail;
  for (double alpha : {0.0, 0.5}) {
    const double eta0 = dpd_estimate(log_relative_excesses(base, clean), alpha).eta_hat;
    for (double y : {1.0, 2.0}) {
      auto zc = z;
      zc.insert(zc.end(), contaminated, std::exp(y));
      const PseudoSample mixed(zc, MarginalKind::Frechet);
      const double eta1 = dpd_estimate(log_relative_excesses(mixed, total), alpha).eta_hat;
      const double shift = (eta1 - eta0) / epsilon;
      const double predicted = if_dpd(std::log(y), std::log(y) + 1.0, {alpha, eta0, 1.0});
      const double rel = std::abs(shift - predicted) / std::abs(predicted);
      pass = pass && rel < 0.25;
      detail += fmt("a=%g y=%g shift/eps %.4f IF %.4f rel %.3f; ", alpha, y, shift, predicted, rel);
    }
  }
  return {pass, detail + "relative error < 0.25"};
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "tailrobust_acceptance";
  std::filesystem::create_directories(dir);
  auto run_study = [&](const std::string& threads, const std::string& name) {
    const auto path = (dir / name).string();
    std::ostringstream out, err;
    const int code = cli::run({"mc-study", "--scenario", "M1p", "--epsilon", "0.15", "--reps",
                               "10", "--seed", "7", "--threads", threads, "--out", path},
                              out, err);
    std::ifstream in(path, std::ios::binary);
    std::string bytes{std::istreambuf_iterator<char>(in), {}};
    return code == cli::kExitOk ? bytes : std::string();
  };
  const auto a = run_study("1", "one.csv");
  const auto b = run_study("4", "four.csv");
  const auto c = run_study("1", "again.csv");
  const bool pass = !a.empty() && a == b && a == c;
  return {pass, fmt("mc-study CSV with 1, 4 and 1 workers: %s (%zu bytes)",
                    pass ? "byte-identical" : "differs", a.size())};
}

struct Criterion {
  const char* name;
  Verdict (*check)();
};

const Criterion kCriteria[] = {
    {"oracle equivalence", oracle_equivalence},
    {"residual contract", residual_contract},
    {"pure-model recovery", pure_model_recovery},
    {"robustness ordering under contamination", robustness_ordering},
    {"influence-function dichotomy", influence_dichotomy},
    {"ERM k/j0 monotonicity", erm_k_j0_monotonicity},
    {"marginal robustness", marginal_robustness},
    {"IF-estimator linkage", influence_linkage},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(std::size(kCriteria));
  std::vector<int> selected;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) {
      const int n = std::atoi(argv[i]);
      if (n < 1 || n > count) {
        std::cerr << "unknown criterion " << argv[i] << '\n';
        return 2;
      }
      selected.push_back(n);
    }
  } else {
    for (int n = 1; n <= count; ++n) selected.push_back(n);
  }

  bool all = true;
  for (int n : selected) {
    const auto& c = kCriteria[n - 1];
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << n << " (" << c.name
              << "): " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
