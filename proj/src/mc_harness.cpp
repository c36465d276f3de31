#include "tailrobust/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tailrobust/errors.hpp"
#include "tailrobust/estimators.hpp"
#include "tailrobust/format.hpp"
#include "tailrobust/rng.hpp"

namespace tailrobust {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::optional<double> try_estimate(const PseudoSample& ps, const EstimatorConfig& config) {
  try {
    return estimate(ps, config).eta_hat;
  } catch (const EstimationError&) {
    return std::nullopt;
  }
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

Moments moments(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  m.mean = sum.value() / static_cast<double>(values.size());
  if (values.size() > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - m.mean) * (v - m.mean));
    m.sd = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
  }
  return m;
}

}  // namespace

std::string_view to_string(StudyFamily family) {
  switch (family) {
    case StudyFamily::Hill:
      return "hill";
    case StudyFamily::DPD:
      return "dpd";
    case StudyFamily::ErmFrechet:
      return "erm-f";
    case StudyFamily::ErmPareto:
      return "erm-p";
  }
  return {};
}

StudyFamily parse_study_family(std::string_view text) {
  if (text == "hill") return StudyFamily::Hill;
  if (text == "dpd") return StudyFamily::DPD;
  if (text == "erm-f") return StudyFamily::ErmFrechet;
  if (text == "erm-p") return StudyFamily::ErmPareto;
  throw std::invalid_argument("unknown study family '" + std::string(text) +
                              "', expected hill, dpd, erm-f or erm-p");
}

MarginalKind marginal_of(StudyFamily family) {
  return family == StudyFamily::ErmPareto ? MarginalKind::Pareto : MarginalKind::Frechet;
}

void ExperimentSpec::validate() const {
  if (n < 4) throw std::invalid_argument("n must be >= 4, got " + std::to_string(n));
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (k_grid.empty() || alpha_grid.empty() || families.empty()) {
    throw std::invalid_argument("k, alpha and family grids must be nonempty");
  }
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("alpha must be in [0, 1], got " + format_double(a));
    }
  }
  const bool erm = std::any_of(families.begin(), families.end(), [](StudyFamily f) {
    return f == StudyFamily::ErmFrechet || f == StudyFamily::ErmPareto;
  });
  for (std::size_t k : k_grid) {
    const std::size_t k_min = erm ? 3 : 1;
    if (k < k_min || k > n - 1) {
      throw std::invalid_argument("k must be in [" + std::to_string(k_min) + ", n-1] for n = " +
                                  std::to_string(n) + ", got " + std::to_string(k));
    }
  }
}

std::vector<CellKey> cells(const ExperimentSpec& spec) {
  std::vector<CellKey> out;
  for (StudyFamily family : spec.families) {
    for (double alpha : spec.alpha_grid) {
      for (std::size_t k : spec.k_grid) out.push_back({family, alpha, k});
    }
  }
  return out;
}

ReplicationResult run_replication(const ExperimentSpec& spec, std::size_t rep_index) {
  const auto data = sample_contaminated(spec.contamination, spec.n,
                                        derive_seed(spec.seed, rep_index));
  std::optional<PseudoSample> frechet;
  std::optional<PseudoSample> pareto;
  auto pseudo = [&](MarginalKind m) -> const PseudoSample& {
    auto& slot = m == MarginalKind::Frechet ? frechet : pareto;
    if (!slot) slot.emplace(to_pseudo_sample(data, m));
    return *slot;
  };

  ReplicationResult out;
  std::map<std::size_t, std::optional<double>> hill_by_k;
  for (const CellKey& cell : cells(spec)) {
    const PseudoSample& ps = pseudo(marginal_of(cell.family));
    switch (cell.family) {
      case StudyFamily::Hill: {
        auto it = hill_by_k.find(cell.k);
        if (it == hill_by_k.end()) {
          it = hill_by_k.emplace(cell.k, try_estimate(ps, {EstimatorFamily::Hill, 0.0, cell.k,
                                                           MarginalKind::Frechet}))
                   .first;
        }
        out[cell] = it->second;
        break;
      }
      case StudyFamily::DPD:
        out[cell] = try_estimate(ps, {EstimatorFamily::DPD, cell.alpha, cell.k, ps.marginal()});
        break;
      case StudyFamily::ErmFrechet:
      case StudyFamily::ErmPareto:
        out[cell] = try_estimate(ps, {EstimatorFamily::ERM, cell.alpha, cell.k, ps.marginal()});
        break;
    }
  }
  return out;
}

std::vector<ReplicationResult> run_replications(const ExperimentSpec& spec, std::size_t threads) {
  spec.validate();
  std::vector<ReplicationResult> results(spec.reps);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, spec.reps));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t rep = next++; rep < spec.reps; rep = next++) {
      try {
        results[rep] = run_replication(spec, rep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = spec.reps;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

const McRow& McReport::row(StudyFamily family, double alpha, std::size_t k) const {
  for (const auto& r : rows) {
    if (r.family == family && r.alpha == alpha && r.k == k) return r;
  }
  throw std::out_of_range("no report row for " + std::string(to_string(family)) +
                          " alpha=" + format_double(alpha) + " k=" + std::to_string(k));
}

McReport summarize(const ExperimentSpec& spec, const std::vector<ReplicationResult>& reps) {
  McReport report;
  report.scenario = spec.scenario;
  for (const CellKey& cell : cells(spec)) {
    std::vector<double> values;
    values.reserve(reps.size());
    for (const auto& rep : reps) {
      const auto& v = rep.at(cell);
      if (v) values.push_back(*v);
    }
    McRow row{};
    row.family = cell.family;
    row.alpha = cell.alpha;
    row.k = cell.k;
    row.n = spec.n;
    row.reps_used = values.size();
    row.failures = reps.size() - values.size();
    row.unreliable = 2 * row.failures > reps.size();
    const auto m = moments(values);
    row.mean = m.mean;
    row.sd = m.sd;
    if (spec.true_eta && !values.empty()) {
      const double eta = *spec.true_eta;
      std::vector<double> sq;
      sq.reserve(values.size());
      for (double v : values) sq.push_back((v - eta) * (v - eta));
      const auto e = moments(sq);
      const double root_n = std::sqrt(static_cast<double>(values.size()));
      row.bias = m.mean - eta;
      row.mse = e.mean;
      row.bias_se = m.sd / root_n;
      row.mse_se = e.sd / root_n;
    }
    report.rows.push_back(row);
  }
  return report;
}

McReport run_experiment(const ExperimentSpec& spec, std::size_t threads) {
  return summarize(spec, run_replications(spec, threads));
}

void write_report_csv(std::ostream& out, const McReport& report) {
  out << "scenario,family,marginal,alpha,k,n,reps_used,failures,bias,mse\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  for (const auto& r : report.rows) {
    out << report.scenario << ',' << to_string(r.family) << ',' << to_string(marginal_of(r.family))
        << ',' << format_double(r.alpha) << ',' << r.k << ',' << r.n << ',' << r.reps_used << ','
        << r.failures << ',' << opt(r.bias) << ',' << opt(r.mse) << '\n';
  }
}

std::vector<std::size_t> default_k_grid(std::size_t n) {
  std::vector<std::size_t> grid;
  for (std::size_t base : {50, 150, 250, 500}) {
    auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(base) * static_cast<double>(n) / 1000.0));
    k = std::clamp<std::size_t>(k, 3, n - 1);
    if (grid.empty() || grid.back() != k) grid.push_back(k);
  }
  return grid;
}

std::vector<double> default_alpha_grid() { return {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}; }

std::vector<StudyFamily> all_study_families() {
  return {StudyFamily::Hill, StudyFamily::DPD, StudyFamily::ErmFrechet, StudyFamily::ErmPareto};
}

namespace {

struct CatalogEntry {
  std::string_view name;
  CopulaModel base;
  CopulaModel contaminant;
  bool contaminated;
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"M1", CopulaModel::normal(0.0), CopulaModel::normal(0.0), false},
      {"M2", CopulaModel::normal(0.75), CopulaModel::normal(0.75), false},
      {"M3", CopulaModel::gumbel(1.0), CopulaModel::gumbel(1.0), false},
      {"M4", CopulaModel::clayton(1.0), CopulaModel::clayton(1.0), false},
      {"M1p", CopulaModel::normal(0.0), CopulaModel::normal(0.75), true},
      {"M2p", CopulaModel::normal(0.75), CopulaModel::normal(-0.9), true},
      {"M3p", CopulaModel::gumbel(1.0), CopulaModel::gumbel(20.0), true},
      {"M4p", CopulaModel::clayton(1.0), CopulaModel::clayton(200.0), true},
  };
  return entries;
}

}  // namespace

ExperimentSpec scenario_spec(std::string_view name, double epsilon, ContaminationMode mode) {
  for (const auto& entry : catalog()) {
    if (entry.name != name) continue;
    if (!entry.contaminated && epsilon != 0.0) {
      throw std::invalid_argument("scenario " + std::string(name) +
                                  " is uncontaminated; epsilon must be 0");
    }
    return ExperimentSpec{
        .scenario = std::string(name),
        .contamination = ContaminationSpec(entry.base, entry.contaminant, epsilon, mode),
        .true_eta = true_eta(entry.base),
        .n = 1000,
        .reps = 200,
        .k_grid = default_k_grid(1000),
        .alpha_grid = default_alpha_grid(),
        .families = all_study_families(),
        .seed = 0,
    };
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "', expected M1..M4 or M1p..M4p");
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& entry : catalog()) {
    if (!entry.contaminated) {
      out.push_back({std::string(entry.name), 0.0, scenario_spec(entry.name, 0.0)});
    }
  }
  for (const auto& entry : catalog()) {
    if (!entry.contaminated) continue;
    for (double eps : {0.05, 0.15}) {
      out.push_back({std::string(entry.name), eps, scenario_spec(entry.name, eps)});
    }
  }
  return out;
}

}  // namespace tailrobust
