#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailrobust/copulas.hpp"
#include "tailrobust/transforms.hpp"

namespace tailrobust {

// Estimator/marginal combinations studied by the harness. Hill and DPD run
// on the Frechet pseudo-sample.
enum class StudyFamily { Hill, DPD, ErmFrechet, ErmPareto };

std::string_view to_string(StudyFamily family);
StudyFamily parse_study_family(std::string_view text);
MarginalKind marginal_of(StudyFamily family);

struct ExperimentSpec {
  std::string scenario;
  ContaminationSpec contamination;
  std::optional<double> true_eta;  // bias target; the base model's eta
  std::size_t n = 1000;
  std::size_t reps = 200;
  std::vector<std::size_t> k_grid;
  std::vector<double> alpha_grid;
  std::vector<StudyFamily> families;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CellKey {
  StudyFamily family;
  double alpha;
  std::size_t k;
  auto operator<=>(const CellKey&) const = default;
};

// eta-hat per cell; std::nullopt marks an estimation failure.
using ReplicationResult = std::map<CellKey, std::optional<double>>;

// Every (family, alpha, k) cell of the experiment, in report order.
std::vector<CellKey> cells(const ExperimentSpec& spec);

// One fresh sample from the stream derived from (seed, rep_index), shared by
// every cell of the replication.
ReplicationResult run_replication(const ExperimentSpec& spec, std::size_t rep_index);

// All replications, indexed by rep. Work is spread over `threads` workers;
// the result does not depend on the worker count.
std::vector<ReplicationResult> run_replications(const ExperimentSpec& spec,
                                                std::size_t threads = 1);

struct McRow {
  StudyFamily family;
  double alpha;
  std::size_t k;
  std::size_t n;
  std::size_t reps_used;
  std::size_t failures;
  double mean;  // mean eta-hat over successful reps
  double sd;
  std::optional<double> bias;  // mean(eta-hat) - eta
  std::optional<double> mse;   // mean((eta-hat - eta)^2)
  std::optional<double> bias_se;  // Monte Carlo standard errors
  std::optional<double> mse_se;
  bool unreliable;  // more than half of the reps failed
};

struct McReport {
  std::string scenario;
  std::vector<McRow> rows;

  const McRow& row(StudyFamily family, double alpha, std::size_t k) const;
};

// Aggregates replications in rep order with compensated summation.
McReport summarize(const ExperimentSpec& spec, const std::vector<ReplicationResult>& reps);

McReport run_experiment(const ExperimentSpec& spec, std::size_t threads = 1);

// CSV with header scenario,family,marginal,alpha,k,n,reps_used,failures,bias,mse.
// Unknown bias/mse are written as NA.
void write_report_csv(std::ostream& out, const McReport& report);

struct Scenario {
  std::string name;  // M1..M4, M1p..M4p
  double epsilon;
  ExperimentSpec spec;
};

// k grid {50, 150, 250, 500} scaled by n / 1000.
std::vector<std::size_t> default_k_grid(std::size_t n);
std::vector<double> default_alpha_grid();
std::vector<StudyFamily> all_study_families();

// The four pure models and the four contaminated ones at epsilon 5% and 15%.
std::vector<Scenario> builtin_scenarios();

// Spec for a named scenario with default grids. Pure models require
// epsilon = 0; contaminated ones accept any epsilon in [0, 1).
ExperimentSpec scenario_spec(std::string_view name, double epsilon,
                             ContaminationMode mode = ContaminationMode::Bernoulli);

}  // namespace tailrobust
