#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tailrobust/copulas.hpp"
#include "tailrobust/csv.hpp"
#include "tailrobust/errors.hpp"
#include "tailrobust/estimators.hpp"
#include "tailrobust/format.hpp"
#include "tailrobust/influence.hpp"
#include "tailrobust/mc_harness.hpp"
#include "tailrobust/transforms.hpp"

namespace tailrobust::cli {

namespace {

// A flag failed validation; the message already names it.
class FlagError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] void bad_flag(const std::string& flag, const std::string& message) {
  throw FlagError(flag + " " + message);
}

template <typename T>
T positive_count(const std::string& flag, long long value, long long minimum = 1) {
  if (value < minimum) {
    bad_flag(flag, "must be >= " + std::to_string(minimum) + ", got " + std::to_string(value));
  }
  return static_cast<T>(value);
}

void check_unit(const std::string& flag, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    bad_flag(flag, "must be in [0,1], got " + format_double(value));
  }
}

void check_epsilon(double value) {
  if (!(value >= 0.0 && value < 1.0)) {
    bad_flag("--epsilon", "must be in [0,1), got " + format_double(value));
  }
}

template <typename Fn>
auto flag_context(const std::string& flag, Fn&& fn) {
  try {
    return fn();
  } catch (const FlagError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FlagError(flag + ": " + e.what());
  }
}

void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) bad_flag("--out", "cannot open '" + path + "' for writing");
  write(file);
  if (!file) bad_flag("--out", "failed writing '" + path + "'");
}

CsvTable load_table(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) bad_flag("--in", "cannot open '" + path + "'");
  return flag_context("--in", [&] { return read_csv(file); });
}

// `--in` holds either raw pairs (x,y) or an already reduced pseudo-sample (z).
PseudoSample load_pseudo_sample(const std::string& path, MarginalKind marginal) {
  const auto table = load_table(path);
  return flag_context("--in", [&] {
    const int zi = table.column_index("z");
    if (zi >= 0 && table.column_index("x") < 0) {
      return PseudoSample(table.columns[static_cast<std::size_t>(zi)], marginal);
    }
    return to_pseudo_sample(sample_from_table(table), marginal);
  });
}

void check_k(std::size_t k, std::size_t k_min, std::size_t n) {
  if (k < k_min || k + 1 > n) {
    bad_flag("--k", "must be in [" + std::to_string(k_min) + ", n-1] = [" +
                        std::to_string(k_min) + ", " + std::to_string(n - 1) + "] for n = " +
                        std::to_string(n) + ", got " + std::to_string(k));
  }
}

constexpr const char* kFooter =
    "Model spec grammar: normal:rho=<f> | gumbel:delta=<f> | clayton:delta=<f>\n"
    "  (rho in [-1,1]; delta > 0, gumbel sampling needs delta >= 1)\n"
    "Scenarios: M1 normal rho=0, M2 normal rho=0.75, M3 gumbel delta=1, M4 clayton delta=1;\n"
    "  M1p..M4p contaminate them with normal rho=0.75, normal rho=-0.9, gumbel delta=20,\n"
    "  clayton delta=200.\n"
    "Exit status: 0 success, 1 invalid flag or input, 2 estimating equation not solvable.";

struct SimulateArgs {
  std::string model;
  std::string contaminant;
  double epsilon = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
  bool fixed_count = false;
  std::string out;
};

struct TransformArgs {
  std::string in;
  std::string marginal = "frechet";
  long long k = 0;
  std::string emit = "z";
  std::string out;
};

struct EstimateArgs {
  std::string in;
  std::string family = "dpd";
  double alpha = 0.0;
  long long k = 0;
  std::string marginal = "frechet";
  bool json = false;
  std::string out;
};

struct InfluenceArgs {
  std::string family = "dpd";
  std::string mode = "single";
  double alpha = 0.0;
  double eta = 0.5;
  double b = 0.75;
  long long k = 50;
  long long j0 = 1;
  std::string grid;
  std::string out;
};

struct StudyArgs {
  std::string scenario;
  double epsilon = -1.0;
  long long n = 1000;
  long long reps = 200;
  std::vector<long long> k;
  std::vector<double> alpha;
  std::vector<std::string> families;
  std::uint64_t seed = 0;
  long long threads = 0;
  bool fixed_count = false;
  std::string out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto n = positive_count<std::size_t>("--n", a.n, 2);
  const auto model = flag_context("--model", [&] { return parse_model_spec(a.model); });
  check_epsilon(a.epsilon);
  if (a.epsilon > 0.0 && a.contaminant.empty()) {
    bad_flag("--epsilon", "> 0 requires --contaminant");
  }
  const auto contaminant =
      a.contaminant.empty()
          ? model
          : flag_context("--contaminant", [&] { return parse_model_spec(a.contaminant); });
  const ContaminationSpec spec(model, contaminant, a.epsilon,
                               a.fixed_count ? ContaminationMode::FixedCount
                                             : ContaminationMode::Bernoulli);
  const auto sample = flag_context("--model", [&] { return sample_contaminated(spec, n, a.seed); });
  emit(a.out, out, [&](std::ostream& os) { write_sample_csv(os, sample); });
  return kExitOk;
}

int do_transform(const TransformArgs& a, std::ostream& out) {
  const auto marginal = flag_context("--marginal", [&] { return parse_marginal(a.marginal); });
  if (a.emit != "z" && a.emit != "ztilde" && a.emit != "w") {
    bad_flag("--emit", "must be z, ztilde or w, got '" + a.emit + "'");
  }
  const auto ps = load_pseudo_sample(a.in, marginal);
  if (a.emit == "z") {
    emit(a.out, out, [&](std::ostream& os) { write_column_csv(os, "z", ps.z()); });
    return kExitOk;
  }
  const auto k = positive_count<std::size_t>("--k", a.k, a.emit == "w" ? 3 : 1);
  check_k(k, a.emit == "w" ? 3 : 1, ps.size());
  if (a.emit == "ztilde") {
    const auto ed = log_relative_excesses(ps, k);
    emit(a.out, out, [&](std::ostream& os) { write_column_csv(os, "ztilde", ed.z_tilde); });
  } else {
    const auto w = scaled_log_ratios(ps, k);
    emit(a.out, out, [&](std::ostream& os) { write_column_csv(os, "w", w.w); });
  }
  return kExitOk;
}

int do_estimate(const EstimateArgs& a, std::ostream& out) {
  EstimatorConfig config;
  config.family = flag_context("--family", [&] { return parse_estimator_family(a.family); });
  config.marginal = flag_context("--marginal", [&] { return parse_marginal(a.marginal); });
  check_unit("--alpha", a.alpha);
  config.alpha = a.alpha;
  const std::size_t k_min = config.family == EstimatorFamily::ERM ? 3 : 1;
  config.k = positive_count<std::size_t>("--k", a.k, static_cast<long long>(k_min));
  const auto ps = load_pseudo_sample(a.in, config.marginal);
  check_k(config.k, k_min, ps.size());

  const auto result = estimate(ps, config);
  emit(a.out, out, [&](std::ostream& os) {
    if (a.json) {
      nlohmann::ordered_json j;
      j["schema"] = 1;
      j["family"] = to_string(config.family);
      j["marginal"] = to_string(config.marginal);
      j["alpha"] = config.alpha;
      j["k"] = config.k;
      j["eta_hat"] = result.eta_hat;
      j["residual"] = result.residual;
      j["evaluations"] = result.evaluations;
      j["effective_count"] = result.effective_count;
      j["bracket"] = {result.bracket_lo, result.bracket_hi};
      j["flags"] = result.flag_names();
      os << j.dump(2) << '\n';
    } else {
      os << "eta_hat " << format_double(result.eta_hat) << '\n'
         << "residual " << format_double(result.residual) << '\n'
         << "effective_count " << result.effective_count << '\n';
      for (const auto& f : result.flag_names()) os << "flag " << f << '\n';
    }
  });
  return kExitOk;
}

int do_influence(const InfluenceArgs& a, std::ostream& out, const CLI::App& sub) {
  check_unit("--alpha", a.alpha);
  if (!(a.eta > 0.0)) bad_flag("--eta", "must be > 0, got " + format_double(a.eta));
  const auto grid = flag_context("--grid", [&] { return GridSpec::parse(a.grid); });
  InfluenceKind kind;
  InfluenceParams params;
  if (a.family == "dpd") {
    if (sub.count("--k") || sub.count("--j0")) bad_flag("--k", "applies to --family erm only");
    if (!(a.b > 0.0)) bad_flag("--b", "must be > 0, got " + format_double(a.b));
    kind = InfluenceKind::Dpd;
    params = IfDpdParams{a.alpha, a.eta, a.b};
  } else if (a.family == "erm") {
    if (sub.count("--b")) bad_flag("--b", "applies to --family dpd only");
    const auto k = positive_count<std::size_t>("--k", a.k, 3);
    const auto j0 = positive_count<std::size_t>("--j0", a.j0, 1);
    if (j0 > k - 1) {
      bad_flag("--j0", "must be in [1, k-1] = [1, " + std::to_string(k - 1) + "], got " +
                           std::to_string(j0));
    }
    if (a.mode != "single" && a.mode != "all") {
      bad_flag("--mode", "must be single or all, got '" + a.mode + "'");
    }
    kind = a.mode == "single" ? InfluenceKind::ErmSingle : InfluenceKind::ErmAllConstant;
    params = IfErmParams{a.alpha, a.eta, k, j0};
  } else {
    bad_flag("--family", "must be dpd or erm, got '" + a.family + "'");
  }
  const auto curve = influence_curve(kind, params, grid);
  emit(a.out, out, [&](std::ostream& os) {
    os << "t,if\n";
    for (const auto& p : curve) os << format_double(p.t) << ',' << format_double(p.value) << '\n';
  });
  return kExitOk;
}

int do_study(const StudyArgs& a, std::ostream& out, std::ostream& err, bool quiet) {
  const bool primed = a.scenario.size() == 3 && a.scenario.back() == 'p';
  const double epsilon = a.epsilon >= 0.0 ? a.epsilon : (primed ? 0.05 : 0.0);
  check_epsilon(epsilon);
  auto spec = flag_context("--scenario", [&] {
    return scenario_spec(a.scenario, epsilon,
                         a.fixed_count ? ContaminationMode::FixedCount
                                       : ContaminationMode::Bernoulli);
  });
  spec.n = positive_count<std::size_t>("--n", a.n, 4);
  spec.reps = positive_count<std::size_t>("--reps", a.reps, 1);
  spec.seed = a.seed;
  spec.k_grid = default_k_grid(spec.n);
  if (!a.k.empty()) {
    spec.k_grid.clear();
    for (long long k : a.k) spec.k_grid.push_back(positive_count<std::size_t>("--k", k, 1));
  }
  if (!a.alpha.empty()) {
    for (double alpha : a.alpha) check_unit("--alpha", alpha);
    spec.alpha_grid = a.alpha;
  }
  if (!a.families.empty()) {
    spec.families.clear();
    for (const auto& f : a.families) {
      spec.families.push_back(flag_context("--families", [&] { return parse_study_family(f); }));
    }
  }
  const bool erm = std::any_of(spec.families.begin(), spec.families.end(), [](StudyFamily f) {
    return f == StudyFamily::ErmFrechet || f == StudyFamily::ErmPareto;
  });
  for (std::size_t k : spec.k_grid) check_k(k, erm ? 3 : 1, spec.n);
  const std::size_t threads =
      a.threads > 0 ? static_cast<std::size_t>(a.threads)
                    : std::max(1u, std::thread::hardware_concurrency());
  if (a.threads < 0) bad_flag("--threads", "must be >= 0, got " + std::to_string(a.threads));

  const auto report = run_experiment(spec, threads);
  if (!quiet) {
    for (const auto& row : report.rows) {
      if (row.unreliable) {
        err << "warning: unreliable cell " << to_string(row.family) << " alpha="
            << format_double(row.alpha) << " k=" << row.k << " (" << row.failures << " of "
            << spec.reps << " reps failed)\n";
      }
    }
  }
  emit(a.out, out, [&](std::ostream& os) { write_report_csv(os, report); });
  return kExitOk;
}

void print_scan(std::ostream& err, const SolverFailure& e) {
  if (e.scan().empty()) return;
  err << "eta,equation\n";
  for (const auto& p : e.scan()) err << format_double(p.x) << ',' << format_double(p.f) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust estimation of the bivariate tail dependence coefficient", "tailrobust"};
  app.footer(kFooter);
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress warnings on standard error");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a seeded bivariate sample as x,y CSV");
  simulate->add_option("--model", sim.model, "Base model spec, e.g. normal:rho=0.75")->required();
  simulate->add_option("--contaminant", sim.contaminant, "Contaminating model spec");
  simulate->add_option("--epsilon", sim.epsilon, "Contamination fraction in [0,1)");
  simulate->add_flag("--fixed-count", sim.fixed_count,
                     "Contaminate exactly ceil(epsilon*n) observations");
  simulate->add_option("--n", sim.n, "Sample size (>= 2)")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output CSV path (default: stdout)");

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "Rank-standardize and emit Z, Z~ or W");
  transform->add_option("--in", tr.in, "Input CSV with columns x,y (or z)")->required();
  transform->add_option("--marginal", tr.marginal, "frechet or pareto");
  transform->add_option("--k", tr.k, "Threshold count (for ztilde and w)");
  transform->add_option("--emit", tr.emit, "z, ztilde or w");
  transform->add_option("--out", tr.out, "Output CSV path (default: stdout)");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate eta from a sample");
  estimate_cmd->add_option("--in", est.in, "Input CSV with columns x,y (or a z pseudo-sample)")
      ->required();
  estimate_cmd->add_option("--family", est.family, "hill, dpd or erm");
  estimate_cmd->add_option("--alpha", est.alpha, "DPD tuning parameter in [0,1]");
  estimate_cmd->add_option("--k", est.k, "Number of upper order statistics")->required();
  estimate_cmd->add_option("--marginal", est.marginal, "frechet or pareto");
  estimate_cmd->add_flag("--json", est.json, "Emit JSON (schema 1)");
  estimate_cmd->add_option("--out", est.out, "Output path (default: stdout)");

  InfluenceArgs inf;
  auto* influence = app.add_subcommand("influence", "Tabulate a model influence function as t,if");
  influence->add_option("--family", inf.family, "dpd or erm");
  influence->add_option("--mode", inf.mode, "erm only: single (W_j0) or all (every W_j at t)");
  influence->add_option("--alpha", inf.alpha, "Tuning parameter in [0,1]");
  influence->add_option("--eta", inf.eta, "Model eta (> 0)");
  influence->add_option("--b", inf.b, "dpd only: threshold quantile b(n/k), default 0.75");
  influence->add_option("--k", inf.k, "erm only: threshold count (>= 3)");
  influence->add_option("--j0", inf.j0, "erm only: contaminated index in [1, k-1]");
  influence->add_option("--grid", inf.grid, "Evaluation grid lo:hi:steps")->required();
  influence->add_option("--out", inf.out, "Output CSV path (default: stdout)");

  StudyArgs st;
  auto* study = app.add_subcommand("mc-study", "Monte Carlo bias/MSE study for a scenario");
  study->add_option("--scenario", st.scenario, "M1..M4 or M1p..M4p")->required();
  study->add_option("--epsilon", st.epsilon, "Contamination fraction (primed scenarios, default 0.05)");
  study->add_option("--n", st.n, "Sample size");
  study->add_option("--reps", st.reps, "Replications");
  study->add_option("--k", st.k, "Comma-separated k grid")->delimiter(',');
  study->add_option("--alpha", st.alpha, "Comma-separated alpha grid")->delimiter(',');
  study->add_option("--families", st.families, "Comma-separated: hill,dpd,erm-f,erm-p")
      ->delimiter(',');
  study->add_option("--seed", st.seed, "Random seed");
  study->add_option("--threads", st.threads, "Worker cap (0 = hardware concurrency)");
  study->add_flag("--fixed-count", st.fixed_count,
                  "Contaminate exactly ceil(epsilon*n) observations per replication");
  study->add_option("--out", st.out, "Output CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return do_simulate(sim, out);
    if (transform->parsed()) return do_transform(tr, out);
    if (estimate_cmd->parsed()) return do_estimate(est, out);
    if (influence->parsed()) return do_influence(inf, out, *influence);
    if (study->parsed()) return do_study(st, out, err, quiet);
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << '\n';
    print_scan(err, e);
    return kExitSolver;
  } catch (const EstimationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace tailrobust::cli
