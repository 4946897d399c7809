#include "mmdp/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mmdp/bandit/bandit.hpp"
#include "mmdp/bench/compare.hpp"
#include "mmdp/bench/report.hpp"
#include "mmdp/core/domain_io.hpp"
#include "mmdp/core/errors.hpp"
#include "mmdp/core/parallel.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/eval/eval.hpp"
#include "mmdp/gradient/gradient.hpp"

namespace mmdp {
namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

class OutputError : public Error {
 public:
  using Error::Error;
};

struct Settings {
  unsigned threads = 1;

  std::string domain;
  int horizon = 50;
  std::uint64_t seed = 0;

  std::string algorithm;
  std::string init = "wsu";
  double tol = 1e-9;
  int max_iters = 100;
  std::optional<double> step;
  int iterations = 200;
  std::string trace_path;
  std::string policy_path;
  std::string output_path;

  std::vector<std::string> algorithms;
  int episodes = 10000;
  std::string format = "md";
  int mixts_runs = 20;
  int mixts_episodes = 100;
  double floor = 1e-6;
  std::string likelihood = "rewards";

  int states = 5;
  int actions = 3;
  int models = 4;
  int test_models = 0;
  double sparsity = 1.0;
  std::string policy_kind = "interior";
  double h = 1e-5;

  double lambda = 0.5;
  std::vector<int> horizons;
  std::string source = "markov-best";
  std::string out_dir;
};

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw OutputError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw OutputError("failed writing " + path);
}

LoadOptions load_options(std::ostream& err) {
  LoadOptions options;
  options.on_warning = [&err](const std::string& message) { err << "warning: " << message << '\n'; };
  return options;
}

Likelihood parse_likelihood(const std::string& name) {
  return name == "rewards+transitions" ? Likelihood::kRewardsAndTransitions : Likelihood::kRewards;
}

int cmd_validate(const Settings& cfg, std::ostream& out, std::ostream& err) {
  const DomainBundle bundle = read_domain(cfg.domain, cfg.horizon, load_options(err));
  const ValidationReport report = validate(bundle, 1e-9);
  if (report.ok()) {
    out << "ok: " << bundle.training.n_states() << " states, " << bundle.training.n_actions() << " actions, "
        << bundle.training.n_models() << " training models, " << bundle.test.n_models() << " test models\n";
    return exit_code::kOk;
  }
  out << report.to_string();
  return exit_code::kValidation;
}

FirstOrderConfig first_order_config(const Settings& cfg, FirstOrderVariant variant) {
  FirstOrderConfig config = FirstOrderConfig::defaults(variant);
  if (cfg.step) config.step_size = *cfg.step;
  config.iterations = cfg.iterations;
  config.seed = cfg.seed;
  return config;
}

CadpOptions cadp_options(const Settings& cfg) {
  CadpOptions options;
  options.init = cfg.init == "mvp" ? InitialPolicy::kMvp : cfg.init == "random" ? InitialPolicy::kRandom
                                                                                 : InitialPolicy::kWsu;
  options.seed = cfg.seed;
  options.tol = cfg.tol;
  options.max_iters = cfg.max_iters;
  return options;
}

int cmd_solve(const Settings& cfg, std::ostream& out, std::ostream& err) {
  const DomainBundle bundle = load_domain(cfg.domain, cfg.horizon, load_options(err));
  const Mmdp training = fold_discount(bundle.training);
  SolveReport report = [&] {
    if (cfg.algorithm == "mvp") return solve_mvp(training);
    if (cfg.algorithm == "wsu") return solve_wsu(training);
    if (cfg.algorithm == "cadp") return solve_cadp(training, cadp_options(cfg));
    if (cfg.algorithm == "mirror") return solve_first_order(training, first_order_config(cfg, FirstOrderVariant::kMirror));
    return solve_first_order(training, first_order_config(cfg, FirstOrderVariant::kProjected));
  }();
  nlohmann::json j = to_json(report);
  j["test_return"] = exact_return(fold_discount(bundle.test), report.policy);
  emit(cfg.output_path, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (!cfg.trace_path.empty()) emit(cfg.trace_path, out, [&](std::ostream& o) { write_trace_csv(o, report); });
  if (!cfg.policy_path.empty()) {
    emit(cfg.policy_path, out, [&](std::ostream& o) { write_policy_csv(o, report.policy); });
  }
  return exit_code::kOk;
}

int cmd_compare(const Settings& cfg, std::ostream& out, std::ostream& err) {
  const DomainBundle bundle = load_domain(cfg.domain, cfg.horizon, load_options(err));
  CompareOptions options;
  options.horizon = cfg.horizon;
  options.episodes = cfg.episodes;
  options.seed = cfg.seed;
  options.cadp = cadp_options(cfg);
  options.mirror = first_order_config(cfg, FirstOrderVariant::kMirror);
  options.gradient = first_order_config(cfg, FirstOrderVariant::kProjected);
  options.mixts_runs = cfg.mixts_runs;
  options.mixts_episodes = cfg.mixts_episodes;
  options.likelihood_floor = cfg.floor;
  options.likelihood = parse_likelihood(cfg.likelihood);
  ComparisonTable table = compare(bundle, cfg.algorithms.empty() ? known_algorithms() : cfg.algorithms, options);
  table.domain = fs::path(cfg.domain).lexically_normal().filename().string();
  if (table.domain.empty()) table.domain = fs::path(cfg.domain).lexically_normal().parent_path().filename().string();
  for (const ComparisonRow& row : table.rows) {
    if (!row.ok) err << "warning: " << row.algorithm << " failed: " << row.error << '\n';
  }
  const TableFormat format = parse_table_format(cfg.format);
  emit(cfg.output_path, out, [&](std::ostream& o) { write_table(o, table, format); });
  return exit_code::kOk;
}

int cmd_grad_check(const Settings& cfg, std::ostream& out, std::ostream& err) {
  const Mmdp mmdp = cfg.domain.empty()
                        ? random_instance(cfg.states, cfg.actions, cfg.models, cfg.horizon, cfg.seed, cfg.sparsity)
                        : fold_discount(load_domain(cfg.domain, cfg.horizon, load_options(err)).training);
  const Policy policy =
      cfg.policy_kind == "uniform"
          ? Policy::uniform(mmdp.horizon(), mmdp.n_states(), mmdp.n_actions())
          : Policy::random_interior(mmdp.horizon(), mmdp.n_states(), mmdp.n_actions(), derive_seed(cfg.seed, 1));
  const GradCheckReport report = grad_check(mmdp, policy, cfg.h);
  emit(cfg.output_path, out, [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
  return exit_code::kOk;
}

int cmd_regret(const Settings& cfg, std::ostream& out, std::ostream&) {
  std::vector<int> horizons = cfg.horizons;
  if (horizons.empty()) {
    for (int T = 4; T <= 40; T += 2) horizons.push_back(T);
  }
  const RegretReport report = counterexample_regret_scan(cfg.lambda, parse_regret_source(cfg.source), horizons);
  emit(cfg.output_path, out, [&](std::ostream& o) {
    if (cfg.format == "json") {
      o << to_json(report).dump(2) << '\n';
    } else {
      write_regret_csv(o, report);
    }
  });
  return exit_code::kOk;
}

int cmd_gen(const Settings& cfg, std::ostream& out, std::ostream&) {
  const int test_models = cfg.test_models > 0 ? cfg.test_models : cfg.models;
  DomainBundle bundle{random_instance(cfg.states, cfg.actions, cfg.models, cfg.horizon, cfg.seed, cfg.sparsity),
                      random_instance(cfg.states, cfg.actions, test_models, cfg.horizon, derive_seed(cfg.seed, 1),
                                      cfg.sparsity)};
  // Both files must share one initial distribution.
  bundle.test = bundle.test.with_initial_distribution(
      {bundle.training.initial_distribution().begin(), bundle.training.initial_distribution().end()});
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw OutputError("cannot create " + cfg.out_dir + ": " + ec.message());
  write_domain(cfg.out_dir, bundle);
  out << "wrote " << cfg.out_dir << '\n';
  return exit_code::kOk;
}

void add_domain(CLI::App* cmd, Settings& cfg, bool required = true) {
  auto* opt = cmd->add_option("--domain,domain", cfg.domain, "Domain directory (initial/parameters/training/test.csv)");
  if (required) opt->required();
}

void add_horizon(CLI::App* cmd, Settings& cfg) {
  cmd->add_option("--horizon,-T", cfg.horizon, "Planning horizon")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_cadp_flags(CLI::App* cmd, Settings& cfg) {
  cmd->add_option("--init", cfg.init, "CADP initial policy")
      ->check(CLI::IsMember({"wsu", "mvp", "random"}))
      ->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "CADP improvement tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "CADP iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--step", cfg.step, "First-order step size (default 0.1 mirror, 0.01 gradient)");
  cmd->add_option("--iterations", cfg.iterations, "First-order iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int map_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (dynamic_cast<const MissingFileError*>(&e) || dynamic_cast<const OutputError*>(&e)) return exit_code::kIo;
  if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const ProbabilityError*>(&e) ||
      dynamic_cast<const IndexError*>(&e) || dynamic_cast<const Intractable*>(&e) ||
      dynamic_cast<const DegeneratePosterior*>(&e)) {
    return exit_code::kValidation;
  }
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const StepSizeError*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e)) {
    return exit_code::kUsage;
  }
  return exit_code::kInternal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings cfg;
  CLI::App app{"Finite-horizon multi-model MDP solvers and benchmarks", "mmdp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", cfg.threads, "Worker thread cap (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* validate_cmd = app.add_subcommand("validate", "Check a domain directory");
  add_domain(validate_cmd, cfg);
  add_horizon(validate_cmd, cfg);

  auto* solve_cmd = app.add_subcommand("solve", "Solve the training models and print a JSON report");
  add_domain(solve_cmd, cfg);
  add_horizon(solve_cmd, cfg);
  solve_cmd->add_option("--algorithm,-a", cfg.algorithm, "Solver")
      ->required()
      ->check(CLI::IsMember({"mvp", "wsu", "cadp", "mirror", "gradient"}));
  solve_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  add_cadp_flags(solve_cmd, cfg);
  solve_cmd->add_option("--trace", cfg.trace_path, "Write iterate returns as CSV");
  solve_cmd->add_option("--policy-csv", cfg.policy_path, "Write the policy as CSV");
  solve_cmd->add_option("--output,-o", cfg.output_path, "Report path (default stdout)");

  auto* compare_cmd = app.add_subcommand("compare", "Compare algorithms on the test models");
  add_domain(compare_cmd, cfg);
  add_horizon(compare_cmd, cfg);
  compare_cmd->add_option("--algorithms", cfg.algorithms, "Rows to run (default all)")
      ->delimiter(',')
      ->check(CLI::IsMember(known_algorithms()));
  compare_cmd->add_option("--episodes", cfg.episodes, "Monte-Carlo episodes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  compare_cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "md", "json"}))
      ->capture_default_str();
  compare_cmd->add_option("--output,-o", cfg.output_path, "Table path (default stdout)");
  add_cadp_flags(compare_cmd, cfg);
  compare_cmd->add_option("--mixts-runs", cfg.mixts_runs, "MixTS independent runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_option("--mixts-episodes", cfg.mixts_episodes, "MixTS episodes per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_option("--floor", cfg.floor, "MixTS likelihood floor")
      ->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();
  compare_cmd->add_option("--likelihood", cfg.likelihood, "MixTS likelihood")
      ->check(CLI::IsMember({"rewards", "rewards+transitions"}))
      ->capture_default_str();

  auto* grad_cmd = app.add_subcommand("grad-check", "Compare the analytic gradient with finite differences");
  add_domain(grad_cmd, cfg, false);
  add_horizon(grad_cmd, cfg);
  grad_cmd->add_option("--states", cfg.states, "Random instance states")->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--actions", cfg.actions, "Random instance actions")->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--models", cfg.models, "Random instance models")->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--sparsity", cfg.sparsity, "Random instance sparsity")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  grad_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  grad_cmd->add_option("--policy", cfg.policy_kind, "Policy to check at")
      ->check(CLI::IsMember({"uniform", "interior"}))
      ->capture_default_str();
  grad_cmd->add_option("--fd-step", cfg.h, "Finite-difference step")->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--output,-o", cfg.output_path, "Report path (default stdout)");

  auto* regret_cmd = app.add_subcommand("regret-demo", "Regret of Markov policies on the two-model counterexample");
  regret_cmd->add_option("--lambda", cfg.lambda, "Weight of the first model")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  regret_cmd->add_option("--horizons", cfg.horizons, "Even horizons (default 4,6,...,40)")->delimiter(',');
  regret_cmd->add_option("--source", cfg.source, "Policy source")
      ->check(CLI::IsMember({"markov-best", "mvp", "wsu", "cadp"}))
      ->capture_default_str();
  regret_cmd->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  regret_cmd->add_option("--output,-o", cfg.output_path, "Report path (default stdout)");

  auto* gen_cmd = app.add_subcommand("gen", "Write a random domain directory");
  gen_cmd->add_option("--out", cfg.out_dir, "Output directory")->required();
  gen_cmd->add_option("--states", cfg.states, "States")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--actions", cfg.actions, "Actions")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--models", cfg.models, "Training models")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--test-models", cfg.test_models, "Test models (default: same as training)")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--sparsity", cfg.sparsity, "Expected fraction of reachable next states")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }
  if (regret_cmd->parsed() && cfg.format == "md") cfg.format = "csv";

  const unsigned previous_threads = thread_limit();
  set_thread_limit(cfg.threads);
  struct Restore {
    unsigned value;
    ~Restore() { set_thread_limit(value); }
  } restore{previous_threads};

  try {
    if (validate_cmd->parsed()) return cmd_validate(cfg, out, err);
    if (solve_cmd->parsed()) return cmd_solve(cfg, out, err);
    if (compare_cmd->parsed()) return cmd_compare(cfg, out, err);
    if (grad_cmd->parsed()) return cmd_grad_check(cfg, out, err);
    if (regret_cmd->parsed()) return cmd_regret(cfg, out, err);
    if (gen_cmd->parsed()) return cmd_gen(cfg, out, err);
  } catch (const std::exception& e) {
    return map_error(e, err);
  }
  err << "error: no subcommand\n";
  return exit_code::kUsage;
}

}  // namespace mmdp
