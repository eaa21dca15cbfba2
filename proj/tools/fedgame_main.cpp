// fedgame: deposit-data performance estimation, negotiated data-quota
// policies and baseline comparisons for multi-platform VFL scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedgame/config.hpp"
#include "fedgame/pipeline.hpp"
#include "fedgame/report.hpp"
#include "fedgame/rng.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fedgame;

constexpr const char* kConfigSchema = R"(Scenario config keys (JSON):
  n_platforms            number of platforms (>= 2)
  budgets                array of per-platform budget totals in [0, 1]
                         (or objects {total, deposit_fraction, count_deposit})
  count_deposit          whether deposit data consumes budget (default true)
  game.gamma             output/input preference exponent (default 2.5)
  game.eta               negotiation learning rate (default 0.01)
  game.epsilon           division guard (default 1e-8)
  game.mu                convergence threshold (default 1e-4)
  game.max_rounds        negotiation round cap (default 10000)
  game.norm              convergence norm: "l2" | "linf"
  estimation.k           deposit experiments per platform (>= n_platforms)
  estimation.deposit_fraction  deposit size as a dataset fraction (default 0.05)
  estimation.sampling    "uniform_with_anchor" | "uniform"
  estimation.seed_stride experiment seed stride (default 1)
  oracle.kind            "synthetic" | "vfl_tabular"
  oracle.synthetic       intercepts[], weights[][], shape ("linear"|"concave"),
                         concave_alpha, noise_sigma
  oracle.vfl_tabular     source ("generated"|"csv"), generated{n_samples,
                         features_per_block, signal[][], data_seed},
                         csv{paths[], has_header, columns[{name,type,platform,
                         label,drop}]}, train_epochs, learning_rate,
                         test_split, metric ("accuracy"|"auc"),
                         mask_test_features
  seed                   64-bit master seed (all randomness derives from it)
)";

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;
  std::size_t jobs = 1;
  std::size_t reps = 5;
  bool summary_stdout = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_out = true) {
  cmd->add_option("-c,--config", opts.config_path, "Scenario config file")->required();
  auto* out = cmd->add_option("-o,--out", opts.output_dir, "Output directory for artifacts");
  if (needs_out) out->required();
  cmd->add_option("--seed", opts.seed_override, "Override the config master seed");
  cmd->add_option("-j,--jobs", opts.jobs, "Worker threads (default 1; output is identical)");
  cmd->add_flag("-v,--verbose", opts.verbose, "Progress messages on stderr");
}

ValidatedScenario load_scenario(const CommonOptions& opts) {
  ScenarioConfig config = load_scenario_file(opts.config_path);
  if (opts.seed_override) config.master_seed = *opts.seed_override;
  return validate_scenario(config);
}

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
}

void write_text_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write output file: " + path.string());
  out << contents;
}

void log(const CommonOptions& opts, const std::string& message) {
  if (opts.verbose) std::cerr << "fedgame: " << message << "\n";
}

InitMode parse_init(const std::string& init) {
  if (init == "uniform") return InitMode::uniform;
  if (init == "zero") return InitMode::zero;
  if (init == "random") return InitMode::seeded_random;
  throw ConfigError("--init must be uniform, zero or random");
}

int run_estimate(const CommonOptions& opts) {
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  auto oracle = make_oracle(scenario);
  std::uint64_t rep_seed = derive_seed(scenario.config.master_seed, "repetition", {0});
  auto estimation =
      run_estimation(scenario, *oracle, derive_seed(rep_seed, "estimation"), opts.jobs);
  std::ostringstream obs, coef;
  write_estimation_observations_csv(estimation, scenario.n(), scenario.config.estimation.k, obs);
  write_estimation_coefficients_csv(estimation, scenario.n(), coef);
  write_text_file(fs::path(opts.output_dir) / "observations.csv", obs.str());
  write_text_file(fs::path(opts.output_dir) / "coefficients.csv", coef.str());
  log(opts, "estimation finished for " + std::to_string(scenario.n()) + " platforms");
  return 0;
}

int run_negotiate(const CommonOptions& opts, const std::string& init) {
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  auto oracle = make_oracle(scenario);
  std::uint64_t rep_seed = derive_seed(scenario.config.master_seed, "repetition", {0});
  auto estimation =
      run_estimation(scenario, *oracle, derive_seed(rep_seed, "estimation"), opts.jobs);
  auto start = init_policies(scenario, parse_init(init),
                             derive_seed(rep_seed, "negotiation-init"));
  auto outcome = run_negotiation(scenario, estimation.models, start);
  auto audit = visibility_audit(outcome.transcript);

  std::ostringstream policy_csv, transcript;
  write_quota_matrix_csv(outcome.final_policies, policy_csv);
  write_transcript(outcome.transcript, transcript);
  write_text_file(fs::path(opts.output_dir) / "policies_fedgame.csv", policy_csv.str());
  write_text_file(fs::path(opts.output_dir) / "transcript.txt", transcript.str());

  std::ostringstream summary;
  summary << "{\n  \"rounds_used\": " << outcome.rounds_used
          << ",\n  \"converged\": " << (outcome.converged ? "true" : "false")
          << ",\n  \"reads_checked\": " << audit.reads_checked
          << ",\n  \"visibility_violations\": " << audit.violations.size() << "\n}\n";
  write_text_file(fs::path(opts.output_dir) / "negotiation.json", summary.str());

  if (!outcome.converged) {
    std::cerr << "fedgame: warning: negotiation hit the round cap ("
              << scenario.config.game.max_rounds << ") without converging\n";
  }
  log(opts, "negotiation used " + std::to_string(outcome.rounds_used) + " rounds");
  return 0;
}

int run_baseline(const CommonOptions& opts) {
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  auto oracle = make_oracle(scenario);
  std::uint64_t rep_seed = derive_seed(scenario.config.master_seed, "repetition", {0});
  auto estimation =
      run_estimation(scenario, *oracle, derive_seed(rep_seed, "estimation"), opts.jobs);

  std::vector<ShapleyVector> shapley_vectors;
  std::uint64_t shapley_seed = derive_seed(rep_seed, "shapley");
  for (std::size_t i = 0; i < scenario.n(); ++i) {
    shapley_vectors.push_back(compute_shapley(
        i, *oracle, scenario.config.estimation.deposit_fraction, shapley_seed, opts.jobs));
  }

  std::vector<std::pair<std::string, QuotaMatrix>> matrices;
  matrices.emplace_back("local_only", local_only_policy(scenario));
  matrices.emplace_back("uniform", uniform_policy(scenario));
  matrices.emplace_back("greedy", greedy_policy(scenario, estimation.models));
  matrices.emplace_back("shapley", shapley_policy(scenario, shapley_vectors));
  for (const auto& [name, matrix] : matrices) {
    std::ostringstream csv;
    write_quota_matrix_csv(matrix, csv);
    write_text_file(fs::path(opts.output_dir) / ("policies_" + name + ".csv"), csv.str());
  }
  log(opts, "baseline policies written");
  return 0;
}

int run_evaluate(const CommonOptions& opts, const std::string& matrix_path) {
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  std::ifstream in(matrix_path);
  if (!in) throw ConfigError("cannot read policy matrix: " + matrix_path);
  QuotaMatrix matrix = read_quota_matrix_csv(in);
  auto oracle = make_oracle(scenario);
  std::uint64_t rep_seed = derive_seed(scenario.config.master_seed, "repetition", {0});
  std::string name = fs::path(matrix_path).stem().string();
  auto eval = evaluate_policy(scenario, *oracle, matrix, derive_seed(rep_seed, "evaluation"),
                              name, nullptr, opts.jobs);
  std::ostringstream csv;
  write_single_evaluation_csv(eval, csv);
  write_text_file(fs::path(opts.output_dir) / "evaluation.csv", csv.str());
  if (opts.summary_stdout) std::cout << csv.str();
  return 0;
}

int run_full(const CommonOptions& opts, const std::string& init) {
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  auto report = run_full_experiment(scenario, opts.reps, opts.jobs, parse_init(init));
  write_report_files(report, opts.output_dir);
  if (!report.all_converged) {
    std::cerr << "fedgame: warning: at least one repetition did not converge\n";
  }
  if (opts.summary_stdout) {
    std::ostringstream csv;
    write_evaluation_csv(report, csv);
    std::cout << csv.str();
  }
  log(opts, "report written to " + opts.output_dir);
  return 0;
}

int run_sweep(const CommonOptions& opts, const std::string& param,
              const std::vector<double>& values, const std::string& init) {
  SweepParameter parameter;
  if (param == "gamma") {
    parameter = SweepParameter::gamma;
  } else if (param == "deposit_fraction" || param == "deposit") {
    parameter = SweepParameter::deposit_fraction;
  } else {
    throw ConfigError("--param must be gamma or deposit_fraction");
  }
  if (values.empty()) throw ConfigError("--values must list at least one value");
  auto scenario = load_scenario(opts);
  ensure_output_dir(opts.output_dir);
  auto points = sweep(scenario, parameter, values, opts.reps, opts.jobs, parse_init(init));
  write_sweep_files(points, parameter, opts.output_dir);
  if (opts.summary_stdout) {
    std::ostringstream csv;
    write_sweep_csv(points, parameter, csv);
    std::cout << csv.str();
  }
  return 0;
}

int run_audit(const std::string& transcript_path) {
  std::ifstream in(transcript_path);
  if (!in) throw ConfigError("cannot read transcript: " + transcript_path);
  TranscriptFile transcript = read_transcript(in);
  auto report = visibility_audit(transcript);
  std::cerr << "fedgame: audit checked " << report.reads_checked << " reads, "
            << report.violations.size() << " violation(s)\n";
  for (std::size_t i = 0; i < report.violations.size() && i < 10; ++i) {
    const auto& v = report.violations[i];
    std::cerr << "  round " << v.round << ": platform " << v.reader << " read offer " << v.from
              << " -> " << v.to << "\n";
  }
  return report.violations.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FedGame: multi-platform VFL collaboration game simulator"};
  app.require_subcommand(1);
  app.footer(kConfigSchema);

  CommonOptions opts;
  std::string init = "uniform";
  std::string matrix_path;
  std::string transcript_path;
  std::string sweep_param;
  std::vector<double> sweep_values;

  auto* estimate = app.add_subcommand("estimate", "Deposit experiments and regression fit");
  add_common(estimate, opts);

  auto* negotiate = app.add_subcommand("negotiate", "Estimation plus negotiated policies");
  add_common(negotiate, opts);
  negotiate->add_option("--init", init, "Initial policies: uniform|zero|random");

  auto* baseline = app.add_subcommand("baseline", "Baseline policy matrices");
  add_common(baseline, opts);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a policy matrix via the oracle");
  add_common(evaluate, opts);
  evaluate->add_option("--matrix", matrix_path, "N x N policy CSV")->required();
  evaluate->add_flag("--summary-stdout", opts.summary_stdout, "Print the evaluation CSV");

  auto* run = app.add_subcommand("run", "Full experiment: estimation, all policies, evaluation");
  add_common(run, opts);
  run->add_option("--reps", opts.reps, "Repetitions (default 5)");
  run->add_option("--init", init, "Initial policies: uniform|zero|random");
  run->add_flag("--summary-stdout", opts.summary_stdout, "Print the evaluation CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat the full experiment over a parameter");
  add_common(sweep_cmd, opts);
  sweep_cmd->add_option("--param", sweep_param, "gamma | deposit_fraction")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--reps", opts.reps, "Repetitions per value (default 5)");
  sweep_cmd->add_option("--init", init, "Initial policies: uniform|zero|random");
  sweep_cmd->add_flag("--summary-stdout", opts.summary_stdout, "Print the sweep CSV");

  auto* audit = app.add_subcommand("audit", "Replay a transcript and check offer visibility");
  audit->add_option("--transcript", transcript_path, "transcript.txt from a negotiation run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (estimate->parsed()) return run_estimate(opts);
    if (negotiate->parsed()) return run_negotiate(opts, init);
    if (baseline->parsed()) return run_baseline(opts);
    if (evaluate->parsed()) return run_evaluate(opts, matrix_path);
    if (run->parsed()) return run_full(opts, init);
    if (sweep_cmd->parsed()) return run_sweep(opts, sweep_param, sweep_values, init);
    if (audit->parsed()) return run_audit(transcript_path);
  } catch (const ConfigError& err) {
    std::cerr << "fedgame: config error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "fedgame: error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
