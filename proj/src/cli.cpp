#include "clickstat/cli.hpp"

#include "clickstat/click_kernel.hpp"
#include "clickstat/errors.hpp"
#include "clickstat/estimators.hpp"
#include "clickstat/io.hpp"
#include "clickstat/simulator.hpp"
#include "clickstat/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace clickstat {
namespace {

struct Options {
  std::string state;
  int detectors = 0;
  double eta = 1.0;
  double nu = 0.0;
  ClickMethod method = ClickMethod::Auto;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t bootstrap = kDefaultBootstrapReplicates;
  double level = kDefaultConfidenceLevel;
  std::string statistic = "both";
  std::string sweep_axis;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::string in;
  std::string out;
  OutputFormat format = OutputFormat::Table;
};

StateSpec load_state(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return parse_state_spec(arg);
  std::ifstream file(arg);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot read state file '" + arg + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_state_spec(text.str());
}

DetectorConfig config_from(const Options& o) {
  DetectorConfig config{o.detectors, o.eta, o.nu};
  config.validate();
  return config;
}

// Writes through `emit` to --out when given, else to `out`.
void emit_to(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& emit) {
  if (o.out.empty()) {
    emit(out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + o.out + "'");
  emit(file);
  if (!file) throw Error(ErrorCode::InvalidArgument, "failed writing '" + o.out + "'");
}

void add_state_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--state", o.state, "State spec: inline structured text or a file path")->required();
  cmd->add_option("--detectors", o.detectors, "Number of on-off detectors N")->required();
  cmd->add_option("--eta", o.eta, "Quantum efficiency")->capture_default_str();
  cmd->add_option("--nu", o.nu, "Dark-count parameter")->capture_default_str();
}

void add_method_option(CLI::App* cmd, Options& o) {
  const std::map<std::string, ClickMethod> methods{
      {"gf", ClickMethod::GeneratingFunction}, {"dp", ClickMethod::OccupancyDp}, {"auto", ClickMethod::Auto}};
  cmd->add_option("--method", o.method, "Evaluation path: gf, dp or auto")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->default_str("auto");
}

void add_output_options(CLI::App* cmd, Options& o, bool with_format) {
  cmd->add_option("--out", o.out, "Output path (default stdout)");
  if (with_format) {
    const std::map<std::string, OutputFormat> formats{{"table", OutputFormat::Table},
                                                      {"structured", OutputFormat::Structured}};
    cmd->add_option("--format", o.format, "table or structured")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->default_str("table");
  }
}

void add_workers_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--workers", o.workers, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
}

void run_analyze(const Options& o, const CLI::App& cmd, std::ostream& out) {
  std::ifstream file(o.in);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot read sample file '" + o.in + "'");
  auto samples = read_sample_file(file);
  if (cmd.count("--detectors") > 0) samples.detectors = o.detectors;

  const bool seeded = cmd.count("--seed") > 0;
  if (cmd.count("--bootstrap") > 0 && o.bootstrap > 0 && !seeded)
    throw Error(ErrorCode::InvalidArgument, "--bootstrap requires an explicit --seed");
  BootstrapOptions bootstrap;
  bootstrap.replicates = seeded ? o.bootstrap : 0;
  bootstrap.level = o.level;
  bootstrap.seed = o.seed;
  bootstrap.workers = o.workers;

  const bool want_qb = o.statistic != "q_m";
  const bool want_qm = o.statistic != "q_b";
  if (want_qb && samples.detectors < 1 && samples.clicks.size() >= 2)
    throw Error(ErrorCode::InvalidArgument, "sample file does not declare N; pass --detectors");

  std::vector<EstimateReport> reports;
  if (want_qb) reports.push_back(qb_estimate(samples, bootstrap));
  if (want_qm) reports.push_back(mandel_q_estimate(samples.clicks, bootstrap));
  emit_to(o, out, [&](std::ostream& os) { write_estimates(os, reports, o.format); });
}

void run_sweep(const Options& o, std::ostream& out) {
  const auto axis = parse_sweep_axis(o.sweep_axis);
  if (!axis) throw Error(ErrorCode::InvalidArgument, "unknown sweep axis '" + o.sweep_axis + "'");
  const auto state = load_state(o.state);
  DetectorConfig base{o.detectors, o.eta, o.nu};
  if (*axis == SweepAxis::Detectors && o.detectors == 0) base.detectors = 1;
  SweepTable table{*axis, {}};
  table.rows = sweep(state, base, *axis, sweep_grid(*axis, o.from, o.to, o.steps), o.method, o.workers);
  emit_to(o, out, [&](std::ostream& os) { write_sweep(os, table, o.format); });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and simulated click statistics of on-off detector arrays", "clickstat"};
  app.require_subcommand(1);
  Options o;

  auto* dist = app.add_subcommand("dist", "Exact click-count distribution (k, c_k)");
  add_state_options(dist, o);
  add_method_option(dist, o);
  add_output_options(dist, o, true);

  auto* qb = app.add_subcommand("qb", "Q_B, Q_M on clicks and photons, click moments");
  add_state_options(qb, o);
  add_method_option(qb, o);
  add_output_options(qb, o, true);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo click record");
  add_state_options(simulate_cmd, o);
  simulate_cmd->add_option("--trials", o.trials, "Number of trials")->required()->check(CLI::Range(std::uint64_t{1}, kMaxTrials));
  simulate_cmd->add_option("--seed", o.seed, "Random seed")->required();
  add_workers_option(simulate_cmd, o);
  add_output_options(simulate_cmd, o, false);

  auto* analyze = app.add_subcommand("analyze", "Estimate Q_B and Q_M from a sample record");
  analyze->add_option("--in", o.in, "Sample record file")->required();
  analyze->add_option("--detectors", o.detectors, "Override N declared by the file");
  analyze->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates (used when --seed is given)")
      ->capture_default_str();
  analyze->add_option("--level", o.level, "Confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  analyze->add_option("--seed", o.seed, "Bootstrap seed; enables the interval");
  analyze->add_option("--statistic", o.statistic, "q_b, q_m or both")
      ->check(CLI::IsMember({"q_b", "q_m", "both"}))
      ->capture_default_str();
  add_workers_option(analyze, o);
  add_output_options(analyze, o, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "Scan one parameter and tabulate Q_B, Q_M and click moments");
  sweep_cmd->add_option("--state", o.state, "State spec: inline structured text or a file path")->required();
  sweep_cmd->add_option("--detectors", o.detectors, "Number of on-off detectors N");
  sweep_cmd->add_option("--eta", o.eta, "Quantum efficiency")->capture_default_str();
  sweep_cmd->add_option("--nu", o.nu, "Dark-count parameter")->capture_default_str();
  add_method_option(sweep_cmd, o);
  sweep_cmd->add_option("--sweep-axis", o.sweep_axis, "eta, nu, N, mean_photons or r")->required();
  sweep_cmd->add_option("--from", o.from, "First grid value")->required();
  sweep_cmd->add_option("--to", o.to, "Last grid value")->required();
  sweep_cmd->add_option("--steps", o.steps, "Number of grid points")->required()->check(CLI::PositiveNumber);
  add_workers_option(sweep_cmd, o);
  add_output_options(sweep_cmd, o, true);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitSuccess : kExitUsageError;
  }

  try {
    if (dist->parsed()) {
      const auto d = click_distribution(load_state(o.state), config_from(o), o.method);
      emit_to(o, out, [&](std::ostream& os) { write_click_distribution(os, d, o.format); });
    } else if (qb->parsed()) {
      const auto report = nonclassicality_report(load_state(o.state), config_from(o), o.method);
      emit_to(o, out, [&](std::ostream& os) { write_nonclassicality_report(os, report, o.format); });
    } else if (simulate_cmd->parsed()) {
      const auto samples = simulate(load_state(o.state), config_from(o), o.trials, o.seed, o.workers);
      emit_to(o, out, [&](std::ostream& os) { write_sample_file(os, samples); });
    } else if (analyze->parsed()) {
      run_analyze(o, *analyze, out);
    } else if (sweep_cmd->parsed()) {
      run_sweep(o, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsageError : kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return kExitUsageError;
  }
  return kExitSuccess;
}

}  // namespace clickstat
