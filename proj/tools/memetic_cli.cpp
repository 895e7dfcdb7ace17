// memetic: run configurations, Price traces, derivative checks.
//
// Exit codes: 0 success, 1 a run failed or a check did not pass, 2 bad
// configuration or arguments.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "memetic/benchmarks.hpp"
#include "memetic/cli_io.hpp"
#include "memetic/hybrid.hpp"

namespace {

using namespace memetic;

struct BatchArgs {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::string> problem;
  std::optional<std::size_t> dimension;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t jobs = 0;
};

void add_batch_options(CLI::App* cmd, BatchArgs& a, bool with_mode) {
  cmd->add_option("--config,-c", a.config, "JSON run configuration")->check(CLI::ExistingFile);
  if (with_mode) cmd->add_option("--mode", a.mode, "hybrid, ec or sqp (overrides the config)");
  cmd->add_option("--problem", a.problem, "benchmark name (overrides the config)");
  cmd->add_option("--dim", a.dimension, "problem dimension (overrides the config)");
  cmd->add_option("--runs", a.runs, "independent runs per configuration");
  cmd->add_option("--seed", a.seed, "seed of run 0; run i uses seed + i");
  cmd->add_option("--out,-o", a.out, "output directory (default: output_dir from the config, else ./out)");
  cmd->add_option("--jobs,-j", a.jobs, "worker threads, 0 for all cores")->capture_default_str();
}

int run_batch(const BatchArgs& a, std::optional<io::RunMode> forced_mode) {
  std::vector<io::RunConfig> configs;
  try {
    configs = a.config.empty() ? io::parse_config(nlohmann::json::object()) : io::load_config(a.config);
    for (auto& c : configs) {
      if (a.mode) c.mode = io::parse_mode(*a.mode);
      if (forced_mode) c.mode = *forced_mode;
      if (a.problem) c.problem = *a.problem;
      if (a.dimension) c.dimension = *a.dimension;
      if (a.runs) c.runs = *a.runs;
      if (a.seed) c.seed = *a.seed;
      c.validate();
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::vector<io::BatchReport> reports;
  std::size_t failures = 0;
  for (const auto& c : configs) {
    io::BatchReport rep{c, io::execute_batch(c, a.jobs)};
    failures += rep.failures();
    reports.push_back(std::move(rep));
  }
  std::filesystem::path out = "out";
  if (a.out) {
    out = *a.out;
  } else if (!configs.front().output_dir.empty()) {
    out = configs.front().output_dir;
  }
  try {
    io::write_outputs(out, reports);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  io::write_summary(std::cout, reports);
  if (failures) {
    std::cerr << failures << " run(s) failed; see " << (out / "summary.txt")
              << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid evolutionary / Newton optimizer with Price-equation monitoring"};
  app.require_subcommand(1);

  BatchArgs run_args;
  auto* run = app.add_subcommand("run", "run a configuration (hybrid, ec or sqp)");
  add_batch_options(run, run_args, true);

  BatchArgs trace_args;
  auto* trace = app.add_subcommand("price-trace", "EC runs with per-generation Price terms");
  add_batch_options(trace, trace_args, false);

  std::string ad_problem = "ackley";
  std::size_t ad_dim = 2;
  std::size_t ad_samples = 100;
  std::uint64_t ad_seed = 1;
  bool ad_fault = false;
  auto* adc = app.add_subcommand("ad-check", "compare AD derivatives with finite differences");
  adc->add_option("--problem", ad_problem)->capture_default_str();
  adc->add_option("--dim", ad_dim)->capture_default_str();
  adc->add_option("--samples", ad_samples)->capture_default_str();
  adc->add_option("--seed", ad_seed)->capture_default_str();
  adc->add_flag("--inject-fault", ad_fault, "perturb the AD objective to exercise the check");

  auto* list = app.add_subcommand("bench-list", "list the benchmark registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return run_batch(run_args, std::nullopt);
  if (*trace) return run_batch(trace_args, io::RunMode::EC);
  if (*list) {
    io::write_benchmark_list(std::cout);
    return 0;
  }
  if (*adc) {
    std::optional<BenchmarkProblem> problem;
    try {
      if (ad_dim == 0) throw std::invalid_argument("--dim must be >= 1");
      problem.emplace(make_problem(ad_problem, ad_dim));
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
    try {
      const auto rep = io::ad_check(*problem, ad_samples, ad_seed, ad_fault);
      io::write_ad_report(std::cout, rep);
      return rep.passed() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
