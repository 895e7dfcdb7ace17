#pragma once

// Batch runner behind the command-line tool: JSON run configurations,
// repeated seeded runs on a small worker pool, per-run trace CSVs, an
// aggregate CSV (mean and standard error across runs) and a text summary.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memetic/benchmarks.hpp"
#include "memetic/evolution.hpp"
#include "memetic/hybrid.hpp"
#include "memetic/local_search.hpp"

namespace memetic::io {

/// Malformed or inconsistent configuration. The CLI exits with code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Hybrid, EC, SQP };

std::string_view mode_name(RunMode m) noexcept;
RunMode parse_mode(std::string_view s);

struct RunConfig {
  std::string label;  // set per sweep entry
  std::string problem = "ackley";
  std::size_t dimension = 2;
  double precision = 0.01;
  RunMode mode = RunMode::Hybrid;
  GAConfig ga;
  SQPConfig sqp;
  SwitchCriteria switching;
  std::optional<SwitchCriteria> validation_switching;
  SeedVariant seed_variant = SeedVariant::Complement;
  std::size_t runs = 1;  // "repetitions" in the config file
  /// Run i uses seed + i for every random stream it owns ("base_seed").
  std::uint64_t seed = 1;
  std::string output_dir;  // empty: the caller decides
  /// SQP mode start; unset means uniform in the box.
  std::optional<std::vector<double>> start;
  /// Evaluation grid spacing of the hybrid aggregate.
  std::size_t checkpoint_interval = 100;

  void validate() const;
};

/// Parses one configuration object. A top-level "sweep" array expands into
/// one RunConfig per entry, each entry overriding the base fields (nested
/// objects are merged key by key). Throws ConfigError.
std::vector<RunConfig> parse_config(const nlohmann::json& doc);
std::vector<RunConfig> load_config(const std::filesystem::path& file);

/// Numeric table with an optional leading text column (the phase of hybrid
/// traces).
struct Table {
  std::string text_column;
  std::vector<std::string> columns;
  std::vector<std::string> text;
  std::vector<std::vector<double>> rows;
};

/// Values are written with 9 significant digits.
void write_csv(std::ostream& os, const Table& t);
void write_csv(const std::filesystem::path& file, const Table& t);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(R), 0 for fewer than two values or a non-finite mean
  std::size_t count = 0;
};

MeanSe mean_se(std::span<const double> values);

/// Best-so-far (native) once `evaluations` objective calls have been spent;
/// empty before the first trace row.
std::optional<double> best_at_budget(std::span<const TraceRow> trace, std::size_t evaluations);

struct RunOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double final_value = 0.0;  // native orientation
  std::size_t evaluations = 0;
  std::optional<std::size_t> switch_generation;
  std::string switch_reason;
  std::optional<std::size_t> converged_at;
  std::vector<std::string> warnings;
  Table trace;
  std::vector<TraceRow> hybrid_trace;  // hybrid mode only
};

/// One run of `cfg` with seed cfg.seed + index. Errors are captured in the
/// outcome rather than thrown.
RunOutcome execute_run(const RunConfig& cfg, std::size_t index);

/// All runs of `cfg` on `jobs` threads (0 means hardware concurrency).
std::vector<RunOutcome> execute_batch(const RunConfig& cfg, std::size_t jobs);

/// Per generation (EC), per iteration (SQP) or per evaluation checkpoint
/// (hybrid): mean and standard error across the successful runs.
Table aggregate(const RunConfig& cfg, std::span<const RunOutcome> runs);

struct BatchReport {
  RunConfig config;
  std::vector<RunOutcome> runs;

  std::size_t failures() const;
};

void write_summary(std::ostream& os, std::span<const BatchReport> reports);

/// Writes trace_<i>.csv and aggregate.csv per configuration (in a
/// subdirectory named by the label when there are several) and summary.txt.
void write_outputs(const std::filesystem::path& out, std::span<const BatchReport> reports);

// --- derivative check --------------------------------------------------

struct AdCheckPoint {
  std::vector<double> x;
  double value_error = 0.0;
  double gradient_error = 0.0;
  double hessian_error = 0.0;
};

struct AdCheckReport {
  std::string problem;
  std::size_t dimension = 0;
  std::vector<AdCheckPoint> points;
  double max_gradient_error = 0.0;
  double max_hessian_error = 0.0;
  double gradient_tolerance = 1e-6;
  double hessian_tolerance = 1e-4;

  bool passed() const noexcept {
    return max_gradient_error < gradient_tolerance && max_hessian_error < hessian_tolerance;
  }
};

/// Compares AD derivatives with central differences of the plain-double
/// objective at `samples` uniform points. `inject_fault` adds 1e-3 * x_0^2 to
/// the AD side only, to show that the check catches a wrong derivative.
AdCheckReport ad_check(const BenchmarkProblem& problem, std::size_t samples, std::uint64_t seed,
                       bool inject_fault = false);

void write_ad_report(std::ostream& os, const AdCheckReport& r);

void write_benchmark_list(std::ostream& os);

}  // namespace memetic::io
