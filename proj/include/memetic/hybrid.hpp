#pragma once

// EC -> SQP -> validation pipeline. The EC phase runs until a switching
// criterion fires; SQP refines the decoded incumbent; a second EC phase is
// seeded with the SQP point and its bitwise complement.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "memetic/benchmarks.hpp"
#include "memetic/encoding.hpp"
#include "memetic/evolution.hpp"
#include "memetic/local_search.hpp"
#include "memetic/price_monitor.hpp"

namespace memetic {

struct SwitchCriteria {
  double sigma_threshold = 0.01;
  std::size_t smoothing_window = 3;
  std::size_t stall_window = 20;
  double stall_epsilon = 1e-3;
  std::size_t max_generations = 100;

  void validate() const;
};

enum class SwitchReason { SigmaConverged, Stalled, MaxGen };

std::string_view switch_reason_name(SwitchReason r) noexcept;

/// First criterion that holds, checked in the order sigma, stall, cap.
/// best_history[t] is the best fitness after t generations (entry 0 is the
/// initial population).
std::optional<SwitchReason> should_switch(const ConvergenceState& price_state,
                                          std::span<const double> best_history,
                                          std::size_t generation, const SwitchCriteria& crit);

Chromosome invert_chromosome(const Chromosome& c);

/// One generation of an EC run, in maximization units.
struct GenerationRecord {
  std::size_t generation = 0;  // generations completed
  FitnessStats stats;
  OperatorContribution price;
  double best_so_far = 0.0;
  std::size_t evaluations = 0;  // cumulative within the phase
  std::size_t elite_count = 0;
};

struct EcRunOptions {
  /// Stop as soon as a switching criterion fires; otherwise run to the cap
  /// and only record when the first criterion fired.
  bool stop_on_switch = true;
  /// Called after every generation.
  std::function<void(const GenerationRecord&, const Population&)> observer;
};

struct EcRunResult {
  Population final_population;
  Individual best;
  std::vector<GenerationRecord> generations;
  std::vector<double> best_history;
  SwitchReason switch_reason = SwitchReason::MaxGen;
  std::optional<std::size_t> switch_generation;
  std::optional<std::size_t> converged_at;  // debounced crossover-width crossing
  FitnessStats initial_stats;
  std::size_t evaluations = 0;
};

/// Evolves `initial` with `engine` under `crit`.
EcRunResult run_ec(EvolutionEngine& engine, Population initial, const SwitchCriteria& crit,
                   const EcRunOptions& opt = {});

enum class Phase { EC, SQP, Validation };

std::string_view phase_name(Phase p) noexcept;

struct TraceRow {
  Phase phase = Phase::EC;
  std::size_t step = 0;
  double best = 0.0;  // best-so-far over the whole run, native orientation
  double mean = 0.0;  // population mean (EC phases) or current f (SQP), native
  std::size_t evaluations = 0;  // cumulative over the whole run
};

struct PhaseEvaluations {
  std::size_t ec = 0;
  std::size_t sqp = 0;
  std::size_t validation = 0;

  std::size_t total() const noexcept { return ec + sqp + validation; }
};

/// Alternative reading of the second validation seed.
enum class SeedVariant { Complement, HeavyMutation };

struct HybridOptions {
  double precision = 0.01;
  SeedVariant seed_variant = SeedVariant::Complement;
  /// Overrides the switching criteria of the validation phase.
  std::optional<SwitchCriteria> validation_criteria;
};

struct HybridResult {
  std::vector<double> x_ec;
  double f_ec = 0.0;
  std::vector<double> x_sqp;
  double f_sqp = 0.0;
  std::vector<double> x_star;
  double f_star = 0.0;
  double initial_best = 0.0;  // best of the first random population
  PhaseEvaluations evaluations;
  SwitchReason switch_reason = SwitchReason::MaxGen;
  SwitchReason validation_switch_reason = SwitchReason::MaxGen;
  SqpStopReason sqp_stop = SqpStopReason::MaxIterations;
  std::vector<std::string> warnings;
  EcRunResult ec;
  SqpResult sqp;
  EcRunResult validation;
  std::vector<Chromosome> validation_seeds;
  std::vector<TraceRow> trace;
};

/// EC-side fitness for a problem and encoding (maximization).
FitnessFunction make_fitness(const BenchmarkProblem& problem, const EncodingSpec& spec);

HybridResult run_hybrid(const BenchmarkProblem& problem, const GAConfig& ga,
                        const SQPConfig& sqp, const SwitchCriteria& crit,
                        const HybridOptions& opt = {});

}  // namespace memetic
