#pragma once

// Generational genetic algorithm over binary chromosomes: roulette-wheel or
// tournament selection, single-point crossover, bit-flip mutation and the
// adaptive elitist replacement. Fitness is maximized. Every generation also
// produces a LineageRecord with the fitness of each child after selection,
// after crossover and after mutation, which is what the Price decomposition
// in price_monitor.hpp consumes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "memetic/encoding.hpp"

namespace memetic {

using Rng = std::mt19937_64;

enum class SelectionScheme { RouletteWheel, BinaryTournament };

/// How the elite count shrinks when the offspring improve both in mean and
/// in variance: halving, or keeping the overlap fraction G of the current
/// elite count.
enum class EliteShrinkRule { Halve, FractionOfElite };

struct GAConfig {
  std::size_t population_size = 100;
  double crossover_rate = 1.0;
  /// Per-bit flip probability; unset means 1 / chromosome length.
  std::optional<double> mutation_rate;
  SelectionScheme selection = SelectionScheme::BinaryTournament;
  std::size_t tournament_size = 2;
  /// Adaptive overlap size G as a fraction of the population.
  double overlap_fraction = 0.05;
  EliteShrinkRule elite_shrink = EliteShrinkRule::Halve;
  std::size_t max_generations = 100;
  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  double effective_mutation_rate(std::size_t chromosome_length) const;
  /// ceil(G * N)
  std::size_t initial_elite_count() const;
};

struct Individual {
  Chromosome chromosome;
  double fitness = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t id = 0;

  bool evaluated() const noexcept { return fitness == fitness; }
};

struct Population {
  std::vector<Individual> members;
  std::size_t generation = 0;

  std::size_t size() const noexcept { return members.size(); }
  std::vector<double> fitness() const;
  /// Index of the fittest member (first one on ties).
  std::size_t best_index() const;
};

struct FitnessStats {
  double mean = 0.0;
  double variance = 0.0;  // population form, divides by N
  double best = 0.0;
  double worst = 0.0;
};

FitnessStats fitness_stats(std::span<const double> fitness);
FitnessStats fitness_stats(const Population& pop);

// --- selection ---------------------------------------------------------

/// Fitness-proportionate sampling with replacement. Non-positive fitness
/// values are shifted by (-worst + eps), eps = 1e-9 * max(1, |worst|).
std::vector<std::size_t> roulette_select(std::span<const double> fitness, std::size_t count,
                                         Rng& rng);

/// Strict tournaments: each draw takes k distinct members uniformly at random
/// and returns the fittest, breaking ties uniformly.
std::vector<std::size_t> tournament_select(std::span<const double> fitness, std::size_t k,
                                           std::size_t count, Rng& rng);

// --- variation ---------------------------------------------------------

/// Swaps the bits at positions [locus, L). Requires 1 <= locus <= L - 1.
std::pair<Chromosome, Chromosome> single_point_crossover(const Chromosome& p1,
                                                         const Chromosome& p2,
                                                         std::size_t locus);
/// Same with the locus drawn uniformly from {1, ..., L - 1}.
std::pair<Chromosome, Chromosome> single_point_crossover(const Chromosome& p1,
                                                         const Chromosome& p2, Rng& rng);

/// Flips each bit independently with probability pm.
Chromosome bit_flip_mutation(Chromosome c, double pm, Rng& rng);

// --- replacement -------------------------------------------------------

struct EliteState {
  std::size_t count = 1;
  double overlap_fraction = 0.05;
  EliteShrinkRule rule = EliteShrinkRule::Halve;

  static EliteState from_config(const GAConfig& cfg);
  void shrink() noexcept;
};

/// Keeps the best `state.count` parents and fills the rest with the best
/// offspring. Before merging, the elite count shrinks if the offspring mean
/// and variance both exceed those of the parents. Returns whether it shrank.
Population adaptive_elitism_replace(const Population& parents, const Population& offspring,
                                    EliteState& state, bool* shrunk = nullptr);

// --- diagnostics -------------------------------------------------------

struct SelectionDiagnostics {
  double response = 0.0;       // R(t) = mean(t) - mean(t-1)
  double differential = 0.0;   // S(t) = mean(selected) - mean(t)
  std::optional<double> intensity;  // S(t) / sd(t); empty when sd is zero
};

SelectionDiagnostics selection_diagnostics(const FitnessStats& previous,
                                           const FitnessStats& current,
                                           const FitnessStats& selected);

// --- lineage -----------------------------------------------------------

enum class Stage { Selection, Crossover, Mutation };

/// Children of one parent, one entry per selection slot the parent won.
struct ParentLineage {
  double fitness = 0.0;
  std::vector<double> selected;  // equals `fitness` for every child
  std::vector<double> crossed;
  std::vector<double> mutated;

  std::size_t offspring_count() const noexcept { return selected.size(); }
  const std::vector<double>& stage(Stage s) const noexcept;
};

struct LineageRecord {
  std::size_t generation = 0;
  std::vector<ParentLineage> parents;
  /// Crossover accounting over the selected pool: children credited to each
  /// selected slot (2 when its pair was crossed, 1 when copied), and that
  /// slot's fitness.
  std::vector<double> crossover_z;
  std::vector<double> crossover_q;

  std::size_t offspring_total() const noexcept;
  std::vector<double> offspring_counts() const;
  std::vector<double> parent_fitness() const;
  /// Fitness of all children at a stage, flattened in parent order.
  std::vector<double> stage_fitness(Stage s) const;
};

using FitnessFunction = std::function<double(const Chromosome&)>;

struct GenerationOutcome {
  Population next;
  LineageRecord lineage;
  FitnessStats stats;           // of `next`
  FitnessStats parent_stats;
  FitnessStats selected_stats;
  FitnessStats offspring_stats;
  std::size_t evaluations = 0;  // objective calls made in this generation
  bool elite_shrunk = false;
};

/// Owns the configuration, the random stream and the elite-size state of one
/// run. Not thread-safe; run independent engines for parallel runs.
class EvolutionEngine {
 public:
  EvolutionEngine(GAConfig cfg, std::size_t chromosome_length, FitnessFunction fitness);

  /// `count` uniformly random chromosomes, evaluated.
  Population random_population(std::size_t count);
  /// The given chromosomes followed by random ones up to the population size.
  Population seeded_population(std::vector<Chromosome> seeds);

  /// Selection -> pairwise crossover -> mutation -> evaluation -> adaptive
  /// elitist replacement.
  GenerationOutcome evolve_generation(const Population& pop);

  const GAConfig& config() const noexcept { return cfg_; }
  const EliteState& elite_state() const noexcept { return elite_; }
  std::size_t chromosome_length() const noexcept { return length_; }
  double mutation_rate() const noexcept { return mutation_rate_; }
  std::size_t evaluations() const noexcept { return evaluations_; }
  Rng& rng() noexcept { return rng_; }

 private:
  double evaluate(const Chromosome& c);
  Individual make_individual(Chromosome c);

  GAConfig cfg_;
  std::size_t length_;
  double mutation_rate_;
  FitnessFunction fitness_;
  Rng rng_;
  EliteState elite_;
  std::uint64_t next_id_ = 0;
  std::size_t evaluations_ = 0;
};

}  // namespace memetic
