#pragma once

// Extended Price decomposition of the per-generation change in mean fitness
// into a selection covariance term plus one transmission term per operator,
// and convergence detection from the width of the crossover term's envelope.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "memetic/evolution.hpp"

namespace memetic {

struct OperatorContribution {
  std::size_t generation = 0;
  double selection_term = 0.0;
  double crossover_term = 0.0;
  double mutation_term = 0.0;
  double crossover_sigma = 0.0;
  double mutation_sigma = 0.0;
  /// mean(post-mutation offspring) - mean(parents), computed from the raw lists.
  double total_delta_Q = 0.0;

  double crossover_width() const noexcept { return 2.0 * crossover_sigma; }
  double mutation_width() const noexcept { return 2.0 * mutation_sigma; }
  double term_sum() const noexcept { return selection_term + crossover_term + mutation_term; }
};

/// Cov(z, q) / mean(z), population covariance. Throws std::invalid_argument
/// on length mismatch or empty input and std::domain_error when mean(z) = 0.
double selection_term(std::span<const double> z, std::span<const double> q);

/// sum_i z_i dq_ij / (N zbar): the mean over all children of the fitness
/// change across `stage`. The selection stage compares against the parent
/// fitness, so it is 0 by construction.
double operator_term(const LineageRecord& lineage, Stage stage);

/// Population standard deviation of the per-child fitness changes across
/// `stage`, normalized by the same child count as operator_term.
double operator_term_sigma(const LineageRecord& lineage, Stage stage);

/// (m + s) - (m - s). Always 2s.
double sigma_width(double term_mean, double sigma);

/// Per-child fitness changes across `stage`, flattened in parent order.
std::vector<double> stage_deltas(const LineageRecord& lineage, Stage stage);

OperatorContribution decompose(const LineageRecord& lineage);

/// The covariance term evaluated on the crossover accounting (children per
/// selected slot against slot fitness). Zero whenever every pair crossed.
double crossover_selection_term(const LineageRecord& lineage);

struct ConvergenceState {
  double threshold = 0.01;
  /// Consecutive sub-threshold widths needed to declare convergence.
  std::size_t window = 3;
  std::vector<double> widths;
  std::size_t run_length = 0;
  std::optional<std::size_t> converged_at;

  bool converged() const noexcept { return converged_at.has_value(); }
};

/// Records `width` for `generation`. converged_at is set once, at the
/// generation completing the first run of `window` widths <= threshold.
void update_convergence(ConvergenceState& state, double width, std::size_t generation);

}  // namespace memetic
