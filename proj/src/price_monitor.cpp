#include "memetic/price_monitor.hpp"

#include <cmath>
#include <stdexcept>

#include "memetic/kernels.hpp"

namespace memetic {

double selection_term(std::span<const double> z, std::span<const double> q) {
  if (z.size() != q.size()) throw std::invalid_argument("selection_term: length mismatch");
  if (z.empty()) throw std::invalid_argument("selection_term: empty population");
  const auto& k = kernels::active();
  const double n = static_cast<double>(z.size());
  const double zbar = k.sum(z.data(), z.size()) / n;
  if (zbar == 0.0) throw std::domain_error("selection_term: no offspring (mean z is 0)");
  const double qbar = k.sum(q.data(), q.size()) / n;
  double cov = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) cov += (z[i] - zbar) * (q[i] - qbar);
  return cov / n / zbar;
}

std::vector<double> stage_deltas(const LineageRecord& lineage, Stage stage) {
  std::vector<double> d;
  d.reserve(lineage.offspring_total());
  for (const auto& p : lineage.parents) {
    const auto& after = p.stage(stage);
    if (after.size() != p.offspring_count()) {
      throw std::invalid_argument("stage_deltas: missing stage data");
    }
    for (std::size_t c = 0; c < after.size(); ++c) {
      double before = p.fitness;
      if (stage == Stage::Crossover) before = p.selected[c];
      if (stage == Stage::Mutation) before = p.crossed[c];
      d.push_back(after[c] - before);
    }
  }
  return d;
}

double operator_term(const LineageRecord& lineage, Stage stage) {
  const auto d = stage_deltas(lineage, stage);
  if (d.empty()) throw std::invalid_argument("operator_term: no children");
  return kernels::active().sum(d.data(), d.size()) / static_cast<double>(d.size());
}

double operator_term_sigma(const LineageRecord& lineage, Stage stage) {
  const auto d = stage_deltas(lineage, stage);
  if (d.empty()) throw std::invalid_argument("operator_term_sigma: no children");
  const auto& k = kernels::active();
  const double n = static_cast<double>(d.size());
  const double mean = k.sum(d.data(), d.size()) / n;
  return std::sqrt(k.sum_sq_dev(d.data(), mean, d.size()) / n);
}

double sigma_width(double term_mean, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma_width: sigma must be >= 0");
  (void)term_mean;
  return 2.0 * sigma;
}

double crossover_selection_term(const LineageRecord& lineage) {
  return selection_term(lineage.crossover_z, lineage.crossover_q);
}

OperatorContribution decompose(const LineageRecord& lineage) {
  OperatorContribution c;
  c.generation = lineage.generation;
  const auto z = lineage.offspring_counts();
  const auto q = lineage.parent_fitness();
  c.selection_term = selection_term(z, q);
  c.crossover_term = operator_term(lineage, Stage::Crossover);
  c.mutation_term = operator_term(lineage, Stage::Mutation);
  c.crossover_sigma = operator_term_sigma(lineage, Stage::Crossover);
  c.mutation_sigma = operator_term_sigma(lineage, Stage::Mutation);

  const auto& k = kernels::active();
  const auto final_fitness = lineage.stage_fitness(Stage::Mutation);
  c.total_delta_Q = k.sum(final_fitness.data(), final_fitness.size()) /
                        static_cast<double>(final_fitness.size()) -
                    k.sum(q.data(), q.size()) / static_cast<double>(q.size());
  return c;
}

void update_convergence(ConvergenceState& state, double width, std::size_t generation) {
  if (!(width >= 0.0)) throw std::invalid_argument("update_convergence: width must be >= 0");
  state.widths.push_back(width);
  if (width <= state.threshold) {
    ++state.run_length;
  } else {
    state.run_length = 0;
  }
  const std::size_t need = state.window == 0 ? 1 : state.window;
  if (!state.converged_at && state.run_length >= need) state.converged_at = generation;
}

}  // namespace memetic
