#include "memetic/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "memetic/kernels.hpp"

namespace memetic {

void GAConfig::validate() const {
  if (population_size < 2 || population_size % 2 != 0) {
    throw std::invalid_argument("GAConfig: population_size must be even and >= 2");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw std::invalid_argument("GAConfig: crossover_rate must be in [0, 1]");
  }
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw std::invalid_argument("GAConfig: mutation_rate must be in [0, 1]");
  }
  if (!(overlap_fraction > 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("GAConfig: overlap_fraction must be in (0, 1)");
  }
  if (overlap_fraction * static_cast<double>(population_size) < 1.0) {
    throw std::invalid_argument("GAConfig: overlap_fraction * population_size must be >= 1");
  }
  if (tournament_size < 1 || tournament_size > population_size) {
    throw std::invalid_argument("GAConfig: tournament_size must be in [1, population_size]");
  }
  if (max_generations == 0) throw std::invalid_argument("GAConfig: max_generations must be >= 1");
}

double GAConfig::effective_mutation_rate(std::size_t chromosome_length) const {
  if (mutation_rate) return *mutation_rate;
  return 1.0 / static_cast<double>(chromosome_length);
}

std::size_t GAConfig::initial_elite_count() const {
  const double g = overlap_fraction * static_cast<double>(population_size);
  // Guard against 0.05 * 100 landing a hair above 5.
  return static_cast<std::size_t>(std::ceil(g - 1e-9));
}

std::vector<double> Population::fitness() const {
  std::vector<double> f;
  f.reserve(members.size());
  for (const auto& m : members) f.push_back(m.fitness);
  return f;
}

std::size_t Population::best_index() const {
  if (members.empty()) throw std::invalid_argument("Population::best_index: empty population");
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].fitness > members[best].fitness) best = i;
  }
  return best;
}

FitnessStats fitness_stats(std::span<const double> fitness) {
  if (fitness.empty()) throw std::invalid_argument("fitness_stats: empty population");
  const auto& k = kernels::active();
  const double n = static_cast<double>(fitness.size());
  FitnessStats s;
  s.mean = k.sum(fitness.data(), fitness.size()) / n;
  s.variance = k.sum_sq_dev(fitness.data(), s.mean, fitness.size()) / n;
  const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
  s.best = *hi;
  s.worst = *lo;
  // Keep worst <= mean <= best under rounding.
  s.mean = std::clamp(s.mean, s.worst, s.best);
  return s;
}

FitnessStats fitness_stats(const Population& pop) {
  const auto f = pop.fitness();
  return fitness_stats(f);
}

std::vector<std::size_t> roulette_select(std::span<const double> fitness, std::size_t count,
                                         Rng& rng) {
  if (fitness.empty()) throw std::invalid_argument("roulette_select: empty population");
  const double worst = *std::min_element(fitness.begin(), fitness.end());
  double shift = 0.0;
  if (worst <= 0.0) shift = -worst + 1e-9 * std::max(1.0, std::abs(worst));

  std::vector<double> cumulative(fitness.size());
  double total = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    total += fitness[i] + shift;
    cumulative[i] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::domain_error("roulette_select: total fitness must be positive and finite");
  }

  std::uniform_real_distribution<double> u(0.0, total);
  std::vector<std::size_t> picks;
  picks.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    const double r = u(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    picks.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return picks;
}

std::vector<std::size_t> tournament_select(std::span<const double> fitness, std::size_t k,
                                           std::size_t count, Rng& rng) {
  const std::size_t n = fitness.size();
  if (n == 0) throw std::invalid_argument("tournament_select: empty population");
  if (k == 0 || k > n) {
    throw std::invalid_argument("tournament_select: tournament size " + std::to_string(k) +
                                " not in [1, " + std::to_string(n) + "]");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});

  std::vector<std::size_t> picks;
  picks.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    // Partial Fisher-Yates: pool[0, k) is a uniform k-subset.
    for (std::size_t m = 0; m < k; ++m) {
      std::uniform_int_distribution<std::size_t> pick(m, n - 1);
      std::swap(pool[m], pool[pick(rng)]);
    }
    std::size_t winner = pool[0];
    std::size_t ties = 1;
    for (std::size_t m = 1; m < k; ++m) {
      const std::size_t cand = pool[m];
      if (fitness[cand] > fitness[winner]) {
        winner = cand;
        ties = 1;
      } else if (fitness[cand] == fitness[winner]) {
        ++ties;
        std::uniform_int_distribution<std::size_t> coin(0, ties - 1);
        if (coin(rng) == 0) winner = cand;
      }
    }
    picks.push_back(winner);
  }
  return picks;
}

std::pair<Chromosome, Chromosome> single_point_crossover(const Chromosome& p1,
                                                         const Chromosome& p2,
                                                         std::size_t locus) {
  if (p1.size() != p2.size()) throw std::invalid_argument("crossover: parent length mismatch");
  const std::size_t len = p1.size();
  if (len < 2 || locus < 1 || locus > len - 1) {
    throw std::invalid_argument("crossover: locus must be in [1, L-1]");
  }
  Chromosome c1 = p1;
  Chromosome c2 = p2;
  auto b1 = c1.bits();
  auto b2 = c2.bits();
  std::swap_ranges(b1.begin() + static_cast<std::ptrdiff_t>(locus), b1.end(),
                   b2.begin() + static_cast<std::ptrdiff_t>(locus));
  return {std::move(c1), std::move(c2)};
}

std::pair<Chromosome, Chromosome> single_point_crossover(const Chromosome& p1,
                                                         const Chromosome& p2, Rng& rng) {
  if (p1.size() < 2) throw std::invalid_argument("crossover: chromosome length must be >= 2");
  std::uniform_int_distribution<std::size_t> pick(1, p1.size() - 1);
  return single_point_crossover(p1, p2, pick(rng));
}

Chromosome bit_flip_mutation(Chromosome c, double pm, Rng& rng) {
  if (pm <= 0.0) return c;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& b : c.bits()) {
    if (u(rng) < pm) b ^= 1;
  }
  return c;
}

EliteState EliteState::from_config(const GAConfig& cfg) {
  return EliteState{std::max<std::size_t>(1, cfg.initial_elite_count()), cfg.overlap_fraction,
                    cfg.elite_shrink};
}

void EliteState::shrink() noexcept {
  std::size_t next = count;
  if (rule == EliteShrinkRule::Halve) {
    next = count / 2;
  } else {
    next = static_cast<std::size_t>(std::floor(overlap_fraction * static_cast<double>(count)));
  }
  count = std::max<std::size_t>(1, next);
}

namespace {

std::vector<std::size_t> ranked(const Population& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop.members[a].fitness > pop.members[b].fitness;
  });
  return order;
}

}  // namespace

Population adaptive_elitism_replace(const Population& parents, const Population& offspring,
                                    EliteState& state, bool* shrunk) {
  const std::size_t n = parents.size();
  if (n == 0 || offspring.size() == 0) {
    throw std::invalid_argument("adaptive_elitism_replace: empty population");
  }
  const FitnessStats ps = fitness_stats(parents);
  const FitnessStats os = fitness_stats(offspring);
  const bool shrink = os.mean > ps.mean && os.variance > ps.variance;
  if (shrink) state.shrink();
  if (shrunk != nullptr) *shrunk = shrink;

  const std::size_t elites = std::min(state.count, n);
  const std::size_t fill = std::min(n - elites, offspring.size());

  Population next;
  next.generation = parents.generation + 1;
  next.members.reserve(n);
  const auto parent_rank = ranked(parents);
  for (std::size_t i = 0; i < elites; ++i) next.members.push_back(parents.members[parent_rank[i]]);
  const auto child_rank = ranked(offspring);
  for (std::size_t i = 0; i < fill; ++i) next.members.push_back(offspring.members[child_rank[i]]);
  // Too few offspring: top up with the next-best parents.
  for (std::size_t i = elites; next.members.size() < n; ++i) {
    next.members.push_back(parents.members[parent_rank[i]]);
  }
  return next;
}

SelectionDiagnostics selection_diagnostics(const FitnessStats& previous,
                                           const FitnessStats& current,
                                           const FitnessStats& selected) {
  SelectionDiagnostics d;
  d.response = current.mean - previous.mean;
  d.differential = selected.mean - current.mean;
  if (current.variance > 0.0) d.intensity = d.differential / std::sqrt(current.variance);
  return d;
}

const std::vector<double>& ParentLineage::stage(Stage s) const noexcept {
  switch (s) {
    case Stage::Selection:
      return selected;
    case Stage::Crossover:
      return crossed;
    case Stage::Mutation:
      break;
  }
  return mutated;
}

std::size_t LineageRecord::offspring_total() const noexcept {
  std::size_t total = 0;
  for (const auto& p : parents) total += p.offspring_count();
  return total;
}

std::vector<double> LineageRecord::offspring_counts() const {
  std::vector<double> z;
  z.reserve(parents.size());
  for (const auto& p : parents) z.push_back(static_cast<double>(p.offspring_count()));
  return z;
}

std::vector<double> LineageRecord::parent_fitness() const {
  std::vector<double> q;
  q.reserve(parents.size());
  for (const auto& p : parents) q.push_back(p.fitness);
  return q;
}

std::vector<double> LineageRecord::stage_fitness(Stage s) const {
  std::vector<double> out;
  out.reserve(offspring_total());
  for (const auto& p : parents) {
    const auto& v = p.stage(s);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

EvolutionEngine::EvolutionEngine(GAConfig cfg, std::size_t chromosome_length,
                                 FitnessFunction fitness)
    : cfg_(std::move(cfg)),
      length_(chromosome_length),
      mutation_rate_(0.0),
      fitness_(std::move(fitness)),
      rng_(cfg_.rng_seed) {
  cfg_.validate();
  if (length_ == 0) throw std::invalid_argument("EvolutionEngine: chromosome length must be >= 1");
  mutation_rate_ = cfg_.effective_mutation_rate(length_);
  elite_ = EliteState::from_config(cfg_);
}

double EvolutionEngine::evaluate(const Chromosome& c) {
  ++evaluations_;
  const double f = fitness_(c);
  if (!std::isfinite(f)) throw std::domain_error("EvolutionEngine: non-finite fitness");
  return f;
}

Individual EvolutionEngine::make_individual(Chromosome c) {
  Individual ind;
  ind.fitness = evaluate(c);
  ind.chromosome = std::move(c);
  ind.id = next_id_++;
  return ind;
}

Population EvolutionEngine::random_population(std::size_t count) {
  Population pop;
  pop.members.reserve(count);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < count; ++i) {
    Chromosome c(length_);
    for (auto& b : c.bits()) b = coin(rng_) ? 1 : 0;
    pop.members.push_back(make_individual(std::move(c)));
  }
  return pop;
}

Population EvolutionEngine::seeded_population(std::vector<Chromosome> seeds) {
  if (seeds.size() > cfg_.population_size) {
    throw std::invalid_argument("seeded_population: more seeds than population slots");
  }
  Population pop = random_population(cfg_.population_size - seeds.size());
  for (auto& s : seeds) {
    if (s.size() != length_) throw std::invalid_argument("seeded_population: seed length mismatch");
    pop.members.push_back(make_individual(std::move(s)));
  }
  return pop;
}

GenerationOutcome EvolutionEngine::evolve_generation(const Population& pop) {
  const std::size_t n = pop.size();
  if (n != cfg_.population_size) {
    throw std::invalid_argument("evolve_generation: population size " + std::to_string(n) +
                                " differs from configured " +
                                std::to_string(cfg_.population_size));
  }
  for (const auto& m : pop.members) {
    if (!m.evaluated()) throw std::invalid_argument("evolve_generation: unevaluated individual");
    if (m.chromosome.size() != length_) {
      throw std::invalid_argument("evolve_generation: chromosome length mismatch");
    }
  }
  const std::size_t evals_before = evaluations_;
  const auto fitness = pop.fitness();

  const auto selected = cfg_.selection == SelectionScheme::RouletteWheel
                            ? roulette_select(fitness, n, rng_)
                            : tournament_select(fitness, cfg_.tournament_size, n, rng_);

  GenerationOutcome out;
  auto& lineage = out.lineage;
  lineage.generation = pop.generation;
  lineage.parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) lineage.parents[i].fitness = fitness[i];
  lineage.crossover_z.resize(n);
  lineage.crossover_q.resize(n);

  std::vector<double> selected_fitness(n);
  for (std::size_t k = 0; k < n; ++k) selected_fitness[k] = fitness[selected[k]];

  Population offspring;
  offspring.generation = pop.generation + 1;
  offspring.members.reserve(n);

  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool can_cross = length_ >= 2;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const std::size_t slot[2] = {selected[k], selected[k + 1]};
    const Chromosome& pa = pop.members[slot[0]].chromosome;
    const Chromosome& pb = pop.members[slot[1]].chromosome;

    const bool crossed = can_cross && u(rng_) < cfg_.crossover_rate;
    std::pair<Chromosome, Chromosome> kids =
        crossed ? single_point_crossover(pa, pb, rng_) : std::pair{pa, pb};
    Chromosome* child[2] = {&kids.first, &kids.second};

    for (int c = 0; c < 2; ++c) {
      const std::size_t parent = slot[c];
      const Chromosome& origin = pop.members[parent].chromosome;
      const double q = fitness[parent];
      const double after_cross = *child[c] == origin ? q : evaluate(*child[c]);

      Chromosome mutated = bit_flip_mutation(*child[c], mutation_rate_, rng_);
      const double after_mut = mutated == *child[c] ? after_cross : evaluate(mutated);

      auto& rec = lineage.parents[parent];
      rec.selected.push_back(q);
      rec.crossed.push_back(after_cross);
      rec.mutated.push_back(after_mut);
      lineage.crossover_z[k + c] = crossed ? 2.0 : 1.0;
      lineage.crossover_q[k + c] = q;

      Individual ind;
      ind.chromosome = std::move(mutated);
      ind.fitness = after_mut;
      ind.id = next_id_++;
      offspring.members.push_back(std::move(ind));
    }
  }

  out.parent_stats = fitness_stats(fitness);
  out.selected_stats = fitness_stats(selected_fitness);
  out.offspring_stats = fitness_stats(offspring);
  out.next = adaptive_elitism_replace(pop, offspring, elite_, &out.elite_shrunk);
  out.stats = fitness_stats(out.next);
  out.evaluations = evaluations_ - evals_before;
  return out;
}

}  // namespace memetic
