#include "memetic/hybrid.hpp"

#include <cmath>
#include <stdexcept>

namespace memetic {

void SwitchCriteria::validate() const {
  if (!(sigma_threshold > 0.0)) throw std::invalid_argument("SwitchCriteria: sigma_threshold must be > 0");
  if (stall_window == 0) throw std::invalid_argument("SwitchCriteria: stall_window must be >= 1");
  if (!(stall_epsilon >= 0.0)) throw std::invalid_argument("SwitchCriteria: stall_epsilon must be >= 0");
  if (max_generations == 0) throw std::invalid_argument("SwitchCriteria: max_generations must be >= 1");
}

std::string_view switch_reason_name(SwitchReason r) noexcept {
  switch (r) {
    case SwitchReason::SigmaConverged:
      return "sigma-converged";
    case SwitchReason::Stalled:
      return "stalled";
    case SwitchReason::MaxGen:
      return "max-gen";
  }
  return "unknown";
}

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::EC:
      return "ec";
    case Phase::SQP:
      return "sqp";
    case Phase::Validation:
      return "validation";
  }
  return "unknown";
}

std::optional<SwitchReason> should_switch(const ConvergenceState& price_state,
                                          std::span<const double> best_history,
                                          std::size_t generation, const SwitchCriteria& crit) {
  if (price_state.converged_at && *price_state.converged_at <= generation) {
    return SwitchReason::SigmaConverged;
  }
  if (generation >= crit.stall_window && generation < best_history.size()) {
    const double now = best_history[generation];
    const double then = best_history[generation - crit.stall_window];
    if (std::abs(now - then) <= crit.stall_epsilon) return SwitchReason::Stalled;
  }
  if (generation >= crit.max_generations) return SwitchReason::MaxGen;
  return std::nullopt;
}

Chromosome invert_chromosome(const Chromosome& c) {
  Chromosome out = c;
  for (auto& b : out.bits()) b ^= 1;
  return out;
}

EcRunResult run_ec(EvolutionEngine& engine, Population initial, const SwitchCriteria& crit,
                   const EcRunOptions& opt) {
  crit.validate();
  EcRunResult res;
  const std::size_t evals_at_start = engine.evaluations();
  res.initial_stats = fitness_stats(initial);
  res.best = initial.members[initial.best_index()];
  res.best_history.push_back(res.best.fitness);

  ConvergenceState price;
  price.threshold = crit.sigma_threshold;
  price.window = crit.smoothing_window;

  Population pop = std::move(initial);
  for (std::size_t gen = 1;; ++gen) {
    GenerationOutcome out = engine.evolve_generation(pop);
    pop = std::move(out.next);

    GenerationRecord rec;
    rec.generation = gen;
    rec.stats = out.stats;
    rec.price = decompose(out.lineage);
    const auto& leader = pop.members[pop.best_index()];
    if (leader.fitness > res.best.fitness) res.best = leader;
    rec.best_so_far = res.best.fitness;
    rec.evaluations = engine.evaluations() - evals_at_start;
    rec.elite_count = engine.elite_state().count;
    res.best_history.push_back(res.best.fitness);

    update_convergence(price, sigma_width(rec.price.crossover_term, rec.price.crossover_sigma),
                       gen);
    if (opt.observer) opt.observer(rec, pop);
    res.generations.push_back(rec);

    const auto reason = should_switch(price, res.best_history, gen, crit);
    if (reason && !res.switch_generation) {
      res.switch_reason = *reason;
      res.switch_generation = gen;
    }
    const bool at_cap = gen >= crit.max_generations;
    if ((opt.stop_on_switch && reason) || at_cap) {
      if (!res.switch_generation) {
        res.switch_reason = SwitchReason::MaxGen;
        res.switch_generation = gen;
      }
      break;
    }
  }
  res.converged_at = price.converged_at;
  res.final_population = std::move(pop);
  res.evaluations = engine.evaluations() - evals_at_start;
  return res;
}

FitnessFunction make_fitness(const BenchmarkProblem& problem, const EncodingSpec& spec) {
  if (spec.dimension() != problem.dimension()) {
    throw std::invalid_argument("make_fitness: encoding and problem dimensions differ");
  }
  return [&problem, &spec, x = std::vector<double>(spec.dimension())](
             const Chromosome& c) mutable {
    decode_into(c, spec, x);
    return problem.fitness(problem.value(x));
  };
}

namespace {

/// Rows for generation 0 (initial population, `initial_evals` calls) and
/// every later generation, offset by the evaluations of earlier phases.
void append_ec_rows(std::vector<TraceRow>& trace, Phase phase, const EcRunResult& ec,
                    const BenchmarkProblem& problem, double& best_fitness, std::size_t base,
                    std::size_t initial_evals) {
  auto push = [&](std::size_t step, double best, double mean, std::size_t evals) {
    best_fitness = std::max(best_fitness, best);
    trace.push_back({phase, step, problem.native(best_fitness), problem.native(mean), evals});
  };
  push(0, ec.initial_stats.best, ec.initial_stats.mean, base + initial_evals);
  for (const auto& g : ec.generations) {
    push(g.generation, g.best_so_far, g.stats.mean, base + initial_evals + g.evaluations);
  }
}

}  // namespace

HybridResult run_hybrid(const BenchmarkProblem& problem, const GAConfig& ga,
                        const SQPConfig& sqp_cfg, const SwitchCriteria& crit,
                        const HybridOptions& opt) {
  ga.validate();
  sqp_cfg.validate();
  crit.validate();
  const BoundBox& box = problem.bounds();
  const EncodingSpec spec = EncodingSpec::from_bounds(box.lower, box.upper, opt.precision);
  HybridResult res;
  double best_fitness = -std::numeric_limits<double>::infinity();

  // Phase 1: global search.
  EvolutionEngine engine(ga, spec.total_length(), make_fitness(problem, spec));
  Population initial = engine.random_population(ga.population_size);
  const std::size_t initial_evals = engine.evaluations();
  res.ec = run_ec(engine, std::move(initial), crit);
  res.switch_reason = res.ec.switch_reason;
  res.evaluations.ec = initial_evals + res.ec.evaluations;
  res.x_ec = decode(res.ec.best.chromosome, spec);
  res.f_ec = problem.value(res.x_ec);
  res.initial_best = problem.native(res.ec.initial_stats.best);
  append_ec_rows(res.trace, Phase::EC, res.ec, problem, best_fitness, 0, initial_evals);

  // Phase 2: local refinement on the native objective turned into minimization.
  ad::ADFunction local = problem.ad_function();
  if (problem.orientation() == Orientation::Maximize) {
    local = [f = problem.ad_function()](std::span<const ad::ADScalar> x) { return -f(x); };
  }
  res.x_sqp = res.x_ec;
  res.f_sqp = res.f_ec;
  try {
    res.sqp = sqp_run(local, res.x_ec, box, sqp_cfg);
    res.sqp_stop = res.sqp.stop_reason;
    res.evaluations.sqp = res.sqp.evaluations;
    const double f = problem.value(res.sqp.x);
    if (problem.better(f, res.f_ec)) {
      res.x_sqp = res.sqp.x;
      res.f_sqp = f;
    } else if (problem.better(res.f_ec, f)) {
      res.warnings.push_back("sqp finished worse than its start; keeping the EC point");
    }
  } catch (const std::exception& e) {
    res.warnings.push_back(std::string("sqp failed: ") + e.what());
  }
  {
    const std::size_t base = res.evaluations.ec;
    const double sign = problem.orientation() == Orientation::Maximize ? -1.0 : 1.0;
    std::size_t known = 1;  // the starting point's sweep
    for (const auto& it : res.sqp.trace) {
      const double native = sign * it.f;
      best_fitness = std::max(best_fitness, problem.fitness(native));
      res.trace.push_back({Phase::SQP, it.iteration, problem.native(best_fitness), native,
                           base + known});
      known = it.evaluations;
    }
    best_fitness = std::max(best_fitness, problem.fitness(res.f_sqp));
    res.trace.push_back({Phase::SQP, res.sqp.iterations(), problem.native(best_fitness),
                         res.f_sqp, base + res.evaluations.sqp});
  }

  // Phase 3: validation seeded with the local solution and its inverse.
  GAConfig vcfg = ga;
  vcfg.rng_seed = ga.rng_seed ^ 0x5bd1e9955bd1e995ULL;
  EvolutionEngine validator(vcfg, spec.total_length(), make_fitness(problem, spec));
  const Chromosome seed = encode(res.x_sqp, spec);
  const Chromosome other = opt.seed_variant == SeedVariant::Complement
                               ? invert_chromosome(seed)
                               : bit_flip_mutation(seed, 0.5, validator.rng());
  res.validation_seeds = {seed, other};
  Population vpop = validator.seeded_population({seed, other});
  const std::size_t vinitial = validator.evaluations();
  res.validation = run_ec(validator, std::move(vpop), opt.validation_criteria.value_or(crit));
  res.validation_switch_reason = res.validation.switch_reason;
  res.evaluations.validation = vinitial + res.validation.evaluations;
  append_ec_rows(res.trace, Phase::Validation, res.validation, problem, best_fitness,
                 res.evaluations.ec + res.evaluations.sqp, vinitial);

  const auto xv = decode(res.validation.best.chromosome, spec);
  const double fv = problem.value(xv);
  if (problem.better(fv, res.f_sqp)) {
    res.x_star = xv;
    res.f_star = fv;
  } else {
    res.x_star = res.x_sqp;
    res.f_star = res.f_sqp;
  }
  return res;
}

}  // namespace memetic
