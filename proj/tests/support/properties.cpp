#include "properties.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "generators.hpp"
#include "memetic/benchmarks.hpp"
#include "memetic/cli_io.hpp"
#include "memetic/hybrid.hpp"
#include "memetic/local_search.hpp"
#include "memetic/price_monitor.hpp"

namespace memetic::testing {

void PropertyReport::fail(std::string what) {
  if (counterexamples.size() < 5) counterexamples.push_back(std::move(what));
}

namespace {

template <class... Args>
std::string describe(Args&&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}

// Case-level bookkeeping: a case fails once, however many checks it breaks.
class CaseCheck {
 public:
  CaseCheck(PropertyReport& rep, std::size_t index) : rep_(rep), index_(index) {}
  ~CaseCheck() {
    ++rep_.cases;
    if (failed_) ++rep_.failed_cases;
  }
  template <class... Args>
  void require(bool ok, Args&&... what) {
    if (ok || failed_) return;
    failed_ = true;
    rep_.fail(describe("case ", index_, ": ", std::forward<Args>(what)...));
  }
  bool failed() const noexcept { return failed_; }

 private:
  PropertyReport& rep_;
  std::size_t index_;
  bool failed_ = false;
};

// A fixed pseudo-random landscape over bit strings: weighted bits plus a
// ripple in the integer code, so ties are rare and negative values occur.
FitnessFunction random_landscape(Gen& g, std::size_t length) {
  std::vector<double> w(length);
  for (auto& v : w) v = g.uniform(-1.0, 1.0);
  const double offset = g.uniform(-2.0, 4.0);
  const double ripple = g.uniform(0.0, 0.5);
  return [w, offset, ripple](const Chromosome& c) {
    double acc = offset;
    double code = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i]) acc += w[i];
      code = 2.0 * code + (c[i] ? 1.0 : 0.0);
    }
    return acc + ripple * std::sin(code);
  };
}

GAConfig random_ga(Gen& g, std::size_t max_n) {
  GAConfig cfg;
  cfg.population_size = 2 * g.integer(1, max_n / 2);
  const double n = static_cast<double>(cfg.population_size);
  cfg.crossover_rate = g.coin(0.3) ? 1.0 : g.uniform(0.0, 1.0);
  if (g.coin(0.5)) cfg.mutation_rate = g.uniform(0.0, 0.5);
  cfg.selection = g.coin() ? SelectionScheme::BinaryTournament : SelectionScheme::RouletteWheel;
  cfg.tournament_size = std::min<std::size_t>(cfg.population_size, g.integer(1, 4));
  cfg.overlap_fraction = g.uniform(1.0 / n, 0.99);
  cfg.elite_shrink = g.coin() ? EliteShrinkRule::Halve : EliteShrinkRule::FractionOfElite;
  cfg.rng_seed = g.next();
  return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_values(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same_bits);
}

}  // namespace

PropertyReport roundtrip_property(std::uint64_t seed, std::size_t cases) {
  PropertyReport rep;
  rep.name = "encode/decode round-trip";
  for (std::size_t k = 0; k < cases; ++k) {
    Gen g(seed, k);
    CaseCheck check(rep, k);
    const std::size_t n = g.integer(1, 4);
    std::vector<VariableSpec> vars;
    for (std::size_t i = 0; i < n; ++i) {
      const double lower = g.uniform(-1000.0, 1000.0);
      const double width = g.log_uniform(1e-3, 1e4);
      const double precision = width / g.log_uniform(1.5, 1e9);
      vars.push_back(VariableSpec::from_precision(lower, lower + width, precision));
    }
    const EncodingSpec spec(vars);

    const Chromosome c = g.chromosome(spec.total_length());
    const auto x = decode(c, spec);
    for (std::size_t i = 0; i < n; ++i) {
      check.require(x[i] >= vars[i].lower && x[i] <= vars[i].upper, "decoded value ", x[i],
                    " outside [", vars[i].lower, ", ", vars[i].upper, "]");
    }
    check.require(encode(x, spec) == c, "encode(decode(c)) != c for ", c.to_string());

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = g.uniform(vars[i].lower, vars[i].upper);
    const auto back = decode(encode(y, spec), spec);
    for (std::size_t i = 0; i < n; ++i) {
      const double slack = 0.5 * vars[i].step() * (1.0 + 1e-9) +
                           4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(vars[i].lower), std::abs(vars[i].upper));
      check.require(std::abs(back[i] - y[i]) <= slack, "|decode(encode(", y[i], ")) - x| = ",
                    std::abs(back[i] - y[i]), " > half step ", 0.5 * vars[i].step());
    }

    const auto lo = decode(Chromosome(spec.total_length(), false), spec);
    const auto hi = decode(Chromosome(spec.total_length(), true), spec);
    for (std::size_t i = 0; i < n; ++i) {
      check.require(lo[i] == vars[i].lower && hi[i] == vars[i].upper,
                    "corner chromosomes do not decode to the bounds exactly");
    }
  }
  return rep;
}

PropertyReport elitism_property(std::uint64_t seed, std::size_t cases) {
  PropertyReport rep;
  rep.name = "elitism monotone best";
  for (std::size_t k = 0; k < cases; ++k) {
    Gen g(seed, k);
    CaseCheck check(rep, k);
    const std::size_t length = g.integer(2, 24);
    const GAConfig cfg = random_ga(g, 20);
    EvolutionEngine engine(cfg, length, random_landscape(g, length));
    Population pop = engine.random_population(cfg.population_size);
    double best = pop.members[pop.best_index()].fitness;
    for (std::size_t gen = 1; gen <= 8 && !check.failed(); ++gen) {
      const std::size_t elite_before = engine.elite_state().count;
      GenerationOutcome out = engine.evolve_generation(pop);
      pop = std::move(out.next);
      check.require(pop.size() == cfg.population_size, "population size ", pop.size());
      check.require(out.lineage.offspring_total() == cfg.population_size,
                    "children credited ", out.lineage.offspring_total());
      const auto& elite = engine.elite_state();
      check.require(elite.count >= 1 && elite.count <= elite_before, "elite count went from ",
                    elite_before, " to ", elite.count);
      for (const auto& m : pop.members) check.require(m.evaluated(), "unevaluated member");
      const double now = pop.members[pop.best_index()].fitness;
      check.require(now >= best, "best fell from ", best, " to ", now, " at generation ", gen);
      best = std::max(best, now);
    }
  }
  return rep;
}

namespace {

ad::ADScalar rosenbrock(std::span<const ad::ADScalar> x) {
  ad::ADScalar acc = ad::ADScalar::constant(x[0].dim(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const ad::ADScalar a = x[i + 1] - x[i] * x[i];
    const ad::ADScalar b = 1.0 - x[i];
    acc += 100.0 * a * a + b * b;
  }
  return acc;
}

struct LocalCase {
  ad::ADFunction f;
  std::vector<double> x0;
  std::optional<BoundBox> box;
  std::string label;
};

LocalCase random_local_case(Gen& g, std::size_t k) {
  LocalCase c;
  switch (k % 3) {
    case 0: {  // SPD quadratic with a quartic perturbation
      const std::size_t n = g.integer(1, 6);
      Eigen::MatrixXd a(n, n);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g.uniform(-1.0, 1.0);
      const Eigen::MatrixXd q = a * a.transpose() + g.uniform(0.05, 1.0) * Eigen::MatrixXd::Identity(n, n);
      const auto center = g.vector(n, -3.0, 3.0);
      const double eps = g.log_uniform(1e-3, 1.0);
      c.f = [q, center, eps](std::span<const ad::ADScalar> x) {
        const std::size_t n = x.size();
        std::vector<ad::ADScalar> e;
        for (std::size_t i = 0; i < n; ++i) e.push_back(x[i] - center[i]);
        ad::ADScalar acc = ad::ADScalar::constant(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            acc += 0.5 * q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * e[i] * e[j];
          }
          acc += eps * ad::powi(e[i], 4);
        }
        return acc;
      };
      c.x0 = g.vector(n, -6.0, 6.0);
      c.label = describe("quartic quadratic n=", n);
      break;
    }
    case 1: {
      const std::size_t n = g.integer(2, 4);
      c.f = rosenbrock;
      c.x0 = g.vector(n, -2.0, 2.0);
      c.label = describe("rosenbrock n=", n);
      break;
    }
    default: {
      const auto names = problem_names();
      const std::string name(names[g.integer(0, names.size() - 1)]);
      const std::size_t n = g.integer(1, 5);
      const BenchmarkProblem p = make_problem(name, n);
      c.f = p.ad_function();
      if (p.orientation() == Orientation::Maximize) {
        c.f = [f = p.ad_function()](std::span<const ad::ADScalar> x) { return -f(x); };
      }
      c.box = p.bounds();
      for (std::size_t i = 0; i < n; ++i) {
        c.x0.push_back(g.uniform(p.bounds().lower[i], p.bounds().upper[i]));
      }
      c.label = describe(name, " n=", n, " (bounded)");
    }
  }
  return c;
}

}  // namespace

PropertyReport wolfe_property(std::uint64_t seed, std::size_t cases) {
  PropertyReport rep;
  rep.name = "Wolfe post-conditions";
  const SQPConfig cfg;
  std::size_t steps = 0, full_wolfe = 0, capped = 0, exhausted = 0;
  for (std::size_t k = 0; k < cases; ++k) {
    Gen g(seed, k);
    CaseCheck check(rep, k);
    const LocalCase lc = random_local_case(g, k);
    const SqpResult res = sqp_run(lc.f, lc.x0, lc.box, cfg);
    for (const auto& it : res.trace) {
      ++steps;
      const double f = it.f;
      const double dd = it.directional_derivative;
      check.require(dd < 0.0, lc.label, ": not a descent direction, g'd = ", dd);
      check.require(it.alpha > 0.0 && it.alpha <= 1.0, lc.label, ": alpha ", it.alpha);
      check.require(it.f_next <= f + cfg.c1 * it.alpha * dd, lc.label,
                    ": sufficient decrease fails, f = ", f, " f_next = ", it.f_next);
      check.require(it.f_next < f, lc.label, ": f did not strictly decrease, f = ", f);

      const Eigen::VectorXd next = it.x + it.alpha * it.direction;
      const std::vector<double> xn(next.data(), next.data() + next.size());
      std::vector<ad::ADScalar> vars = ad::ADContext{xn.size()}.variables(xn);
      const double f_re = lc.f(vars).value();
      check.require(std::abs(f_re - it.f_next) <= 1e-12 * std::max(1.0, std::abs(f_re)), lc.label,
                    ": recorded f_next ", it.f_next, " but f(x + alpha d) = ", f_re);

      const bool curvature = it.next_directional_derivative >= cfg.c2 * dd;
      const bool at_cap = it.alpha == 1.0 && it.next_directional_derivative < cfg.c2 * dd;
      check.require(it.wolfe == curvature, lc.label, ": wolfe flag disagrees with the slopes");
      check.require(curvature || at_cap || it.line_search_exhausted, lc.label,
                    ": curvature fails at alpha ", it.alpha, " (phi'(a) = ",
                    it.next_directional_derivative, ", phi'(0) = ", dd, ")");
      full_wolfe += curvature;
      capped += !curvature && at_cap;
      exhausted += !curvature && !at_cap && it.line_search_exhausted;

      if (lc.box) {
        check.require(lc.box->strictly_contains(std::vector<double>(it.x.data(), it.x.data() + it.x.size())),
                      lc.label, ": iterate on or outside the box");
        check.require(lc.box->strictly_contains(xn), lc.label, ": accepted point outside the box");
      }
    }
    if (lc.box) check.require(lc.box->strictly_contains(res.x), lc.label, ": final point outside the box");
  }
  rep.notes = describe(steps, " accepted steps: ", full_wolfe, " full Wolfe, ", capped,
                       " at the alpha = 1 cap with phi'(1) < c2 phi'(0), ", exhausted,
                       " after line-search exhaustion");
  return rep;
}

PropertyReport ipm_property(std::uint64_t seed, std::size_t cases) {
  PropertyReport rep;
  rep.name = "IPM strict feasibility";
  std::size_t fallbacks = 0;
  for (std::size_t k = 0; k < cases; ++k) {
    Gen g(seed, k);
    CaseCheck check(rep, k);
    const auto n = static_cast<Eigen::Index>(g.integer(1, 6));
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g.uniform(-1.0, 1.0);
    const Eigen::MatrixXd h =
        a * a.transpose() + g.log_uniform(1e-3, 1.0) * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd grad(n), lo(n), hi(n);
    const double scale = g.log_uniform(1e-3, 1e3);
    for (Eigen::Index i = 0; i < n; ++i) {
      grad[i] = scale * g.uniform(-1.0, 1.0);
      lo[i] = -g.log_uniform(1e-4, 10.0);
      hi[i] = g.log_uniform(1e-4, 10.0);
    }
    const IpmResult r = ipm_qp_solve(grad, h, lo, hi);
    fallbacks += r.fallback;
    check.require(r.step.size() == n && r.step.allFinite(), "non-finite step");
    for (Eigen::Index i = 0; i < n && !check.failed(); ++i) {
      check.require(r.step[i] > lo[i] && r.step[i] < hi[i], "s[", i, "] = ", r.step[i],
                    " not strictly inside (", lo[i], ", ", hi[i], ")");
    }
    const double model = grad.dot(r.step) + 0.5 * r.step.dot(h * r.step);
    check.require(model <= 1e-12 * scale, "model value ", model, " above the value 0 at s = 0");
  }
  rep.notes = describe(fallbacks, " clipped-Newton fallbacks");
  return rep;
}

namespace {

bool same_lineage(const LineageRecord& a, const LineageRecord& b) {
  if (a.parents.size() != b.parents.size()) return false;
  for (std::size_t i = 0; i < a.parents.size(); ++i) {
    const auto& p = a.parents[i];
    const auto& q = b.parents[i];
    if (!same_bits(p.fitness, q.fitness) || !same_values(p.selected, q.selected) ||
        !same_values(p.crossed, q.crossed) || !same_values(p.mutated, q.mutated)) {
      return false;
    }
  }
  return same_values(a.crossover_z, b.crossover_z) && same_values(a.crossover_q, b.crossover_q);
}

bool same_population(const Population& a, const Population& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.members[i].chromosome != b.members[i].chromosome ||
        !same_bits(a.members[i].fitness, b.members[i].fitness)) {
      return false;
    }
  }
  return true;
}

std::string trace_csv(const io::RunOutcome& o) {
  std::ostringstream os;
  io::write_csv(os, o.trace);
  return os.str();
}

}  // namespace

PropertyReport determinism_property(std::uint64_t seed, std::size_t cases) {
  PropertyReport rep;
  rep.name = "determinism under fixed seeds";
  for (std::size_t k = 0; k < cases; ++k) {
    Gen g(seed, k);
    CaseCheck check(rep, k);
    switch (k % 4) {
      case 0:
      case 1: {
        const std::size_t length = g.integer(2, 24);
        const GAConfig cfg = random_ga(g, 16);
        const auto fit = random_landscape(g, length);
        EvolutionEngine e1(cfg, length, fit), e2(cfg, length, fit);
        Population p1 = e1.random_population(cfg.population_size);
        Population p2 = e2.random_population(cfg.population_size);
        check.require(same_population(p1, p2), "initial populations differ");
        for (std::size_t gen = 0; gen < 5 && !check.failed(); ++gen) {
          auto o1 = e1.evolve_generation(p1);
          auto o2 = e2.evolve_generation(p2);
          check.require(same_lineage(o1.lineage, o2.lineage), "lineage differs at generation ", gen);
          const auto d1 = decompose(o1.lineage);
          const auto d2 = decompose(o2.lineage);
          check.require(same_bits(d1.term_sum(), d2.term_sum()) &&
                            same_bits(d1.crossover_sigma, d2.crossover_sigma),
                        "Price terms differ at generation ", gen);
          p1 = std::move(o1.next);
          p2 = std::move(o2.next);
          check.require(same_population(p1, p2), "populations differ at generation ", gen);
        }
        break;
      }
      case 2: {
        const auto names = problem_names();
        const std::string name(names[g.integer(0, names.size() - 1)]);
        const BenchmarkProblem p = make_problem(name, g.integer(1, 3));
        GAConfig ga;
        ga.population_size = 2 * g.integer(2, 6);
        ga.overlap_fraction = 0.25;
        ga.rng_seed = g.next();
        SQPConfig sqp;
        sqp.stop_rule = g.coin() ? StopRule::Delta : StopRule::Absolute;
        sqp.max_iter = 30;
        SwitchCriteria crit;
        crit.max_generations = g.integer(2, 8);
        const HybridResult a = run_hybrid(p, ga, sqp, crit);
        const HybridResult b = run_hybrid(p, ga, sqp, crit);
        check.require(same_values(a.x_star, b.x_star) && same_bits(a.f_star, b.f_star),
                      name, ": final points differ");
        check.require(a.trace.size() == b.trace.size(), name, ": trace lengths differ");
        for (std::size_t i = 0; i < std::min(a.trace.size(), b.trace.size()); ++i) {
          const auto& r = a.trace[i];
          const auto& s = b.trace[i];
          check.require(r.phase == s.phase && r.step == s.step && same_bits(r.best, s.best) &&
                            same_bits(r.mean, s.mean) && r.evaluations == s.evaluations,
                        name, ": trace row ", i, " differs");
        }
        check.require(a.evaluations.total() == b.evaluations.total(), name, ": evaluation counts differ");
        break;
      }
      default: {
        io::RunConfig cfg;
        const auto names = problem_names();
        cfg.problem = std::string(names[g.integer(0, names.size() - 1)]);
        cfg.dimension = g.integer(1, 3);
        cfg.mode = static_cast<io::RunMode>(g.integer(0, 2));
        cfg.ga.population_size = 2 * g.integer(2, 6);
        cfg.ga.overlap_fraction = 0.25;
        cfg.ga.max_generations = g.integer(2, 6);
        cfg.switching.max_generations = cfg.ga.max_generations;
        cfg.sqp.max_iter = 20;
        cfg.seed = g.next() >> 1;
        const auto a = io::execute_run(cfg, 0);
        const auto b = io::execute_run(cfg, 0);
        check.require(a.ok && b.ok, cfg.problem, ": run failed: ", a.error);
        check.require(trace_csv(a) == trace_csv(b), cfg.problem, " ", io::mode_name(cfg.mode),
                      ": trace CSVs differ");
      }
    }
  }
  return rep;
}

}  // namespace memetic::testing
