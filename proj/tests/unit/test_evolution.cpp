#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "frozen_values.hpp"
#include "memetic/evolution.hpp"

using namespace memetic;
namespace frozen = memetic::testing::frozen;

namespace {

std::vector<double> shares(const std::vector<std::size_t>& picks, std::size_t n) {
  std::vector<double> s(n, 0.0);
  for (auto i : picks) s[i] += 1.0 / static_cast<double>(picks.size());
  return s;
}

double ones_fraction(const Chromosome& c) {
  double k = 0;
  for (std::size_t i = 0; i < c.size(); ++i) k += c[i];
  return k;
}

Population make_population(const std::vector<double>& fitness, std::size_t length) {
  Population p;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    Individual ind;
    ind.chromosome = Chromosome(length);
    for (std::size_t b = 0; b < length; ++b) ind.chromosome.set(b, (i >> (b % 16)) & 1);
    ind.fitness = fitness[i];
    ind.id = i;
    p.members.push_back(ind);
  }
  return p;
}

}  // namespace

TEST_CASE("roulette wheel follows fitness proportions") {
  Rng rng(11);
  const std::vector<double> equal = {1, 1, 1, 1};
  for (double s : shares(roulette_select(equal, 100000, rng), 4)) CHECK(s == doctest::Approx(0.25).epsilon(0.02));
  const std::vector<double> two = {3, 1};
  CHECK(shares(roulette_select(two, 100000, rng), 2)[0] ==
        doctest::Approx(frozen::kRouletteBestShare).epsilon(0.02 / 0.75));
  const std::vector<double> one = {5};
  for (auto i : roulette_select(one, 50, rng)) CHECK(i == 0);
  // Non-positive fitness is shifted, so the worst member is almost never picked.
  const std::vector<double> neg = {-4, -1, 2};
  const auto s = shares(roulette_select(neg, 20000, rng), 3);
  CHECK(s[0] < 1e-3);
  CHECK(s[2] > s[1]);
}

TEST_CASE("binary tournament without replacement") {
  Rng rng(12);
  const std::vector<double> f = {4, 3, 2, 1};
  const auto s = shares(tournament_select(f, 2, 100000, rng), 4);
  CHECK(std::abs(s[0] - frozen::kTournamentBestShare) <= 0.02);
  CHECK(s[3] < 1e-12);  // the worst never wins a strict tournament
  for (auto i : tournament_select(f, 4, 100, rng)) CHECK(i == 0);
  for (double v : shares(tournament_select(f, 1, 100000, rng), 4)) CHECK(v == doctest::Approx(0.25).epsilon(0.02 / 0.25));
  CHECK_THROWS_AS(tournament_select(f, 5, 1, rng), std::invalid_argument);
}

TEST_CASE("single point crossover") {
  const auto p1 = Chromosome::from_string("1010110");
  const auto p2 = Chromosome::from_string("0101101");
  const auto [o1, o2] = single_point_crossover(p1, p2, 3);
  CHECK(o1.to_string() == "1011101");
  CHECK(o2.to_string() == "0100110");

  const auto [a, b] = single_point_crossover(p1, p1, 4);
  CHECK(a == p1);
  CHECK(b == p1);

  const auto [c, d] = single_point_crossover(p1, p2, 6);
  CHECK(c.to_string() == "1010111");
  CHECK(d.to_string() == "0101100");
}

TEST_CASE("bit flip mutation") {
  Rng rng(13);
  const auto c = Chromosome::from_string("1100101");
  CHECK(bit_flip_mutation(c, 0.0, rng) == c);
  CHECK(bit_flip_mutation(c, 1.0, rng).to_string() == "0011010");
  const Chromosome zero(100);
  double total = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) total += ones_fraction(bit_flip_mutation(zero, 0.01, rng));
  CHECK(total / trials == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fitness statistics") {
  const std::vector<double> a = {2, 2, 2};
  const auto s = fitness_stats(a);
  CHECK(s.mean == 2.0);
  CHECK(s.variance == 0.0);
  const std::vector<double> b = {1, 3};
  CHECK(fitness_stats(b).mean == 2.0);
  CHECK(fitness_stats(b).variance == 1.0);
  const std::vector<double> c = {838};
  const auto t = fitness_stats(c);
  CHECK((t.best == 838 && t.worst == 838 && t.mean == 838));
}

TEST_CASE("selection diagnostics") {
  FitnessStats prev{2.0, 1.0, 3.0, 1.0};
  FitnessStats cur{2.0, 1.0, 3.0, 1.0};
  FitnessStats sel{3.0, 0.5, 3.0, 2.0};
  const auto d = selection_diagnostics(prev, cur, sel);
  CHECK(d.differential == 1.0);
  REQUIRE(d.intensity.has_value());
  CHECK(*d.intensity == 1.0);
  CHECK(d.response == 0.0);
  const auto same = selection_diagnostics(prev, cur, cur);
  CHECK(same.differential == 0.0);
  CHECK(*same.intensity == 0.0);
  FitnessStats flat{1.0, 0.0, 1.0, 1.0};
  CHECK_FALSE(selection_diagnostics(flat, flat, flat).intensity.has_value());
}

TEST_CASE("adaptive elitism") {
  GAConfig cfg;
  cfg.population_size = 10;
  cfg.overlap_fraction = 0.5;
  EliteState state = EliteState::from_config(cfg);
  CHECK(state.count == 5);

  const auto parents = make_population({9, 8, 7, 6, 5, 4, 3, 2, 1, 0}, 8);
  const auto worse = make_population({-1, -2, -3, -4, -5, -6, -7, -8, -9, -10}, 8);
  const auto next = adaptive_elitism_replace(parents, worse, state);
  CHECK(next.size() == 10);
  for (double f : {9.0, 8.0, 7.0, 6.0, 5.0}) {
    CHECK(std::any_of(next.members.begin(), next.members.end(), [&](const Individual& m) { return m.fitness == f; }));
  }
  CHECK(next.members[next.best_index()].fitness == 9.0);

  // Offspring better in mean and variance: the elite shrinks, floored at 1.
  const auto better = make_population({30, 1, 25, 2, 20, 3, 15, 4, 10, 5}, 8);
  std::size_t last = state.count;
  for (int i = 0; i < 6; ++i) {
    bool shrunk = false;
    adaptive_elitism_replace(parents, better, state, &shrunk);
    CHECK(shrunk);
    CHECK(state.count <= last);
    CHECK(state.count >= 1);
    last = state.count;
  }
  CHECK(state.count == 1);

  EliteState frac{8, 0.5, EliteShrinkRule::FractionOfElite};
  frac.shrink();
  CHECK(frac.count == 4);
}

TEST_CASE("generation without variation keeps parents only") {
  GAConfig cfg;
  cfg.population_size = 10;
  cfg.crossover_rate = 0.0;
  cfg.mutation_rate = 0.0;
  cfg.overlap_fraction = 0.95;
  cfg.rng_seed = 3;
  CHECK(cfg.initial_elite_count() == 10);
  auto fit = [](const Chromosome& c) { return ones_fraction(c); };
  EvolutionEngine engine(cfg, 12, fit);
  auto pop = engine.random_population(10);
  std::map<std::string, int> original;
  for (const auto& m : pop.members) original[m.chromosome.to_string()]++;
  double mean = fitness_stats(pop).mean;
  for (int g = 0; g < 5; ++g) {
    auto out = engine.evolve_generation(pop);
    for (const auto& m : out.next.members) CHECK(original.count(m.chromosome.to_string()) == 1);
    CHECK(out.stats.mean >= mean);
    mean = out.stats.mean;
    pop = std::move(out.next);
  }
}

TEST_CASE("lineage accounting") {
  GAConfig cfg;
  cfg.population_size = 8;
  cfg.crossover_rate = 1.0;
  cfg.overlap_fraction = 0.25;
  cfg.rng_seed = 4;
  auto fit = [](const Chromosome& c) { return ones_fraction(c) + 1.0; };
  EvolutionEngine engine(cfg, 16, fit);
  auto pop = engine.random_population(8);
  auto out = engine.evolve_generation(pop);
  CHECK(out.lineage.offspring_total() == 8);
  double z = 0.0;
  for (double v : out.lineage.offspring_counts()) z += v;
  CHECK(z == 8.0);
  for (double v : out.lineage.crossover_z) CHECK(v == 2.0);
  // Children changed by mutation are evaluated twice: after crossover and
  // after mutation.
  CHECK(out.evaluations >= 8);
  CHECK(out.evaluations <= 16);
  CHECK(engine.evaluations() == 8 + out.evaluations);
}

TEST_CASE("configuration validation") {
  GAConfig cfg;
  cfg.population_size = 7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.population_size = 10;
  cfg.overlap_fraction = 0.05;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.overlap_fraction = 0.1;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.effective_mutation_rate(50) == doctest::Approx(0.02));
}
