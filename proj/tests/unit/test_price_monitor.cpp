#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memetic/price_monitor.hpp"

using namespace memetic;

namespace {

ParentLineage parent(double q, std::vector<double> crossed, std::vector<double> mutated) {
  ParentLineage p;
  p.fitness = q;
  p.selected.assign(crossed.size(), q);
  p.crossed = std::move(crossed);
  p.mutated = std::move(mutated);
  return p;
}

}  // namespace

TEST_CASE("selection covariance term") {
  const std::vector<double> z = {2, 0};
  const std::vector<double> q = {5, 1};
  CHECK(selection_term(z, q) == 2.0);
  const std::vector<double> twos = {2, 2, 2, 2};
  const std::vector<double> q4 = {1, 7, 3, 9};
  CHECK(selection_term(twos, q4) == 0.0);
  const std::vector<double> zr = {3, 0, 1, 0};
  const std::vector<double> flat = {4, 4, 4, 4};
  CHECK(selection_term(zr, flat) == 0.0);
  const std::vector<double> zeros = {0, 0};
  CHECK_THROWS_AS(selection_term(zeros, q), std::domain_error);
  const std::vector<double> shorter = {1};
  CHECK_THROWS_AS(selection_term(shorter, q), std::invalid_argument);
}

TEST_CASE("operator transmission terms") {
  LineageRecord lin;
  lin.parents = {parent(1.0, {2.0, 2.0}, {2.0, 2.0}), parent(3.0, {4.0, 4.0}, {4.0, 4.0})};
  CHECK(operator_term(lin, Stage::Selection) == 0.0);
  CHECK(operator_term(lin, Stage::Crossover) == 1.0);
  CHECK(operator_term(lin, Stage::Mutation) == 0.0);

  LineageRecord copy;
  copy.parents = {parent(1.0, {1.0}, {1.5}), parent(2.0, {2.0}, {1.0})};
  CHECK(operator_term(copy, Stage::Crossover) == 0.0);
  CHECK(operator_term(copy, Stage::Mutation) == doctest::Approx(-0.25));
}

TEST_CASE("transmission spread") {
  LineageRecord lin;
  lin.parents = {parent(0.0, {1.0}, {1.0}), parent(0.0, {-1.0}, {-1.0})};
  CHECK(operator_term(lin, Stage::Crossover) == 0.0);
  CHECK(operator_term_sigma(lin, Stage::Crossover) == 1.0);
  CHECK(operator_term_sigma(lin, Stage::Mutation) == 0.0);

  LineageRecord shift;
  shift.parents = {parent(0.0, {0.5, 0.5}, {0.5, 0.5}), parent(1.0, {}, {}), parent(2.0, {2.5}, {2.5})};
  CHECK(operator_term(shift, Stage::Crossover) == doctest::Approx(0.5));
  CHECK(operator_term_sigma(shift, Stage::Crossover) == doctest::Approx(0.0));
}

TEST_CASE("sigma width is twice sigma") {
  CHECK(sigma_width(123.0, 0.0) == 0.0);
  CHECK(sigma_width(5.0, 0.3) == doctest::Approx(0.6));
  CHECK(sigma_width(-5.0, 0.3) == doctest::Approx(0.6));
}

TEST_CASE("decomposition identity on a hand-built generation") {
  LineageRecord lin;
  lin.parents = {parent(1.0, {3.0, 0.5}, {2.5, 0.5}), parent(2.0, {}, {}), parent(4.0, {4.0}, {5.0}),
                 parent(0.0, {}, {})};
  const auto c = decompose(lin);
  // parents mean 7/4; children after mutation 8/3.
  CHECK(c.total_delta_Q == doctest::Approx(8.0 / 3.0 - 7.0 / 4.0));
  CHECK(c.selection_term == doctest::Approx(2.0 - 7.0 / 4.0));
  CHECK(c.term_sum() == doctest::Approx(c.total_delta_Q).epsilon(1e-12));
  CHECK(stage_deltas(lin, Stage::Crossover) == std::vector<double>{2.0, -0.5, 0.0});
}

TEST_CASE("crossover covariance term under the lemma") {
  LineageRecord lin;
  lin.crossover_z = {2, 2, 2, 2};
  lin.crossover_q = {1, 5, 2, 8};
  CHECK(crossover_selection_term(lin) == 0.0);
  lin.crossover_z = {2, 2, 1, 1};
  CHECK(crossover_selection_term(lin) != 0.0);
}

TEST_CASE("debounced convergence") {
  ConvergenceState s;
  s.window = 1;
  const double w1[] = {0.5, 0.2, 0.009};
  for (std::size_t g = 0; g < 3; ++g) update_convergence(s, w1[g], g + 1);
  REQUIRE(s.converged());
  CHECK(*s.converged_at == 3);

  ConvergenceState high;
  for (std::size_t g = 1; g <= 10; ++g) update_convergence(high, 0.5, g);
  CHECK_FALSE(high.converged());

  ConvergenceState d;
  d.window = 3;
  const double w2[] = {0.009, 0.5, 0.009, 0.009, 0.009};
  for (std::size_t g = 0; g < 5; ++g) {
    update_convergence(d, w2[g], g + 1);
    if (g < 4) CHECK_FALSE(d.converged());
  }
  REQUIRE(d.converged());
  CHECK(*d.converged_at == 5);
  update_convergence(d, 0.001, 6);
  CHECK(*d.converged_at == 5);
}
