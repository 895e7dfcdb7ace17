#pragma once

// Benchmark objectives, written once as templates so the same expression runs
// on plain doubles (EC phase) and on ADScalar (local search, derivative
// checks).

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memetic/autodiff.hpp"
#include "memetic/bounds.hpp"

namespace memetic {

enum class Orientation { Minimize, Maximize };

/// Constant in the generalized Schwefel minimization form.
inline constexpr double kSchwefelOffset = 418.9829;
/// Argmax of x * sin(sqrt(|x|)) on [-500, 500].
inline constexpr double kSchwefelArgmax = 420.968746359982;
/// Its value.
inline constexpr double kSchwefelPeak = 418.982887272433706;

namespace bench {

inline double constant_like(double, double c) { return c; }
inline ad::ADScalar constant_like(const ad::ADScalar& ref, double c) {
  return ad::ADScalar::constant(ref.dim(), c);
}

template <class T>
T ackley(std::span<const T> x) {
  using std::cos;
  using std::exp;
  using std::sqrt;
  const double n = static_cast<double>(x.size());
  T squares = constant_like(x[0], 0.0);
  T cosines = constant_like(x[0], 0.0);
  for (const T& xi : x) {
    squares += xi * xi;
    cosines += cos(2.0 * std::numbers::pi * xi);
  }
  return 20.0 + std::numbers::e - 20.0 * exp(-0.2 * sqrt(squares / n)) - exp(cosines / n);
}

template <class T>
T rastrigin(std::span<const T> x) {
  using std::cos;
  T acc = constant_like(x[0], 10.0 * static_cast<double>(x.size()));
  for (const T& xi : x) {
    acc += xi * xi;
    acc -= 10.0 * cos(2.0 * std::numbers::pi * xi);
  }
  return acc;
}

/// sum x_i sin(sqrt(|x_i|)), the maximization form.
template <class T>
T schwefel_sum(std::span<const T> x) {
  using std::abs;
  using std::sin;
  using std::sqrt;
  T acc = constant_like(x[0], 0.0);
  for (const T& xi : x) acc += xi * sin(sqrt(abs(xi)));
  return acc;
}

template <class T>
T schwefel_min(std::span<const T> x) {
  return kSchwefelOffset * static_cast<double>(x.size()) - schwefel_sum(x);
}

template <class T>
T schwefel_max(std::span<const T> x) {
  return schwefel_sum(x);
}

}  // namespace bench

/// An objective with bounds, orientation and known optimum. Values are always
/// reported in the problem's native orientation; fitness() converts to the
/// maximization convention used by the evolutionary engine.
class BenchmarkProblem {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;

  BenchmarkProblem(std::string name, BoundBox bounds, Orientation orientation,
                   ValueFn value, ad::ADFunction ad_value, double known_optimum_value,
                   std::optional<std::vector<double>> known_optimizer = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return bounds_.size(); }
  const BoundBox& bounds() const noexcept { return bounds_; }
  Orientation orientation() const noexcept { return orientation_; }
  double known_optimum_value() const noexcept { return known_optimum_value_; }
  const std::optional<std::vector<double>>& known_optimizer() const noexcept {
    return known_optimizer_;
  }

  double value(std::span<const double> x) const;
  ad::Derivatives derivatives(std::span<const double> x) const;
  const ad::ADFunction& ad_function() const noexcept { return ad_value_; }

  double fitness(double native) const noexcept {
    return orientation_ == Orientation::Maximize ? native : -native;
  }
  double native(double fitness) const noexcept { return this->fitness(fitness); }
  /// True if native value a is strictly better than b.
  bool better(double a, double b) const noexcept { return fitness(a) > fitness(b); }

 private:
  std::string name_;
  BoundBox bounds_;
  Orientation orientation_;
  ValueFn value_;
  ad::ADFunction ad_value_;
  double known_optimum_value_;
  std::optional<std::vector<double>> known_optimizer_;
};

/// Names accepted by make_problem.
std::vector<std::string_view> problem_names();

/// Registry lookup: "ackley", "rastrigin", "schwefel" (minimization form) and
/// "schwefel-max". Throws std::invalid_argument naming the registry when the
/// name is unknown.
BenchmarkProblem make_problem(std::string_view name, std::size_t dimension);

}  // namespace memetic
