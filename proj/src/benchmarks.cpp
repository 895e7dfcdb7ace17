#include "memetic/benchmarks.hpp"

#include <stdexcept>
#include <string>

namespace memetic {

BenchmarkProblem::BenchmarkProblem(std::string name, BoundBox bounds, Orientation orientation,
                                   ValueFn value, ad::ADFunction ad_value,
                                   double known_optimum_value,
                                   std::optional<std::vector<double>> known_optimizer)
    : name_(std::move(name)),
      bounds_(std::move(bounds)),
      orientation_(orientation),
      value_(std::move(value)),
      ad_value_(std::move(ad_value)),
      known_optimum_value_(known_optimum_value),
      known_optimizer_(std::move(known_optimizer)) {
  if (bounds_.size() == 0) throw std::invalid_argument("BenchmarkProblem: dimension must be >= 1");
  if (known_optimizer_ && known_optimizer_->size() != bounds_.size()) {
    throw std::invalid_argument("BenchmarkProblem: optimizer dimension mismatch");
  }
}

double BenchmarkProblem::value(std::span<const double> x) const {
  if (x.size() != dimension()) throw std::invalid_argument("BenchmarkProblem: dimension mismatch");
  return value_(x);
}

ad::Derivatives BenchmarkProblem::derivatives(std::span<const double> x) const {
  if (x.size() != dimension()) throw std::invalid_argument("BenchmarkProblem: dimension mismatch");
  return ad::evaluate(ad_value_, x);
}

namespace {

constexpr std::string_view kNames[] = {"ackley", "rastrigin", "schwefel", "schwefel-max"};

std::string registry_list() {
  std::string s;
  for (auto n : kNames) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

}  // namespace

std::vector<std::string_view> problem_names() {
  return {std::begin(kNames), std::end(kNames)};
}

BenchmarkProblem make_problem(std::string_view name, std::size_t n) {
  if (n == 0) throw std::invalid_argument("make_problem: dimension must be >= 1");
  const double dn = static_cast<double>(n);
  if (name == "ackley") {
    return BenchmarkProblem("ackley", BoundBox::uniform(n, -15.0, 30.0), Orientation::Minimize,
                            bench::ackley<double>, bench::ackley<ad::ADScalar>, 0.0,
                            std::vector<double>(n, 0.0));
  }
  if (name == "rastrigin") {
    return BenchmarkProblem("rastrigin", BoundBox::uniform(n, -5.12, 5.12),
                            Orientation::Minimize, bench::rastrigin<double>,
                            bench::rastrigin<ad::ADScalar>, 0.0, std::vector<double>(n, 0.0));
  }
  if (name == "schwefel") {
    // The offset constant is rounded, so the minimum sits slightly above 0.
    return BenchmarkProblem("schwefel", BoundBox::uniform(n, -500.0, 500.0),
                            Orientation::Minimize, bench::schwefel_min<double>,
                            bench::schwefel_min<ad::ADScalar>,
                            (kSchwefelOffset - kSchwefelPeak) * dn,
                            std::vector<double>(n, kSchwefelArgmax));
  }
  if (name == "schwefel-max") {
    return BenchmarkProblem("schwefel-max", BoundBox::uniform(n, -500.0, 500.0),
                            Orientation::Maximize, bench::schwefel_max<double>,
                            bench::schwefel_max<ad::ADScalar>, kSchwefelPeak * dn,
                            std::vector<double>(n, kSchwefelArgmax));
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) +
                              "'; registered problems: " + registry_list());
}

}  // namespace memetic
