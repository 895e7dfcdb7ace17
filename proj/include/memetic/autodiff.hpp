#pragma once

// Vectorized forward-mode automatic differentiation. Each ADScalar carries
// its value, the gradient with respect to all n independent variables, and
// the dense n x n Hessian, so one forward sweep of an expression yields exact
// first and second derivatives.
//
// Unary functions f propagate as
//   value  f(v)
//   grad   f'(v) * grad(v)
//   hess   f'(v) * hess(v) + f''(v) * grad(v) grad(v)^T
// and products use the symmetric product rule. Hessians are kept exactly
// symmetric: only the upper triangle is computed and then mirrored.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memetic::ad {

/// A domain violation inside an elementary operation (log of a non-positive
/// value, division by zero, ...).
class EvaluationError : public std::domain_error {
 public:
  EvaluationError(std::string op, double value);

  const std::string& op() const noexcept { return op_; }
  double value() const noexcept { return value_; }

 private:
  std::string op_;
  double value_;
};

/// Operands built for different numbers of independent variables.
class DimensionMismatch : public std::logic_error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs);
};

class ADScalar {
 public:
  ADScalar() = default;

  /// Independent variable `index` of n, seeded with the unit gradient.
  static ADScalar variable(std::size_t n, std::size_t index, double x0);
  static ADScalar constant(std::size_t n, double c);

  double value() const noexcept { return value_; }
  std::size_t dim() const noexcept { return n_; }
  std::span<const double> grad() const noexcept { return grad_; }
  /// Row-major n x n.
  std::span<const double> hess() const noexcept { return hess_; }
  double hess(std::size_t i, std::size_t j) const noexcept { return hess_[i * n_ + j]; }

  /// Set when the value passed through sqrt or abs exactly at zero, where
  /// the derivative fields are defined as zero.
  bool nonsmooth() const noexcept { return nonsmooth_; }

  ADScalar& operator+=(const ADScalar& rhs);
  ADScalar& operator-=(const ADScalar& rhs);
  ADScalar& operator*=(const ADScalar& rhs);
  ADScalar& operator/=(const ADScalar& rhs);

  ADScalar& operator+=(double c) noexcept;
  ADScalar& operator-=(double c) noexcept;
  ADScalar& operator*=(double c);
  ADScalar& operator/=(double c);

  /// In-place chain rule with precomputed f(v), f'(v), f''(v).
  ADScalar& apply_unary(const char* op, double f0, double f1, double f2);

  void mark_nonsmooth() noexcept { nonsmooth_ = true; }

 private:
  ADScalar(std::size_t n, double value);
  void check_same_dim(const ADScalar& rhs) const;

  double value_ = 0.0;
  std::size_t n_ = 0;
  std::vector<double> grad_;
  std::vector<double> hess_;
  bool nonsmooth_ = false;
};

ADScalar operator-(ADScalar a);

ADScalar operator+(ADScalar a, const ADScalar& b);
ADScalar operator-(ADScalar a, const ADScalar& b);
ADScalar operator*(ADScalar a, const ADScalar& b);
ADScalar operator/(ADScalar a, const ADScalar& b);

ADScalar operator+(ADScalar a, double c);
ADScalar operator+(double c, ADScalar a);
ADScalar operator-(ADScalar a, double c);
ADScalar operator-(double c, ADScalar a);
ADScalar operator*(ADScalar a, double c);
ADScalar operator*(double c, ADScalar a);
ADScalar operator/(ADScalar a, double c);
ADScalar operator/(double c, ADScalar a);

ADScalar sin(ADScalar a);
ADScalar cos(ADScalar a);
ADScalar exp(ADScalar a);
ADScalar log(ADScalar a);
ADScalar sqrt(ADScalar a);
ADScalar abs(ADScalar a);
ADScalar powi(ADScalar a, int k);
ADScalar pow(ADScalar a, double p);

struct ADContext {
  std::size_t n = 0;

  ADScalar variable(std::size_t index, double x0) const {
    return ADScalar::variable(n, index, x0);
  }
  ADScalar constant(double c) const { return ADScalar::constant(n, c); }
  /// All n independent variables seeded at x0.
  std::vector<ADScalar> variables(std::span<const double> x0) const;
};

struct Derivatives {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;  // row-major n x n
  bool nonsmooth = false;

  double hess_at(std::size_t i, std::size_t j) const { return hess[i * grad.size() + j]; }
};

using ADFunction = std::function<ADScalar(std::span<const ADScalar>)>;

/// Seeds the variables at x0 and runs f once.
Derivatives evaluate(const ADFunction& f, std::span<const double> x0);

}  // namespace memetic::ad
