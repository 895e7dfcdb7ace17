#include "memetic/autodiff.hpp"

#include <cmath>
#include <sstream>

#include "memetic/kernels.hpp"

namespace memetic::ad {
namespace {

std::string describe(const std::string& op, double value) {
  std::ostringstream os;
  os << "autodiff: " << op << " is undefined at " << value;
  return os.str();
}

void require_finite(const char* op, double v, double f0, double f1, double f2) {
  if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2)) {
    throw EvaluationError(op, v);
  }
}

}  // namespace

EvaluationError::EvaluationError(std::string op, double value)
    : std::domain_error(describe(op, value)), op_(std::move(op)), value_(value) {}

DimensionMismatch::DimensionMismatch(std::size_t lhs, std::size_t rhs)
    : std::logic_error("autodiff: operands have " + std::to_string(lhs) + " and " +
                       std::to_string(rhs) + " independent variables") {}

ADScalar::ADScalar(std::size_t n, double value)
    : value_(value), n_(n), grad_(n, 0.0), hess_(n * n, 0.0) {}

ADScalar ADScalar::variable(std::size_t n, std::size_t index, double x0) {
  if (index >= n) {
    throw std::out_of_range("autodiff: variable index " + std::to_string(index) +
                            " out of range for n = " + std::to_string(n));
  }
  ADScalar v(n, x0);
  v.grad_[index] = 1.0;
  return v;
}

ADScalar ADScalar::constant(std::size_t n, double c) { return ADScalar(n, c); }

void ADScalar::check_same_dim(const ADScalar& rhs) const {
  if (n_ != rhs.n_) throw DimensionMismatch(n_, rhs.n_);
}

ADScalar& ADScalar::operator+=(const ADScalar& rhs) {
  check_same_dim(rhs);
  const auto& k = kernels::active();
  value_ += rhs.value_;
  k.axpby(grad_.data(), grad_.data(), 1.0, rhs.grad_.data(), 1.0, n_);
  k.axpby(hess_.data(), hess_.data(), 1.0, rhs.hess_.data(), 1.0, n_ * n_);
  nonsmooth_ = nonsmooth_ || rhs.nonsmooth_;
  return *this;
}

ADScalar& ADScalar::operator-=(const ADScalar& rhs) {
  check_same_dim(rhs);
  const auto& k = kernels::active();
  value_ -= rhs.value_;
  k.axpby(grad_.data(), grad_.data(), 1.0, rhs.grad_.data(), -1.0, n_);
  k.axpby(hess_.data(), hess_.data(), 1.0, rhs.hess_.data(), -1.0, n_ * n_);
  nonsmooth_ = nonsmooth_ || rhs.nonsmooth_;
  return *this;
}

ADScalar& ADScalar::operator*=(const ADScalar& rhs) {
  check_same_dim(rhs);
  const auto& k = kernels::active();
  const double a = value_;
  const double b = rhs.value_;
  // Hessian first: it needs the original gradient of *this.
  k.sym_product(hess_.data(), hess_.data(), b, rhs.hess_.data(), a, grad_.data(),
                rhs.grad_.data(), n_);
  k.axpby(grad_.data(), grad_.data(), b, rhs.grad_.data(), a, n_);
  value_ = a * b;
  if (!std::isfinite(value_)) throw EvaluationError("mul", a);
  nonsmooth_ = nonsmooth_ || rhs.nonsmooth_;
  return *this;
}

ADScalar& ADScalar::operator/=(const ADScalar& rhs) {
  check_same_dim(rhs);
  const double v = rhs.value_;
  if (v == 0.0) throw EvaluationError("div", v);
  ADScalar inv = rhs;
  inv.apply_unary("div", 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
  return *this *= inv;
}

ADScalar& ADScalar::operator+=(double c) noexcept {
  value_ += c;
  return *this;
}

ADScalar& ADScalar::operator-=(double c) noexcept {
  value_ -= c;
  return *this;
}

ADScalar& ADScalar::operator*=(double c) {
  const auto& k = kernels::active();
  value_ *= c;
  k.axpby(grad_.data(), grad_.data(), c, grad_.data(), 0.0, n_);
  k.axpby(hess_.data(), hess_.data(), c, hess_.data(), 0.0, n_ * n_);
  return *this;
}

ADScalar& ADScalar::operator/=(double c) {
  if (c == 0.0) throw EvaluationError("div", c);
  return *this *= (1.0 / c);
}

ADScalar& ADScalar::apply_unary(const char* op, double f0, double f1, double f2) {
  require_finite(op, value_, f0, f1, f2);
  const auto& k = kernels::active();
  k.sym_scale_rank1(hess_.data(), hess_.data(), f1, grad_.data(), f2, n_);
  k.axpby(grad_.data(), grad_.data(), f1, grad_.data(), 0.0, n_);
  value_ = f0;
  return *this;
}

ADScalar operator-(ADScalar a) {
  a *= -1.0;
  return a;
}

ADScalar operator+(ADScalar a, const ADScalar& b) { return a += b; }
ADScalar operator-(ADScalar a, const ADScalar& b) { return a -= b; }
ADScalar operator*(ADScalar a, const ADScalar& b) { return a *= b; }
ADScalar operator/(ADScalar a, const ADScalar& b) { return a /= b; }

ADScalar operator+(ADScalar a, double c) { return a += c; }
ADScalar operator+(double c, ADScalar a) { return a += c; }
ADScalar operator-(ADScalar a, double c) { return a -= c; }
ADScalar operator-(double c, ADScalar a) {
  a *= -1.0;
  return a += c;
}
ADScalar operator*(ADScalar a, double c) { return a *= c; }
ADScalar operator*(double c, ADScalar a) { return a *= c; }
ADScalar operator/(ADScalar a, double c) { return a /= c; }
ADScalar operator/(double c, ADScalar a) {
  const double v = a.value();
  if (v == 0.0) throw EvaluationError("div", v);
  a.apply_unary("div", c / v, -c / (v * v), 2.0 * c / (v * v * v));
  return a;
}

ADScalar sin(ADScalar a) {
  const double v = a.value();
  const double s = std::sin(v);
  const double c = std::cos(v);
  a.apply_unary("sin", s, c, -s);
  return a;
}

ADScalar cos(ADScalar a) {
  const double v = a.value();
  const double s = std::sin(v);
  const double c = std::cos(v);
  a.apply_unary("cos", c, -s, -c);
  return a;
}

ADScalar exp(ADScalar a) {
  const double e = std::exp(a.value());
  a.apply_unary("exp", e, e, e);
  return a;
}

ADScalar log(ADScalar a) {
  const double v = a.value();
  if (!(v > 0.0)) throw EvaluationError("log", v);
  a.apply_unary("log", std::log(v), 1.0 / v, -1.0 / (v * v));
  return a;
}

ADScalar sqrt(ADScalar a) {
  const double v = a.value();
  if (v < 0.0) throw EvaluationError("sqrt", v);
  if (v == 0.0) {
    a.apply_unary("sqrt", 0.0, 0.0, 0.0);
    a.mark_nonsmooth();
    return a;
  }
  const double r = std::sqrt(v);
  a.apply_unary("sqrt", r, 0.5 / r, -0.25 / (v * r));
  return a;
}

ADScalar abs(ADScalar a) {
  const double v = a.value();
  if (v == 0.0) {
    a.apply_unary("abs", 0.0, 0.0, 0.0);
    a.mark_nonsmooth();
    return a;
  }
  a.apply_unary("abs", std::abs(v), v > 0.0 ? 1.0 : -1.0, 0.0);
  return a;
}

ADScalar powi(ADScalar a, int k) {
  const double v = a.value();
  if (k == 0) {
    a.apply_unary("powi", 1.0, 0.0, 0.0);
    return a;
  }
  if (k < 0 && v == 0.0) throw EvaluationError("powi", v);
  const double dk = static_cast<double>(k);
  const double f0 = std::pow(v, k);
  const double f1 = dk * std::pow(v, k - 1);
  const double f2 = k == 1 ? 0.0 : dk * (dk - 1.0) * std::pow(v, k - 2);
  a.apply_unary("powi", f0, f1, f2);
  return a;
}

ADScalar pow(ADScalar a, double p) {
  const double v = a.value();
  if (!(v > 0.0)) throw EvaluationError("pow", v);
  a.apply_unary("pow", std::pow(v, p), p * std::pow(v, p - 1.0),
                p * (p - 1.0) * std::pow(v, p - 2.0));
  return a;
}

std::vector<ADScalar> ADContext::variables(std::span<const double> x0) const {
  if (x0.size() != n) throw DimensionMismatch(n, x0.size());
  std::vector<ADScalar> vars;
  vars.reserve(n);
  for (std::size_t i = 0; i < n; ++i) vars.push_back(ADScalar::variable(n, i, x0[i]));
  return vars;
}

Derivatives evaluate(const ADFunction& f, std::span<const double> x0) {
  const ADContext ctx{x0.size()};
  const auto vars = ctx.variables(x0);
  ADScalar r = f(vars);
  if (r.dim() != x0.size()) throw DimensionMismatch(x0.size(), r.dim());
  Derivatives d;
  d.value = r.value();
  d.grad.assign(r.grad().begin(), r.grad().end());
  d.hess.assign(r.hess().begin(), r.hess().end());
  d.nonsmooth = r.nonsmooth();
  return d;
}

}  // namespace memetic::ad
