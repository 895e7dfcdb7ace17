#include "memetic/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memetic::fd {

namespace {

double scale(double x) { return std::max(1.0, std::abs(x)); }

// Plain central differences with steps h_i = base * scale(x_i).
std::vector<double> gradient_at(const ScalarFn& f, std::span<const double> x, double base) {
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = base * scale(x[i]);
    p[i] = x[i] + h;
    const double up = f(p);
    p[i] = x[i] - h;
    const double down = f(p);
    p[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::vector<double> hessian_at(const ScalarFn& f, std::span<const double> x, double base) {
  const std::size_t n = x.size();
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = base * scale(x[i]);
  const double f0 = f(p);
  std::vector<double> H(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = x[i] + h[i];
    const double up = f(p);
    p[i] = x[i] - h[i];
    const double down = f(p);
    p[i] = x[i];
    H[i * n + i] = (up - 2.0 * f0 + down) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto at = [&](double si, double sj) {
        p[i] = x[i] + si * h[i];
        p[j] = x[j] + sj * h[j];
        const double v = f(p);
        p[i] = x[i];
        p[j] = x[j];
        return v;
      };
      const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
      H[i * n + j] = v;
      H[j * n + i] = v;
    }
  }
  return H;
}

// (4 D(h/2) - D(h)) / 3 cancels the h^2 error term.
std::vector<double> richardson(std::vector<double> coarse, const std::vector<double>& fine) {
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return coarse;
}

}  // namespace

std::vector<double> gradient(const ScalarFn& f, std::span<const double> x) {
  return richardson(gradient_at(f, x, 1e-4), gradient_at(f, x, 5e-5));
}

std::vector<double> hessian(const ScalarFn& f, std::span<const double> x) {
  return richardson(hessian_at(f, x, 5e-4), hessian_at(f, x, 2.5e-4));
}

double max_relative_error(std::span<const double> a, std::span<const double> reference) {
  if (a.size() != reference.size()) throw std::invalid_argument("max_relative_error: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - reference[i]) / std::max(1.0, std::abs(reference[i])));
  }
  return worst;
}

}  // namespace memetic::fd
