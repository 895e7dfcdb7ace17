#pragma once

// Central finite differences, used to check AD derivatives.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace memetic::fd {

using ScalarFn = std::function<double(std::span<const double>)>;

// Both use one Richardson step on central differences, with base steps
// h_i = c * max(1, |x_i|) and h_i / 2.

/// c = 1e-4.
std::vector<double> gradient(const ScalarFn& f, std::span<const double> x);

/// Row-major n x n. Diagonal from the three-point second difference, off
/// diagonal from the four-point mixed difference, c = 5e-4.
std::vector<double> hessian(const ScalarFn& f, std::span<const double> x);

/// max_i |a_i - b_i| / max(1, |b_i|)
double max_relative_error(std::span<const double> a, std::span<const double> reference);

}  // namespace memetic::fd
