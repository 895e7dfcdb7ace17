#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace memetic {

/// Axis-aligned variable bounds, lower < upper elementwise.
struct BoundBox {
  std::vector<double> lower;
  std::vector<double> upper;

  BoundBox() = default;
  BoundBox(std::vector<double> lo, std::vector<double> hi)
      : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw std::invalid_argument("BoundBox: size mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(lower[i] < upper[i])) throw std::invalid_argument("BoundBox: lower must be < upper");
    }
  }

  static BoundBox uniform(std::size_t n, double lo, double hi) {
    return BoundBox(std::vector<double>(n, lo), std::vector<double>(n, hi));
  }

  std::size_t size() const noexcept { return lower.size(); }

  bool contains(std::span<const double> x) const noexcept {
    if (x.size() != size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
  }

  bool strictly_contains(std::span<const double> x) const noexcept {
    if (x.size() != size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
    }
    return true;
  }
};

}  // namespace memetic
