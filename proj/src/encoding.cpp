#include "memetic/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memetic {

unsigned compute_bit_length(double lower, double upper, double precision) {
  if (!(lower < upper)) throw std::domain_error("compute_bit_length: lower must be < upper");
  if (!(precision > 0.0)) throw std::domain_error("compute_bit_length: precision must be > 0");
  const double intervals = (upper - lower) / precision;
  unsigned l = 1;
  while (std::ldexp(1.0, static_cast<int>(l)) < intervals) {
    if (++l > kMaxBitsPerVariable) {
      throw std::domain_error("compute_bit_length: precision too fine for " +
                              std::to_string(kMaxBitsPerVariable) + " bits");
    }
  }
  return l;
}

std::size_t min_population_size(std::size_t string_length, double confidence) {
  if (string_length == 0) throw std::domain_error("min_population_size: string_length must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::domain_error("min_population_size: confidence must be in (0, 1)");
  }
  const double l = static_cast<double>(string_length);
  const double n = 1.0 + std::log2(-l / std::log(confidence));
  return static_cast<std::size_t>(std::ceil(n));
}

VariableSpec VariableSpec::from_precision(double lower, double upper, double precision) {
  return VariableSpec{lower, upper, precision, compute_bit_length(lower, upper, precision)};
}

double VariableSpec::step() const noexcept {
  return (upper - lower) / static_cast<double>(max_code());
}

std::uint64_t VariableSpec::max_code() const noexcept {
  return (std::uint64_t{1} << bit_length) - 1;
}

Chromosome::Chromosome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw std::invalid_argument("Chromosome: bits must be 0 or 1");
  }
}

Chromosome Chromosome::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("Chromosome: expected '0' or '1'");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return Chromosome(std::move(bits));
}

std::string Chromosome::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

EncodingSpec::EncodingSpec(std::vector<VariableSpec> variables)
    : variables_(std::move(variables)) {
  offsets_.reserve(variables_.size());
  for (const auto& v : variables_) {
    if (!(v.lower < v.upper)) throw std::domain_error("EncodingSpec: lower must be < upper");
    if (v.bit_length == 0 || v.bit_length > kMaxBitsPerVariable) {
      throw std::domain_error("EncodingSpec: bit_length out of range");
    }
    offsets_.push_back(total_length_);
    total_length_ += v.bit_length;
  }
}

EncodingSpec EncodingSpec::uniform(std::size_t n, double lower, double upper,
                                   double precision) {
  return EncodingSpec(std::vector<VariableSpec>(
      n, VariableSpec::from_precision(lower, upper, precision)));
}

EncodingSpec EncodingSpec::from_bounds(std::span<const double> lower,
                                       std::span<const double> upper,
                                       double precision) {
  if (lower.size() != upper.size()) throw std::invalid_argument("EncodingSpec: bound size mismatch");
  std::vector<VariableSpec> vars;
  vars.reserve(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    vars.push_back(VariableSpec::from_precision(lower[i], upper[i], precision));
  }
  return EncodingSpec(std::move(vars));
}

std::uint64_t bits_to_code(std::span<const std::uint8_t> bits) {
  std::uint64_t code = 0;
  for (std::uint8_t b : bits) code = (code << 1) | b;
  return code;
}

void decode_into(const Chromosome& chrom, const EncodingSpec& spec, std::span<double> out) {
  if (chrom.size() != spec.total_length()) {
    throw std::invalid_argument("decode: chromosome length " + std::to_string(chrom.size()) +
                                " does not match encoding length " +
                                std::to_string(spec.total_length()));
  }
  if (out.size() != spec.dimension()) throw std::invalid_argument("decode: output size mismatch");
  const auto bits = chrom.bits();
  const auto vars = spec.variables();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    const std::uint64_t code = bits_to_code(bits.subspan(spec.offset(i), v.bit_length));
    // The two ends map exactly onto the bounds.
    if (code == v.max_code()) {
      out[i] = v.upper;
    } else {
      out[i] = v.lower + v.step() * static_cast<double>(code);
    }
  }
}

std::vector<double> decode(const Chromosome& chrom, const EncodingSpec& spec) {
  std::vector<double> x(spec.dimension());
  decode_into(chrom, spec, x);
  return x;
}

Chromosome encode(std::span<const double> x, const EncodingSpec& spec) {
  if (x.size() != spec.dimension()) throw std::invalid_argument("encode: dimension mismatch");
  Chromosome chrom(spec.total_length());
  auto bits = chrom.bits();
  const auto vars = spec.variables();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    double xi = x[i];
    if (xi < v.lower) {
      if (v.lower - xi > v.precision) throw std::out_of_range("encode: value below lower bound");
      xi = v.lower;
    } else if (xi > v.upper) {
      if (xi - v.upper > v.precision) throw std::out_of_range("encode: value above upper bound");
      xi = v.upper;
    }
    const double t = (xi - v.lower) / v.step();
    // Round half down.
    double k = std::ceil(t - 0.5);
    k = std::clamp(k, 0.0, static_cast<double>(v.max_code()));
    auto code = static_cast<std::uint64_t>(k);
    const std::size_t base = spec.offset(i);
    for (unsigned j = 0; j < v.bit_length; ++j) {
      bits[base + v.bit_length - 1 - j] = static_cast<std::uint8_t>(code & 1u);
      code >>= 1;
    }
  }
  return chrom;
}

}  // namespace memetic
