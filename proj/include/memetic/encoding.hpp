#pragma once

// Real <-> binary genotype mapping. Variables are encoded as unsigned
// big-endian integers (first bit most significant) on a uniform grid
// spanning [lower, upper], and concatenated into one chromosome.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memetic {

/// Bits above this length cannot be mapped exactly through a double.
inline constexpr unsigned kMaxBitsPerVariable = 52;

/// Smallest l >= 1 with (upper - lower) / precision <= 2^l.
/// Throws std::domain_error when lower >= upper or precision <= 0.
unsigned compute_bit_length(double lower, double upper, double precision);

/// Advisory lower bound on the population size for a binary alphabet:
/// ceil(1 + log2(-l / ln P)).
std::size_t min_population_size(std::size_t string_length, double confidence);

struct VariableSpec {
  double lower = 0.0;
  double upper = 1.0;
  double precision = 1.0;
  unsigned bit_length = 1;

  /// Builds a spec with bit_length derived from the precision requirement.
  static VariableSpec from_precision(double lower, double upper, double precision);

  /// Grid spacing (upper - lower) / (2^l - 1).
  double step() const noexcept;
  std::uint64_t max_code() const noexcept;
};

class Chromosome {
 public:
  Chromosome() = default;
  explicit Chromosome(std::size_t length, bool value = false)
      : bits_(length, value ? 1 : 0) {}
  explicit Chromosome(std::vector<std::uint8_t> bits);

  /// Parses a '0'/'1' string such as "1011000010".
  static Chromosome from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool value) noexcept { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) noexcept { bits_[i] ^= 1; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }

  std::string to_string() const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

class EncodingSpec {
 public:
  EncodingSpec() = default;
  explicit EncodingSpec(std::vector<VariableSpec> variables);

  /// Same bounds and precision for every coordinate.
  static EncodingSpec uniform(std::size_t n, double lower, double upper,
                              double precision);
  /// Per-coordinate bounds with a shared precision.
  static EncodingSpec from_bounds(std::span<const double> lower,
                                  std::span<const double> upper,
                                  double precision);

  std::span<const VariableSpec> variables() const noexcept { return variables_; }
  std::size_t dimension() const noexcept { return variables_.size(); }
  std::size_t total_length() const noexcept { return total_length_; }

  /// Bit offset of variable i inside a chromosome.
  std::size_t offset(std::size_t i) const noexcept { return offsets_[i]; }

 private:
  std::vector<VariableSpec> variables_;
  std::vector<std::size_t> offsets_;
  std::size_t total_length_ = 0;
};

/// Unsigned big-endian value of a bit run.
std::uint64_t bits_to_code(std::span<const std::uint8_t> bits);

std::vector<double> decode(const Chromosome& chrom, const EncodingSpec& spec);
void decode_into(const Chromosome& chrom, const EncodingSpec& spec,
                 std::span<double> out);

/// Nearest grid point, ties toward the smaller code. Values outside the range
/// by at most one precision unit are clamped; anything further throws
/// std::out_of_range.
Chromosome encode(std::span<const double> x, const EncodingSpec& spec);

}  // namespace memetic
