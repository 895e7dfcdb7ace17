#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "frozen_values.hpp"
#include "memetic/encoding.hpp"

using namespace memetic;
namespace frozen = memetic::testing::frozen;

TEST_CASE("bit length is the smallest l covering the range") {
  CHECK(compute_bit_length(-5.0, 5.0, 0.01) == frozen::kBitsRastriginRange);
  CHECK(compute_bit_length(-500.0, 500.0, 0.01) == frozen::kBitsSchwefelRange);
  CHECK(compute_bit_length(-15.0, 30.0, 0.01) == frozen::kBitsAckleyRange);
  CHECK(compute_bit_length(0.0, 1.0, 1.0) == 1);
  for (double prec : {0.3, 0.01, 1e-4}) {
    const unsigned l = compute_bit_length(-2.0, 7.0, prec);
    const double cells = 9.0 / prec;
    CHECK(cells <= std::ldexp(1.0, static_cast<int>(l)));
    CHECK(std::ldexp(1.0, static_cast<int>(l) - 1) < cells);
  }
  CHECK_THROWS_AS(compute_bit_length(1.0, 1.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(compute_bit_length(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("population sizing bound") {
  CHECK(min_population_size(200, 0.999) == frozen::kMinPop200);
  CHECK(min_population_size(10, 0.999) == frozen::kMinPop10);
  CHECK(min_population_size(1, 0.5) == frozen::kMinPop1);
}

TEST_CASE("decode maps codes onto the grid") {
  const auto spec = EncodingSpec::uniform(1, -5.0, 5.0, 0.01);
  REQUIRE(spec.total_length() == 10);
  const auto c = Chromosome::from_string("1011000010");
  CHECK(bits_to_code(c.bits()) == frozen::kDecodeExampleCode);
  CHECK(decode(c, spec)[0] == doctest::Approx(frozen::kDecodeExampleValue).epsilon(1e-14));
  CHECK(decode(Chromosome(10, false), spec)[0] == -5.0);
  CHECK(decode(Chromosome(10, true), spec)[0] == 5.0);
}

TEST_CASE("encode picks the nearest grid point") {
  const auto spec = EncodingSpec::uniform(2, -5.0, 5.0, 0.01);
  const std::vector<double> lower = {-5.0, -5.0};
  CHECK(encode(lower, spec) == Chromosome(spec.total_length(), false));

  const double step = spec.variables()[0].step();
  const auto a = decode(Chromosome::from_string("00000001110000000111"), spec);
  // Midway between codes 7 and 8 goes to 7.
  const std::vector<double> mid = {a[0] + 0.5 * step, a[1] + 0.5 * step};
  const auto back = encode(mid, spec);
  CHECK(bits_to_code(back.bits().subspan(0, 10)) == 7);
  CHECK(bits_to_code(back.bits().subspan(10, 10)) == 7);

  // Slightly outside by less than one precision unit clamps.
  const std::vector<double> over = {5.005, -5.005};
  const auto clamped = decode(encode(over, spec), spec);
  CHECK(clamped[0] == 5.0);
  CHECK(clamped[1] == -5.0);
  const std::vector<double> far = {6.0, 0.0};
  CHECK_THROWS_AS(encode(far, spec), std::out_of_range);
}

TEST_CASE("chromosome layout concatenates variables") {
  const std::vector<double> lo = {-5.0, -500.0};
  const std::vector<double> hi = {5.0, 500.0};
  const auto spec = EncodingSpec::from_bounds(lo, hi, 0.01);
  CHECK(spec.total_length() == 10 + 17);
  CHECK(spec.offset(1) == 10);
  const std::vector<double> x = {1.25, -310.5};
  const auto y = decode(encode(x, spec), spec);
  CHECK(std::abs(y[0] - x[0]) <= 0.5 * spec.variables()[0].step());
  CHECK(std::abs(y[1] - x[1]) <= 0.5 * spec.variables()[1].step());
  CHECK(Chromosome::from_string("0110").to_string() == "0110");
}
