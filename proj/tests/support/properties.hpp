#pragma once

// Randomized invariant suites shared by the unit tests and the acceptance
// binary. Each suite runs `cases` generated cases and records the first few
// counterexamples.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace memetic::testing {

struct PropertyReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t failed_cases = 0;
  std::vector<std::string> counterexamples;  // at most a handful
  std::string notes;                         // counts worth reporting on success too

  bool passed() const noexcept { return cases > 0 && failed_cases == 0; }
  void fail(std::string what);
};

/// decode(c) re-encodes to c; encode(x) lands within half a grid step; the
/// corner chromosomes decode to the bounds exactly.
PropertyReport roundtrip_property(std::uint64_t seed, std::size_t cases);

/// Best fitness never decreases across generations, the population size
/// stays N, and every generation credits exactly N children.
PropertyReport elitism_property(std::uint64_t seed, std::size_t cases);

/// Every accepted Newton step is a descent step satisfying sufficient
/// decrease, and the curvature condition holds unless the step sits at the
/// alpha = 1 cap with the slope still below c2 phi'(0) or the line search ran
/// out of trials. Bounded runs keep every iterate strictly inside the box.
PropertyReport wolfe_property(std::uint64_t seed, std::size_t cases);

/// The barrier QP step lies strictly inside (lo, hi) and does not increase
/// the model.
PropertyReport ipm_property(std::uint64_t seed, std::size_t cases);

/// Identical seeds give bit-identical EC runs, hybrid runs and CSV output.
PropertyReport determinism_property(std::uint64_t seed, std::size_t cases);

}  // namespace memetic::testing
