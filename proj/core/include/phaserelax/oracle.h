#pragma once

#include <cstdint>
#include <optional>

#include "phaserelax/model.h"

namespace phaserelax {

/// Number of candidate points when every coordinate ranges over a finite
/// grid of moduli and phases; nullopt when some coordinate is continuous.
/// Saturates at UINT64_MAX.
std::optional<uint64_t> search_space_size(const Instance& inst);

struct OracleResult {
  double value = 0.0;
  VectorXcd x;
  uint64_t candidates = 0;
  uint64_t feasible = 0;
};

constexpr uint64_t kDefaultOracleLimit = 50'000'000;

/// Exhaustive search in mixed-radix lexicographic order (coordinate 1 most
/// significant, amplitude before phase); the first optimum wins.
/// Throws when the space is infinite, above `limit`, or has no feasible point.
OracleResult enumerate_opt(const Instance& inst, uint64_t limit = kDefaultOracleLimit);

}  // namespace phaserelax
