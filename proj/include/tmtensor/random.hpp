#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tmtensor/error.hpp"
#include "tmtensor/scalar.hpp"
#include "tmtensor/tensor.hpp"

namespace tmt {

/// Seeded source for all random trials.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard distributions are not, so the two draws used
/// here (bounded integer, Bernoulli) are done by hand to keep trials
/// identical across platforms and standard libraries.
class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [1, bound], by rejection.
  std::int64_t uniform(std::int64_t bound) {
    if (bound < 1) throw Error(ErrorKind::InvalidArgument, "value bound must be >= 1");
    const auto range = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % range) + 1;
  }

  /// True with probability `density` in (0, 1].
  bool bernoulli(double density) {
    if (density >= 1.0) {
      next();
      return true;
    }
    // density * 2^64 is exact in binary floating point, and the cast truncates.
    const auto threshold = static_cast<std::uint64_t>(std::ldexp(density, 64));
    return next() < threshold;
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kMaxRandomGrid = 100'000'000;

/// Each of the Q^(upper+1) coordinates, visited in lexicographic order, is
/// kept with probability `density` and given a value uniform in
/// [1, value_bound].
inline SparseTensor random_tensor(TrialRng& rng, const Dims& dims, int upper, double density, std::int64_t value_bound) {
  dims.validate();
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorKind::InvalidArgument, "density must lie in (0, 1]");
  if (upper < 0) throw Error(ErrorKind::InvalidArgument, "negative upper count");
  const std::uint64_t q = dims.quad_count();
  std::uint64_t grid = 1;
  for (int g = 0; g <= upper; ++g) grid = saturating_mul(grid, q);
  if (grid > kMaxRandomGrid) throw Error(ErrorKind::ResourceLimit, "random grid of " + std::to_string(grid) + " coordinates");

  TensorAccumulator acc(dims, upper);
  std::vector<std::uint32_t> key(static_cast<std::size_t>(upper + 1), 0);
  for (std::uint64_t c = 0; c < grid; ++c) {
    if (rng.bernoulli(density)) acc.add(key, rng.uniform(value_bound));
    for (std::size_t g = key.size(); g-- > 0;) {
      if (++key[g] < q) break;
      key[g] = 0;
    }
  }
  return std::move(acc).finish();
}

inline SparseTensor random_config_tensor(const Dims& dims, double density, std::int64_t value_bound, std::uint64_t seed) {
  TrialRng rng(seed);
  return random_tensor(rng, dims, 0, density, value_bound);
}

inline SparseTensor random_transition_tensor(const Dims& dims, int upper, double density, std::int64_t value_bound,
                                             std::uint64_t seed) {
  TrialRng rng(seed);
  return random_tensor(rng, dims, upper, density, value_bound);
}

}  // namespace tmt
