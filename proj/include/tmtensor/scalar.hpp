#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tmt {

// Tensor entries are exact integers of unbounded width. Products of
// characteristic tensors grow past 64 bits within a few Type II steps.
using Scalar = boost::multiprecision::cpp_int;

inline std::string to_string(const Scalar& v) { return v.str(); }

// Saturating arithmetic for size predictions, where only "too big" matters.
inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) return UINT64_MAX;
  return out;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) return UINT64_MAX;
  return out;
}

}  // namespace tmt
