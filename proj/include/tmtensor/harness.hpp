#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tmtensor/encoding.hpp"
#include "tmtensor/machine.hpp"
#include "tmtensor/products.hpp"
#include "tmtensor/random.hpp"
#include "tmtensor/tensor.hpp"

namespace tmt {

/// One report line: `CHECK <name> seed=<s> -> PASS|FAIL [witness=<...>]`.
/// Checks that draw nothing at random print `seed=-`.
struct Check {
  std::string name;
  std::optional<std::uint64_t> seed;
  bool pass = false;
  std::string witness;

  std::string line() const {
    std::string out = "CHECK " + name + " seed=" + (seed ? std::to_string(*seed) : std::string("-")) + " -> " +
                      (pass ? "PASS" : "FAIL");
    if (!witness.empty()) out += " witness=" + witness;
    return out;
  }
};

struct Report {
  std::vector<Check> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  const Check* first_failure() const {
    for (const auto& c : checks) {
      if (!c.pass) return &c;
    }
    return nullptr;
  }

  std::string text() const {
    std::string out;
    for (const auto& c : checks) out += c.line() + "\n";
    return out;
  }

  void append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }
};

inline std::string format_codes(const SparseTensor& t, std::span<const std::uint32_t> codes) {
  std::string out;
  for (std::size_t g = 0; g < codes.size(); ++g) {
    if (g) out += "|";
    auto q = decode_quad(codes[g], t.dims());
    out += std::to_string(q.i) + "," + std::to_string(q.j) + "," + std::to_string(q.k) + "," + std::to_string(q.l);
  }
  return out;
}

/// First coordinate (in canonical order) where two equally shaped tensors
/// differ, as `<coords>:<lhs>/<rhs>`; empty when they agree.
inline std::string first_difference(const SparseTensor& lhs, const SparseTensor& rhs) {
  if (!(lhs.dims() == rhs.dims()) || lhs.upper() != rhs.upper()) return "shape";
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < lhs.nnz() || b < rhs.nnz()) {
    int cmp;
    if (a == lhs.nnz()) {
      cmp = 1;
    } else if (b == rhs.nnz()) {
      cmp = -1;
    } else {
      auto ca = lhs.codes(a);
      auto cb = rhs.codes(b);
      cmp = std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end())   ? -1
            : std::lexicographical_compare(cb.begin(), cb.end(), ca.begin(), ca.end()) ? 1
                                                                                       : 0;
    }
    if (cmp < 0) return format_codes(lhs, lhs.codes(a)) + ":" + to_string(lhs.value(a)) + "/0";
    if (cmp > 0) return format_codes(rhs, rhs.codes(b)) + ":0/" + to_string(rhs.value(b));
    if (lhs.value(a) != rhs.value(b)) {
      return format_codes(lhs, lhs.codes(a)) + ":" + to_string(lhs.value(a)) + "/" + to_string(rhs.value(b));
    }
    ++a;
    ++b;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Evolution against the direct simulator
// ---------------------------------------------------------------------------

/// Runs the oracle and the tensor evolution side by side from `initial`
/// using the transition tensor `b` and compares every step.
///
/// After the oracle halts, later tensors are compared against the halted
/// configuration. The final check asserts that both sides report boundary
/// overflow at the same step (or neither does).
inline Report verify_evolution(const Machine& machine, const SparseTensor& b, const Configuration& initial, int steps) {
  Report report;
  const auto& dims = b.dims();
  const auto trace = oracle_run(machine, initial, steps);
  const auto evo = evolve(encode_config(initial, dims), b, steps);

  std::optional<int> oracle_overflow;
  if (trace.status == RunStatus::BoundaryOverflow) oracle_overflow = static_cast<int>(trace.configs.size());

  for (std::size_t t = 1; t <= evo.states.size(); ++t) {
    const auto restricted = restrict_k_nonzero(evo.states[t - 1]);
    SparseTensor expected(dims, 0);
    if (t <= trace.configs.size()) {
      expected = encode_config(trace.configs[t - 1], dims);
    } else if (trace.status == RunStatus::Halted) {
      expected = encode_config(trace.configs.back(), dims);
    }
    // Past an oracle overflow the expected restriction is empty.
    Check check{"theorem1.t=" + std::to_string(t), std::nullopt, restricted == expected, {}};
    if (!check.pass) check.witness = first_difference(restricted, expected);
    report.checks.push_back(std::move(check));
  }

  auto tensor_overflow = evo.overflow_step();
  Check overflow{"theorem1.overflow", std::nullopt, tensor_overflow == oracle_overflow, {}};
  auto show = [](std::optional<int> s) { return s ? std::to_string(*s) : std::string("none"); };
  overflow.witness = "oracle:" + show(oracle_overflow) + ",tensor:" + show(tensor_overflow);
  report.checks.push_back(std::move(overflow));
  return report;
}

inline Report verify_theorem1(const Machine& machine, const std::vector<int>& tape, const Dims& dims, int steps) {
  const auto b = encode_machine(machine, dims);
  return verify_evolution(machine, b.tensor, initial_configuration(machine, tape, dims.cells), steps);
}

// ---------------------------------------------------------------------------
// Associativity trials
// ---------------------------------------------------------------------------

/// Whether the right-hand side had to be evaluated through the restriction
/// of B to A's support because the full Type II product exceeded the cap.
enum class EvalMode { Full, SupportRestricted };

struct MixedResult {
  bool pass = false;
  EvalMode mode = EvalMode::Full;
  std::string witness;
};

/// (A x1 B) x1 C against A x1 (B x2 C).
inline MixedResult mixed_assoc_check(const SparseTensor& a, const SparseTensor& b, const SparseTensor& c,
                                     const ProductOptions& options = {}) {
  MixedResult out;
  const auto lhs = type1(type1(a, b), c);
  SparseTensor rhs;
  try {
    rhs = type1(a, type2(b, c, options));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResourceLimit) throw;
    out.mode = EvalMode::SupportRestricted;
    rhs = type1(a, type2(restrict_upper_to_support(b, a), c, options));
  }
  out.witness = first_difference(lhs, rhs);
  out.pass = out.witness.empty();
  return out;
}

inline MixedResult mixed_assoc_trial(const Dims& dims, int p, int q, double density, std::int64_t value_bound,
                                     std::uint64_t seed, const ProductOptions& options = {}) {
  TrialRng rng(seed);
  auto a = random_tensor(rng, dims, 0, density, value_bound);
  auto b = random_tensor(rng, dims, p, density, value_bound);
  auto c = random_tensor(rng, dims, q, density, value_bound);
  return mixed_assoc_check(a, b, c, options);
}

inline SparseTensor permute_upper(const SparseTensor& t, const std::vector<int>& perm) {
  // Result group g takes the source's group perm[g].
  TensorAccumulator acc(t.dims(), t.upper());
  std::vector<std::uint32_t> key(static_cast<std::size_t>(t.arity()));
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    auto c = t.codes(e);
    for (int g = 0; g < t.upper(); ++g) key[static_cast<std::size_t>(g)] = c[static_cast<std::size_t>(perm[static_cast<std::size_t>(g)])];
    key.back() = c.back();
    acc.add(key, t.value(e));
  }
  return std::move(acc).finish();
}

struct Type2AssocResult {
  bool entrywise = false;
  bool action = false;
  std::optional<std::vector<int>> permutation;  // set when entrywise fails but a regrouping matches
  std::string witness;
};

inline constexpr int kMaxPermutationSearchGroups = 8;

/// (B x2 C) x2 F against B x2 (C x2 F), entrywise and through their Type I
/// action on each tensor in `probes`.
inline Type2AssocResult type2_assoc_check(const SparseTensor& b, const SparseTensor& c, const SparseTensor& f,
                                          const std::vector<SparseTensor>& probes,
                                          const ProductOptions& options = {}) {
  Type2AssocResult out;
  const auto left = type2(type2(b, c, options), f, options);
  const auto right = type2(b, type2(c, f, options), options);

  out.entrywise = left == right;
  if (!out.entrywise) {
    out.witness = "entrywise:" + first_difference(left, right);
    if (left.upper() <= kMaxPermutationSearchGroups) {
      std::vector<int> perm(static_cast<std::size_t>(left.upper()));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        if (permute_upper(left, perm) == right) {
          out.permutation = perm;
          break;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }

  out.action = true;
  for (std::size_t s = 0; s < probes.size(); ++s) {
    auto diff = first_difference(type1(probes[s], left), type1(probes[s], right));
    if (!diff.empty()) {
      out.action = false;
      if (!out.witness.empty()) out.witness += ";";
      out.witness += "action[" + std::to_string(s) + "]:" + diff;
      break;
    }
  }
  return out;
}

inline Type2AssocResult type2_assoc_trial(const Dims& dims, int p, int q, int r, double density, std::int64_t value_bound,
                                          std::uint64_t seed, int probes = 10, const ProductOptions& options = {}) {
  TrialRng rng(seed);
  auto b = random_tensor(rng, dims, p, density, value_bound);
  auto c = random_tensor(rng, dims, q, density, value_bound);
  auto f = random_tensor(rng, dims, r, density, value_bound);
  std::vector<SparseTensor> as;
  for (int s = 0; s < probes; ++s) as.push_back(random_tensor(rng, dims, 0, density, value_bound));
  return type2_assoc_check(b, c, f, as, options);
}

// ---------------------------------------------------------------------------
// Structural audit
// ---------------------------------------------------------------------------

/// Expected entry count of an encoded machine: one inactive-cell entry per
/// (i1, j1, k1 != 0, l1 != i1), one active-cell entry per (i1 = l1, j1,
/// k1 != 0), minus the boundary drops.
inline std::uint64_t expected_machine_nnz(const Dims& d, std::size_t dropped) {
  const std::uint64_t n = static_cast<std::uint64_t>(d.n());
  const std::uint64_t cells = static_cast<std::uint64_t>(d.cells);
  const std::uint64_t symbols = static_cast<std::uint64_t>(d.symbols);
  return (cells - 1) * cells * symbols * n + cells * symbols * n - dropped;
}

inline Check audit_nnz(const MachineTensor& encoded) {
  const auto expected = expected_machine_nnz(encoded.tensor.dims(), encoded.dropped.size());
  Check check{"audit.nnz.N=" + std::to_string(encoded.tensor.dims().cells), std::nullopt,
              encoded.tensor.nnz() == expected, {}};
  check.witness = "nnz:" + std::to_string(encoded.tensor.nnz()) + ",expected:" + std::to_string(expected) +
                  ",dropped:" + std::to_string(encoded.dropped.size());
  return check;
}

inline Check audit_nnz(const Machine& machine, const Dims& dims) { return audit_nnz(encode_machine(machine, dims)); }

}  // namespace tmt
