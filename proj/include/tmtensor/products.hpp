#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmtensor/encoding.hpp"
#include "tmtensor/error.hpp"
#include "tmtensor/scalar.hpp"
#include "tmtensor/tensor.hpp"

namespace tmt {

/// (i, j) -> value or (k, l) -> value.
using PairMap = std::map<std::pair<int, int>, Scalar>;

struct ProductOptions {
  /// Upper bound on stored entries of a Type II result.
  std::uint64_t max_entries = 10'000'000;
  /// Upper bound on summed contributions, as a multiple of max_entries.
  std::uint64_t work_factor = 64;
};

namespace detail {

struct Factors {
  std::vector<Scalar> local;   // indexed by local_code
  std::vector<Scalar> global;  // indexed by global_code
};

inline void check_type1_operands(const SparseTensor& a, const SparseTensor& b) {
  if (a.upper() != 0) throw Error(ErrorKind::ArityMismatch, "left operand of Type I must have order 4");
  if (b.upper() < 1) throw Error(ErrorKind::ArityMismatch, "right operand of Type I needs an upper group");
  require_same_dims(a, b);
}

// One pass over the nonzeros of B: each entry contributes
// a(x1)...a(xp) * b to L at its lower (i, j) and to G at its lower (k, l).
inline Factors type1_factors(const SparseTensor& a, const SparseTensor& b) {
  check_type1_operands(a, b);
  const auto& d = a.dims();
  std::vector<Scalar> dense(d.quad_count(), 0);
  for (std::size_t e = 0; e < a.nnz(); ++e) dense[a.codes(e)[0]] = a.value(e);

  Factors f{std::vector<Scalar>(local_count(d), 0), std::vector<Scalar>(global_count(d), 0)};
  const int p = b.upper();
  for (std::size_t e = 0; e < b.nnz(); ++e) {
    auto c = b.codes(e);
    Scalar weight = b.value(e);
    for (int r = 0; r < p && weight != 0; ++r) weight *= dense[c[static_cast<std::size_t>(r)]];
    if (weight == 0) continue;
    auto lower = decode_quad(c[static_cast<std::size_t>(p)], d);
    auto& lv = f.local[local_code(lower, d)];
    lv += weight;
    auto& gv = f.global[global_code(lower, d)];
    gv += weight;
  }
  return f;
}

}  // namespace detail

/// Local factor of A x1 B: per (i, j), the contraction of A's p-fold
/// product against B with the lower (k, l) summed out.
inline PairMap local_factor(const SparseTensor& a, const SparseTensor& b) {
  auto f = detail::type1_factors(a, b);
  const auto& d = a.dims();
  PairMap out;
  for (std::uint32_t c = 0; c < f.local.size(); ++c) {
    if (f.local[c] != 0) out[{static_cast<int>(c / d.symbols) + 1, static_cast<int>(c % d.symbols)}] = f.local[c];
  }
  return out;
}

/// Global factor of A x1 B: per (k, l), lower (i, j) summed out.
inline PairMap global_factor(const SparseTensor& a, const SparseTensor& b) {
  auto f = detail::type1_factors(a, b);
  const auto& d = a.dims();
  PairMap out;
  for (std::uint32_t c = 0; c < f.global.size(); ++c) {
    if (f.global[c] != 0) out[{static_cast<int>(c / d.cells), static_cast<int>(c % d.cells) + 1}] = f.global[c];
  }
  return out;
}

/// Type I product: c[i, j, k, l] = L(i, j) * G(k, l). B may carry any
/// number p >= 1 of upper groups; A is then used p times.
inline SparseTensor type1(const SparseTensor& a, const SparseTensor& b) {
  auto f = detail::type1_factors(a, b);
  const auto& d = a.dims();
  TensorAccumulator acc(d, 0);
  for (std::uint32_t lc = 0; lc < f.local.size(); ++lc) {
    if (f.local[lc] == 0) continue;
    for (std::uint32_t gc = 0; gc < f.global.size(); ++gc) {
      if (f.global[gc] == 0) continue;
      std::uint32_t code = encode_quad(join_quad(lc, gc, d), d);
      acc.add(std::span<const std::uint32_t>(&code, 1), f.local[lc] * f.global[gc]);
    }
  }
  return std::move(acc).finish();
}

namespace detail {

// Marginals of a transition tensor, grouped by the kept lower pair. Each
// item names a distinct upper sequence (by run index) and its marginal.
struct Marginals {
  std::vector<std::uint32_t> runs;  // p codes per run, concatenated
  std::vector<std::vector<std::pair<std::uint32_t, Scalar>>> by_local;
  std::vector<std::vector<std::pair<std::uint32_t, Scalar>>> by_global;
};

inline Marginals marginals(const SparseTensor& b) {
  const auto& d = b.dims();
  const auto p = static_cast<std::size_t>(b.upper());
  Marginals out;
  out.by_local.resize(local_count(d));
  out.by_global.resize(global_count(d));

  std::map<std::uint32_t, Scalar> local_sum;
  std::map<std::uint32_t, Scalar> global_sum;
  std::uint32_t run = 0;
  auto flush = [&] {
    for (const auto& [c, v] : local_sum) {
      if (v != 0) out.by_local[c].emplace_back(run, v);
    }
    for (const auto& [c, v] : global_sum) {
      if (v != 0) out.by_global[c].emplace_back(run, v);
    }
    local_sum.clear();
    global_sum.clear();
  };

  // Entries are sorted, so each upper sequence forms one contiguous run.
  for (std::size_t e = 0; e < b.nnz(); ++e) {
    auto c = b.codes(e);
    bool new_run = e == 0 || !std::equal(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(p),
                                         b.codes(e - 1).begin());
    if (new_run) {
      if (e != 0) {
        flush();
        ++run;
      }
      out.runs.insert(out.runs.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(p));
    }
    auto lower = decode_quad(c[p], d);
    auto& lv = local_sum[local_code(lower, d)];
    lv += b.value(e);
    auto& gv = global_sum[global_code(lower, d)];
    gv += b.value(e);
  }
  if (b.nnz() != 0) flush();
  return out;
}

}  // namespace detail

/// Type II product B x2 C of order 4(2pq + 1).
///
/// For slot r of C, D's upper block 2r-1 (p groups) feeds a B factor whose
/// lower (i, j) is kept and (k, l) summed; block 2r feeds a B factor whose
/// lower (k, l) is kept and (i, j) summed. The kept pairs of slot r form
/// C's r-th upper group; C's lower group is D's lower group.
inline SparseTensor type2(const SparseTensor& b, const SparseTensor& c, const ProductOptions& options = {}) {
  if (b.upper() < 1 || c.upper() < 1) {
    throw Error(ErrorKind::ArityMismatch, "Type II operands need at least one upper group each");
  }
  require_same_dims(b, c);
  const auto& d = b.dims();
  const auto p = static_cast<std::size_t>(b.upper());
  const auto q = static_cast<std::size_t>(c.upper());
  const auto slots = 2 * q;
  const std::uint64_t upper64 = 2 * std::uint64_t(p) * q;
  if (upper64 > 4096) throw Error(ErrorKind::ResourceLimit, "Type II result would have " + std::to_string(upper64) + " upper groups");
  const int upper = static_cast<int>(upper64);

  const auto marg = detail::marginals(b);

  // Size prediction before any allocation.
  std::uint64_t contributions = 0;
  for (std::size_t e = 0; e < c.nnz(); ++e) {
    auto codes = c.codes(e);
    std::uint64_t here = 1;
    for (std::size_t r = 0; r < q; ++r) {
      auto x = decode_quad(codes[r], d);
      here = saturating_mul(here, marg.by_local[local_code(x, d)].size());
      here = saturating_mul(here, marg.by_global[global_code(x, d)].size());
    }
    contributions = saturating_add(contributions, here);
  }
  std::uint64_t domain = 1;
  for (int g = 0; g <= upper; ++g) domain = saturating_mul(domain, d.quad_count());
  const std::uint64_t predicted = std::min(contributions, domain);
  if (predicted > options.max_entries ||
      contributions > saturating_mul(options.max_entries, options.work_factor)) {
    throw Error(ErrorKind::ResourceLimit, "Type II product predicts " + std::to_string(predicted) +
                                              " entries from " + std::to_string(contributions) +
                                              " contributions (cap " + std::to_string(options.max_entries) + ")");
  }

  TensorAccumulator acc(d, upper);
  const std::uint64_t radix = d.quad_count();
  // When whole keys pack into 64 bits, each run's p groups are packed once
  // and keys are assembled as prefix codes alongside prefix products.
  const bool packed = acc.packs64();
  std::uint64_t radix_p = 1;
  std::vector<std::uint64_t> run_code;
  if (packed) {
    for (std::size_t g = 0; g < p; ++g) radix_p *= radix;
    run_code.resize(marg.runs.size() / p);
    for (std::size_t r = 0; r < run_code.size(); ++r) {
      std::uint64_t code = 0;
      for (std::size_t g = 0; g < p; ++g) code = code * radix + marg.runs[r * p + g];
      run_code[r] = code;
    }
  }

  std::vector<std::uint32_t> key(upper64 + 1);
  std::vector<const std::vector<std::pair<std::uint32_t, Scalar>>*> lists(slots);
  std::vector<std::size_t> pos(slots);
  std::vector<Scalar> prefix(slots + 1);
  std::vector<std::uint64_t> prefix_code(slots + 1, 0);

  for (std::size_t e = 0; e < c.nnz(); ++e) {
    auto codes = c.codes(e);
    bool any_empty = false;
    for (std::size_t r = 0; r < q; ++r) {
      auto x = decode_quad(codes[r], d);
      lists[2 * r] = &marg.by_local[local_code(x, d)];
      lists[2 * r + 1] = &marg.by_global[global_code(x, d)];
      any_empty = any_empty || lists[2 * r]->empty() || lists[2 * r + 1]->empty();
    }
    if (any_empty) continue;
    const std::uint32_t lower = codes[q];
    key[upper64] = lower;
    prefix[0] = c.value(e);
    std::fill(pos.begin(), pos.end(), 0);
    // Slots before `from` kept their choice since the previous key.
    std::size_t from = 0;
    for (;;) {
      for (std::size_t s = from; s < slots; ++s) {
        const auto& [run, mv] = (*lists[s])[pos[s]];
        prefix[s + 1] = prefix[s] * mv;
        if (packed) {
          prefix_code[s + 1] = prefix_code[s] * radix_p + run_code[run];
        } else {
          std::copy_n(marg.runs.begin() + static_cast<std::ptrdiff_t>(run * p), p,
                      key.begin() + static_cast<std::ptrdiff_t>(s * p));
        }
      }
      if (packed) {
        acc.add_packed(prefix_code[slots] * radix + lower, prefix[slots]);
      } else {
        acc.add(key, prefix[slots]);
      }
      std::size_t s = slots;
      bool advanced = false;
      while (s > 0) {
        --s;
        if (++pos[s] < lists[s]->size()) {
          advanced = true;
          break;
        }
        pos[s] = 0;
      }
      if (!advanced) break;
      from = s;
    }
  }
  return std::move(acc).finish();
}

/// first x2 b x2 b ... (e - 1 factors of b), nested on the left.
inline SparseTensor type2_chain(const SparseTensor& first, const SparseTensor& b, int e,
                                const ProductOptions& options = {}) {
  if (e < 1) throw Error(ErrorKind::InvalidArgument, "exponent must be >= 1");
  SparseTensor out = first;
  for (int step = 1; step < e; ++step) out = type2(out, b, options);
  return out;
}

/// B^(1) = B, B^(e) = B^(e-1) x2 B.
inline SparseTensor type2_power(const SparseTensor& b, int e, const ProductOptions& options = {}) {
  return type2_chain(b, b, e, options);
}

/// Keeps entries whose every upper group lies in the nonzero support of
/// the configuration tensor `a`. A x1 T only reads such entries of T, and
/// restricting the leftmost factor of a Type II chain restricts the chain.
inline SparseTensor restrict_upper_to_support(const SparseTensor& t, const SparseTensor& a) {
  if (a.upper() != 0) throw Error(ErrorKind::ArityMismatch, "support must come from a configuration tensor");
  require_same_dims(t, a);
  std::vector<bool> allowed(a.dims().quad_count(), false);
  for (std::size_t e = 0; e < a.nnz(); ++e) allowed[a.codes(e)[0]] = true;
  return filter_entries(t, [&](std::size_t e) {
    auto c = t.codes(e);
    for (int g = 0; g < t.upper(); ++g) {
      if (!allowed[c[static_cast<std::size_t>(g)]]) return false;
    }
    return true;
  });
}

enum class EvolveStatus { Ok, Halted, Overflow };

inline std::string_view to_string(EvolveStatus s) {
  switch (s) {
    case EvolveStatus::Ok: return "ok";
    case EvolveStatus::Halted: return "halted";
    case EvolveStatus::Overflow: return "overflow";
  }
  return "unknown";
}

struct Evolution {
  std::vector<SparseTensor> states;   // A_1, A_2, ...
  std::vector<EvolveStatus> steps;    // steps[t - 1] describes A_t -> A_{t+1}

  std::optional<int> overflow_step() const {
    for (std::size_t t = 0; t < steps.size(); ++t) {
      if (steps[t] == EvolveStatus::Overflow) return static_cast<int>(t) + 1;
    }
    return std::nullopt;
  }
};

namespace detail {

inline bool is_characteristic(const SparseTensor& restricted) {
  try {
    decode_config(restricted);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace detail

/// A_{t+1} = A_t x1 B for t = 1..steps.
///
/// A step is Halted when the restriction does not change (absorbing halt),
/// and Overflow when a characteristic A_t yields a restriction with no
/// entries, which happens when the boundary entries it needed were dropped.
/// Evolution stops after an Overflow step.
inline Evolution evolve(const SparseTensor& a1, const SparseTensor& b, int steps) {
  detail::check_type1_operands(a1, b);
  if (steps < 0) throw Error(ErrorKind::InvalidArgument, "negative step count");
  Evolution out;
  out.states.push_back(a1);
  SparseTensor prev_restricted = restrict_k_nonzero(a1);
  for (int t = 1; t <= steps; ++t) {
    SparseTensor next = type1(out.states.back(), b);
    SparseTensor restricted = restrict_k_nonzero(next);
    EvolveStatus status = EvolveStatus::Ok;
    if (restricted.empty() && detail::is_characteristic(prev_restricted)) {
      status = EvolveStatus::Overflow;
    } else if (!restricted.empty() && restricted == prev_restricted) {
      status = EvolveStatus::Halted;
    }
    out.states.push_back(std::move(next));
    out.steps.push_back(status);
    prev_restricted = std::move(restricted);
    if (status == EvolveStatus::Overflow) break;
  }
  return out;
}

/// `t=<t> nnz=<nnz> status=<ok|halted|overflow>`
inline std::string format_step_line(int t, std::size_t nnz, std::string_view status) {
  return "t=" + std::to_string(t) + " nnz=" + std::to_string(nnz) + " status=" + std::string(status);
}

}  // namespace tmt
