#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tmtensor/error.hpp"
#include "tmtensor/scalar.hpp"

namespace tmt {

/// Index bounds shared by every Quad of a tensor: cells 1..N, symbols 0..m,
/// states 0..n (slot 0 is the bookkeeping state).
struct Dims {
  int cells = 1;    // N
  int symbols = 1;  // m + 1
  int states = 2;   // n + 1

  int m() const { return symbols - 1; }
  int n() const { return states - 1; }

  std::uint32_t quad_count() const {
    return static_cast<std::uint32_t>(cells) * static_cast<std::uint32_t>(symbols) *
           static_cast<std::uint32_t>(states) * static_cast<std::uint32_t>(cells);
  }

  void validate() const {
    if (cells < 1 || symbols < 1 || states < 2) {
      throw Error(ErrorKind::InvalidArgument, "dims need N >= 1, m + 1 >= 1, n + 1 >= 2");
    }
    const std::uint64_t q = std::uint64_t(cells) * std::uint64_t(symbols) * std::uint64_t(states) *
                            std::uint64_t(cells);
    if (q >= (std::uint64_t(1) << 31)) throw Error(ErrorKind::ResourceLimit, "quad domain too large");
  }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// One (cell, symbol, state, head) index group.
struct Quad {
  int i = 1;
  int j = 0;
  int k = 0;
  int l = 1;

  friend bool operator==(const Quad&, const Quad&) = default;
  friend auto operator<=>(const Quad&, const Quad&) = default;
};

inline bool in_range(const Quad& q, const Dims& d) {
  return q.i >= 1 && q.i <= d.cells && q.j >= 0 && q.j < d.symbols && q.k >= 0 && q.k < d.states &&
         q.l >= 1 && q.l <= d.cells;
}

/// Dense code of a Quad; numeric order of codes is lexicographic (i, j, k, l).
inline std::uint32_t encode_quad(const Quad& q, const Dims& d) {
  if (!in_range(q, d)) {
    throw Error(ErrorKind::IndexOutOfRange, "quad (" + std::to_string(q.i) + "," + std::to_string(q.j) + "," +
                                                std::to_string(q.k) + "," + std::to_string(q.l) + ")");
  }
  return ((static_cast<std::uint32_t>(q.i - 1) * d.symbols + static_cast<std::uint32_t>(q.j)) * d.states +
          static_cast<std::uint32_t>(q.k)) * d.cells + static_cast<std::uint32_t>(q.l - 1);
}

inline Quad decode_quad(std::uint32_t code, const Dims& d) {
  Quad q;
  q.l = static_cast<int>(code % d.cells) + 1;
  code /= d.cells;
  q.k = static_cast<int>(code % d.states);
  code /= d.states;
  q.j = static_cast<int>(code % d.symbols);
  code /= d.symbols;
  q.i = static_cast<int>(code) + 1;
  return q;
}

/// Code of the local pair (i, j) in [0, N(m+1)).
inline std::uint32_t local_code(const Quad& q, const Dims& d) {
  return static_cast<std::uint32_t>(q.i - 1) * d.symbols + static_cast<std::uint32_t>(q.j);
}

/// Code of the global pair (k, l) in [0, (n+1)N).
inline std::uint32_t global_code(const Quad& q, const Dims& d) {
  return static_cast<std::uint32_t>(q.k) * d.cells + static_cast<std::uint32_t>(q.l - 1);
}

inline std::uint32_t local_count(const Dims& d) { return static_cast<std::uint32_t>(d.cells * d.symbols); }
inline std::uint32_t global_count(const Dims& d) { return static_cast<std::uint32_t>(d.states * d.cells); }

inline Quad join_quad(std::uint32_t local, std::uint32_t global, const Dims& d) {
  return Quad{static_cast<int>(local / d.symbols) + 1, static_cast<int>(local % d.symbols),
              static_cast<int>(global / d.cells), static_cast<int>(global % d.cells) + 1};
}

using Entry = std::pair<std::vector<Quad>, Scalar>;

/// Exact-integer coordinate-sparse tensor over `upper + 1` Quad groups, the
/// last of which is the lower (output) group.
///
/// Entries are kept sorted by their group sequence and never hold zero.
class SparseTensor {
 public:
  SparseTensor() = default;

  /// The zero tensor of the given shape.
  SparseTensor(Dims dims, int upper) : dims_(dims), upper_(upper) {
    dims_.validate();
    if (upper_ < 0) throw Error(ErrorKind::InvalidArgument, "negative upper count");
  }

  const Dims& dims() const { return dims_; }
  int upper() const { return upper_; }
  int arity() const { return upper_ + 1; }
  int order() const { return 4 * (upper_ + 1); }
  std::size_t nnz() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<const std::uint32_t> codes(std::size_t e) const {
    return {coords_.data() + e * static_cast<std::size_t>(arity()), static_cast<std::size_t>(arity())};
  }
  Quad quad(std::size_t e, int group) const { return decode_quad(codes(e)[static_cast<std::size_t>(group)], dims_); }
  Quad lower(std::size_t e) const { return quad(e, upper_); }
  const Scalar& value(std::size_t e) const { return values_[e]; }

  Scalar get(std::span<const Quad> idx) const {
    if (static_cast<int>(idx.size()) != arity()) {
      throw Error(ErrorKind::ArityMismatch,
                  "expected " + std::to_string(arity()) + " groups, got " + std::to_string(idx.size()));
    }
    std::vector<std::uint32_t> key(idx.size());
    for (std::size_t g = 0; g < idx.size(); ++g) key[g] = encode_quad(idx[g], dims_);
    return get_codes(key);
  }
  Scalar get(std::initializer_list<Quad> idx) const { return get(std::span<const Quad>(idx.begin(), idx.size())); }

  Scalar get_codes(std::span<const std::uint32_t> key) const {
    std::size_t lo = 0;
    std::size_t hi = nnz();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto c = codes(mid);
      if (std::lexicographical_compare(c.begin(), c.end(), key.begin(), key.end())) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo < nnz()) {
      auto c = codes(lo);
      if (std::equal(c.begin(), c.end(), key.begin(), key.end())) return values_[lo];
    }
    return 0;
  }

  /// Same shape and identical entry maps.
  friend bool operator==(const SparseTensor& a, const SparseTensor& b) {
    return a.dims_ == b.dims_ && a.upper_ == b.upper_ && a.coords_ == b.coords_ && a.values_ == b.values_;
  }

 private:
  friend class TensorAccumulator;

  Dims dims_{};
  int upper_ = 0;
  std::vector<std::uint32_t> coords_;
  std::vector<Scalar> values_;
};

/// Collects (group codes, value) contributions, summing duplicates exactly,
/// and emits a canonical SparseTensor.
///
/// Small coordinate domains accumulate densely; larger ones go through a
/// hash map keyed on the mixed-radix code, or an ordered map when the code
/// would not fit in 64 bits.
class TensorAccumulator {
 public:
  static constexpr std::uint64_t kDenseLimit = std::uint64_t(1) << 20;

  TensorAccumulator(Dims dims, int upper) : shape_(dims, upper), radix_(dims.quad_count()) {
    std::uint64_t domain = 1;
    fits64_ = true;
    for (int g = 0; g < upper + 1; ++g) {
      if (__builtin_mul_overflow(domain, radix_, &domain)) {
        fits64_ = false;
        break;
      }
    }
    if (fits64_ && domain <= kDenseLimit) {
      dense_.assign(static_cast<std::size_t>(domain), 0);
      mode_ = Mode::Dense;
    } else if (fits64_) {
      mode_ = Mode::Hash;
    } else {
      mode_ = Mode::Ordered;
    }
  }

  int arity() const { return shape_.arity(); }

  /// Whether whole keys pack into one mixed-radix uint64 (base quad_count,
  /// most significant group first), enabling add_packed.
  bool packs64() const { return fits64_; }

  void add(std::span<const std::uint32_t> key, const Scalar& value) {
    if (value == 0) return;
    if (mode_ == Mode::Ordered) {
      ordered_[std::vector<std::uint32_t>(key.begin(), key.end())] += value;
    } else {
      add_packed(pack(key), value);
    }
  }

  void add_packed(std::uint64_t code, const Scalar& value) {
    if (value == 0) return;
    switch (mode_) {
      case Mode::Dense: {
        dense_[static_cast<std::size_t>(code)] += value;
        break;
      }
      case Mode::Hash: {
        hash_[code] += value;
        break;
      }
      case Mode::Ordered:
        throw Error(ErrorKind::InvalidArgument, "key does not pack into 64 bits");
    }
  }

  SparseTensor finish() && {
    SparseTensor out = std::move(shape_);
    const auto a = static_cast<std::size_t>(out.arity());
    std::vector<std::uint32_t> key(a);
    auto emit = [&](std::uint64_t code, const Scalar& v) {
      unpack(code, key);
      out.coords_.insert(out.coords_.end(), key.begin(), key.end());
      out.values_.push_back(v);
    };
    switch (mode_) {
      case Mode::Dense:
        for (std::size_t c = 0; c < dense_.size(); ++c) {
          if (dense_[c] != 0) emit(c, dense_[c]);
        }
        break;
      case Mode::Hash: {
        std::vector<std::pair<std::uint64_t, Scalar>> items;
        items.reserve(hash_.size());
        for (const auto& [code, v] : hash_) {
          if (v != 0) items.emplace_back(code, v);
        }
        std::sort(items.begin(), items.end());
        out.coords_.reserve(items.size() * a);
        out.values_.reserve(items.size());
        for (const auto& [code, v] : items) emit(code, v);
        break;
      }
      case Mode::Ordered:
        for (const auto& [k, v] : ordered_) {
          if (v == 0) continue;
          out.coords_.insert(out.coords_.end(), k.begin(), k.end());
          out.values_.push_back(v);
        }
        break;
    }
    return out;
  }

 private:
  enum class Mode { Dense, Hash, Ordered };

  std::uint64_t pack(std::span<const std::uint32_t> key) const {
    std::uint64_t code = 0;
    for (auto c : key) code = code * radix_ + c;
    return code;
  }

  void unpack(std::uint64_t code, std::vector<std::uint32_t>& key) const {
    for (std::size_t g = key.size(); g-- > 0;) {
      key[g] = static_cast<std::uint32_t>(code % radix_);
      code /= radix_;
    }
  }

  SparseTensor shape_;
  std::uint64_t radix_;
  bool fits64_ = true;
  Mode mode_ = Mode::Dense;
  std::vector<Scalar> dense_;
  std::unordered_map<std::uint64_t, Scalar> hash_;
  std::map<std::vector<std::uint32_t>, Scalar> ordered_;
};

/// Builds a tensor from an entry list; duplicates are summed and zero sums
/// dropped.
inline SparseTensor from_entries(Dims dims, int upper, const std::vector<Entry>& entries) {
  dims.validate();
  if (upper < 0) throw Error(ErrorKind::InvalidArgument, "negative upper count");
  TensorAccumulator acc(dims, upper);
  std::vector<std::uint32_t> key(static_cast<std::size_t>(upper + 1));
  for (const auto& [idx, value] : entries) {
    if (static_cast<int>(idx.size()) != upper + 1) {
      throw Error(ErrorKind::ArityMismatch,
                  "expected " + std::to_string(upper + 1) + " groups, got " + std::to_string(idx.size()));
    }
    for (std::size_t g = 0; g < idx.size(); ++g) key[g] = encode_quad(idx[g], dims);
    acc.add(key, value);
  }
  return std::move(acc).finish();
}

/// Rebuilds `t` keeping only entries accepted by `keep(entry_index)`.
template <class Pred>
SparseTensor filter_entries(const SparseTensor& t, Pred keep) {
  TensorAccumulator acc(t.dims(), t.upper());
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    if (keep(e)) acc.add(t.codes(e), t.value(e));
  }
  return std::move(acc).finish();
}

inline void require_same_dims(const SparseTensor& a, const SparseTensor& b) {
  if (!(a.dims() == b.dims())) throw Error(ErrorKind::DimsMismatch, "operands have different dims");
}

// ---------------------------------------------------------------------------
// Text dump:
//   dims N m n  upper u
//   i j k l | ... | i j k l : value
// ---------------------------------------------------------------------------

inline std::string dump_tensor(const SparseTensor& t) {
  std::ostringstream out;
  out << "dims " << t.dims().cells << ' ' << t.dims().m() << ' ' << t.dims().n() << "  upper " << t.upper()
      << '\n';
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    for (int g = 0; g < t.arity(); ++g) {
      if (g) out << " | ";
      auto q = t.quad(e, g);
      out << q.i << ' ' << q.j << ' ' << q.k << ' ' << q.l;
    }
    out << " : " << t.value(e) << '\n';
  }
  return out.str();
}

inline SparseTensor parse_tensor_dump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedDump, "missing header");
  std::istringstream header(line);
  std::string dims_kw, upper_kw;
  Dims dims;
  int m = -1, n = -1, upper = -1;
  if (!(header >> dims_kw >> dims.cells >> m >> n >> upper_kw >> upper) || dims_kw != "dims" ||
      upper_kw != "upper") {
    throw Error(ErrorKind::MalformedDump, "bad header '" + line + "'");
  }
  dims.symbols = m + 1;
  dims.states = n + 1;

  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto colon = line.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorKind::MalformedDump, "entry without value: '" + line + "'");
    Entry entry;
    std::istringstream value(line.substr(colon + 1));
    if (!(value >> entry.second)) throw Error(ErrorKind::MalformedDump, "bad value in '" + line + "'");
    std::istringstream groups(line.substr(0, colon));
    std::string group;
    while (std::getline(groups, group, '|')) {
      std::istringstream g(group);
      Quad q;
      if (!(g >> q.i >> q.j >> q.k >> q.l)) throw Error(ErrorKind::MalformedDump, "bad group in '" + line + "'");
      entry.first.push_back(q);
    }
    entries.push_back(std::move(entry));
  }
  return from_entries(dims, upper, entries);
}

}  // namespace tmt
