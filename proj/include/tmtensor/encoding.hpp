#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmtensor/error.hpp"
#include "tmtensor/machine.hpp"
#include "tmtensor/tensor.hpp"

namespace tmt {

inline Dims dims_for(const Machine& machine, int cells) {
  Dims d{cells, machine.m() + 1, machine.n() + 1};
  d.validate();
  return d;
}

/// 0-1 tensor with a[i, j, k, l] = 1 iff cell i holds symbol j, the state
/// is k and the head is on cell l.
inline SparseTensor encode_config(const Configuration& config, const Dims& dims) {
  dims.validate();
  if (config.cells() != dims.cells) {
    throw Error(ErrorKind::DimsMismatch, "configuration has " + std::to_string(config.cells()) + " cells, dims say " +
                                             std::to_string(dims.cells));
  }
  if (config.state < 1 || config.state > dims.n() || config.head < 1 || config.head > dims.cells) {
    throw Error(ErrorKind::DimsMismatch, "state or head outside dims");
  }
  TensorAccumulator acc(dims, 0);
  for (int i = 1; i <= dims.cells; ++i) {
    int j = config.tape[static_cast<std::size_t>(i - 1)];
    if (j < 0 || j >= dims.symbols) throw Error(ErrorKind::DimsMismatch, "tape symbol outside dims");
    std::uint32_t code = encode_quad(Quad{i, j, config.state, config.head}, dims);
    acc.add(std::span<const std::uint32_t>(&code, 1), 1);
  }
  return std::move(acc).finish();
}

/// Inverse of encode_config. Throws NotCharacteristic unless the tensor is
/// 0-1 valued with one symbol per cell and a single shared (k != 0, l).
inline Configuration decode_config(const SparseTensor& a) {
  if (a.upper() != 0) throw Error(ErrorKind::ArityMismatch, "configuration tensors have no upper groups");
  const auto& d = a.dims();
  if (a.nnz() != static_cast<std::size_t>(d.cells)) {
    throw Error(ErrorKind::NotCharacteristic,
                "expected " + std::to_string(d.cells) + " entries, found " + std::to_string(a.nnz()));
  }
  Configuration out{std::vector<int>(static_cast<std::size_t>(d.cells), -1), 0, 0};
  for (std::size_t e = 0; e < a.nnz(); ++e) {
    if (a.value(e) != 1) throw Error(ErrorKind::NotCharacteristic, "entry value " + to_string(a.value(e)));
    auto q = a.lower(e);
    if (e == 0) {
      out.state = q.k;
      out.head = q.l;
    } else if (q.k != out.state || q.l != out.head) {
      throw Error(ErrorKind::NotCharacteristic, "entries disagree on state or head");
    }
    auto& cell = out.tape[static_cast<std::size_t>(q.i - 1)];
    if (cell != -1) throw Error(ErrorKind::NotCharacteristic, "cell " + std::to_string(q.i) + " holds two symbols");
    cell = q.j;
  }
  if (out.state == 0) throw Error(ErrorKind::NotCharacteristic, "state index 0");
  return out;
}

/// Deletes every entry whose lower-group state index is 0.
inline SparseTensor restrict_k_nonzero(const SparseTensor& a) {
  if (a.upper() != 0) throw Error(ErrorKind::ArityMismatch, "restriction applies to configuration tensors");
  return filter_entries(a, [&](std::size_t e) { return a.lower(e).k != 0; });
}

struct DroppedEntry {
  int i = 0;
  int j = 0;
  int k = 0;

  friend bool operator==(const DroppedEntry&, const DroppedEntry&) = default;
};

inline std::string format_dropped(const DroppedEntry& d) {
  return "dropped: i=" + std::to_string(d.i) + " j=" + std::to_string(d.j) + " k=" + std::to_string(d.k);
}

struct MachineTensor {
  SparseTensor tensor;
  std::vector<DroppedEntry> dropped;
};

/// Order-8 transition tensor of `machine` over an N-cell window.
///
/// Inactive cells (i1 != l1) keep their symbol and move to state 0; the
/// active cell follows the extended delta. Active-cell entries whose new
/// head position leaves the window are omitted and listed in `dropped`.
inline MachineTensor encode_machine(const Machine& machine, const Dims& dims) {
  dims.validate();
  if (dims.symbols != machine.m() + 1 || dims.states != machine.n() + 1) {
    throw Error(ErrorKind::DimsMismatch, "dims do not match the machine's alphabet and state set");
  }
  const auto delta = extend_delta(machine);
  TensorAccumulator acc(dims, 1);
  MachineTensor out;
  std::uint32_t key[2];
  for (int i1 = 1; i1 <= dims.cells; ++i1) {
    for (int j1 = 0; j1 < dims.symbols; ++j1) {
      for (int k1 = 1; k1 < dims.states; ++k1) {
        for (int l1 = 1; l1 <= dims.cells; ++l1) {
          key[0] = encode_quad(Quad{i1, j1, k1, l1}, dims);
          if (i1 != l1) {
            key[1] = encode_quad(Quad{i1, j1, 0, l1}, dims);
          } else {
            const auto& t = delta.at(j1, k1);
            int l2 = l1 + t.move;
            if (l2 < 1 || l2 > dims.cells) {
              out.dropped.push_back({i1, j1, k1});
              continue;
            }
            key[1] = encode_quad(Quad{i1, t.symbol, t.state, l2}, dims);
          }
          acc.add(key, 1);
        }
      }
    }
  }
  out.tensor = std::move(acc).finish();
  return out;
}

}  // namespace tmt
