#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmtensor/error.hpp"

namespace tmt {

/// One row of the transition function: symbol written, next state, head move.
struct Transition {
  int symbol = 0;
  int state = 0;
  int move = 0;  // -1, 0 or +1

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A one-tape deterministic machine.
///
/// State indices run 1..n in listing order (index 0 is the reserved
/// bookkeeping state and never names a real state); symbol indices run 0..m
/// with 0 the blank. The first listed state is the start state.
class Machine {
 public:
  Machine() = default;

  int n() const { return static_cast<int>(states_.size()); }
  int m() const { return static_cast<int>(symbols_.size()) - 1; }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<int>& halt_states() const { return halt_; }
  const std::vector<int>& input_symbols() const { return input_; }
  int start_state() const { return 1; }

  const std::string& state_name(int k) const { return states_.at(static_cast<std::size_t>(k - 1)); }
  const std::string& symbol_name(int j) const { return symbols_.at(static_cast<std::size_t>(j)); }

  std::optional<int> state_index(std::string_view name) const {
    auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end()) return std::nullopt;
    return static_cast<int>(it - states_.begin()) + 1;
  }

  std::optional<int> symbol_index(std::string_view name) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), name);
    if (it == symbols_.end()) return std::nullopt;
    return static_cast<int>(it - symbols_.begin());
  }

  bool is_halting(int k) const { return std::binary_search(halt_.begin(), halt_.end(), k); }

  bool is_input_symbol(int j) const { return std::binary_search(input_.begin(), input_.end(), j); }

  /// Raw delta; defined only for k in [1..n] outside the halting set.
  const Transition& rule(int j, int k) const {
    const auto& slot = delta_.at(slot_of(j, k));
    if (!slot) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "delta undefined at symbol " + std::to_string(j) + ", state " + std::to_string(k));
    }
    return *slot;
  }

  friend bool operator==(const Machine&, const Machine&) = default;

 private:
  friend struct MachineBuilder;

  std::size_t slot_of(int j, int k) const {
    if (j < 0 || j > m() || k < 1 || k > n()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "delta index (" + std::to_string(j) + ", " + std::to_string(k) + ")");
    }
    return static_cast<std::size_t>(k - 1) * symbols_.size() + static_cast<std::size_t>(j);
  }

  std::vector<std::string> states_;
  std::vector<std::string> symbols_;
  std::vector<int> halt_;
  std::vector<int> input_;
  std::vector<std::optional<Transition>> delta_;
};

/// delta extended to every (symbol, state) pair including state 0.
class ExtendedDelta {
 public:
  ExtendedDelta(int m, int n, std::vector<Transition> table)
      : m_(m), n_(n), table_(std::move(table)) {}

  int m() const { return m_; }
  int n() const { return n_; }

  const Transition& at(int j, int k) const {
    if (j < 0 || j > m_ || k < 0 || k > n_) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "extended delta index (" + std::to_string(j) + ", " + std::to_string(k) + ")");
    }
    return table_[static_cast<std::size_t>(k) * static_cast<std::size_t>(m_ + 1) +
                  static_cast<std::size_t>(j)];
  }

 private:
  int m_;
  int n_;
  std::vector<Transition> table_;
};

/// Tape window of N cells (cell i lives at tape[i-1]), head in [1..N].
struct Configuration {
  std::vector<int> tape;
  int head = 1;
  int state = 1;

  int cells() const { return static_cast<int>(tape.size()); }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct MachineFile {
  Machine machine;
  std::optional<std::vector<int>> tape;
};

struct MachineBuilder {
  static Machine build(std::vector<std::string> states, std::vector<std::string> symbols,
                       std::vector<int> halt, std::vector<int> input,
                       std::vector<std::optional<Transition>> delta) {
    Machine out;
    out.states_ = std::move(states);
    out.symbols_ = std::move(symbols);
    out.halt_ = std::move(halt);
    out.input_ = std::move(input);
    out.delta_ = std::move(delta);
    std::sort(out.halt_.begin(), out.halt_.end());
    std::sort(out.input_.begin(), out.input_.end());
    return out;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

inline int parse_move(const std::string& token) {
  if (token == "L") return -1;
  if (token == "R") return +1;
  if (token == "S") return 0;
  throw Error(ErrorKind::UnknownToken, "direction '" + token + "' (expected L, R or S)");
}

inline std::string move_token(int move) { return move < 0 ? "L" : (move > 0 ? "R" : "S"); }

}  // namespace detail

/// Resolves whitespace-separated symbol tokens against the machine; only the
/// blank and declared input symbols are allowed on an initial tape.
inline std::vector<int> parse_tape(const Machine& machine, std::string_view text) {
  std::vector<int> out;
  for (const auto& token : detail::split_ws(text)) {
    auto j = machine.symbol_index(token);
    if (!j) throw Error(ErrorKind::UnknownToken, "tape symbol '" + token + "'");
    if (*j != 0 && !machine.is_input_symbol(*j)) {
      throw Error(ErrorKind::InvalidDeclaration, "tape symbol '" + token + "' is not an input symbol");
    }
    out.push_back(*j);
  }
  return out;
}

/// Parses a machine description; see README for the grammar.
inline MachineFile parse_machine_file(std::string_view text) {
  std::map<std::string, std::vector<std::string>> headers;
  std::vector<std::vector<std::string>> delta_lines;
  std::optional<std::string> tape_text;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorKind::UnknownToken, "line without a key: '" + std::string(line) + "'");
    }
    std::string key(detail::trim(line.substr(0, colon)));
    auto rest = line.substr(colon + 1);
    if (key == "delta") {
      delta_lines.push_back(detail::split_ws(rest));
    } else if (key == "tape") {
      if (tape_text) throw Error(ErrorKind::DuplicateName, "repeated 'tape:' line");
      tape_text = std::string(rest);
    } else if (key == "states" || key == "start" || key == "halt" || key == "symbols" ||
               key == "input") {
      if (headers.count(key)) throw Error(ErrorKind::DuplicateName, "repeated '" + key + ":' line");
      headers[key] = detail::split_ws(rest);
    } else {
      throw Error(ErrorKind::UnknownToken, "unknown key '" + key + "'");
    }
  }

  for (const char* required : {"states", "start", "symbols"}) {
    auto it = headers.find(required);
    if (it == headers.end() || it->second.empty()) {
      throw Error(ErrorKind::MissingField, std::string("'") + required + ":' line");
    }
  }

  const auto& states = headers["states"];
  const auto& symbols = headers["symbols"];
  for (std::size_t a = 0; a < states.size(); ++a) {
    if (states[a] == "q0") throw Error(ErrorKind::ReservedName, "state name 'q0' is reserved");
    for (std::size_t b = 0; b < a; ++b) {
      if (states[a] == states[b]) throw Error(ErrorKind::DuplicateName, "state '" + states[a] + "'");
    }
  }
  for (std::size_t a = 0; a < symbols.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (symbols[a] == symbols[b]) throw Error(ErrorKind::DuplicateName, "symbol '" + symbols[a] + "'");
    }
  }

  auto state_of = [&](const std::string& name) {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) throw Error(ErrorKind::UnknownToken, "state '" + name + "'");
    return static_cast<int>(it - states.begin()) + 1;
  };
  auto symbol_of = [&](const std::string& name) {
    auto it = std::find(symbols.begin(), symbols.end(), name);
    if (it == symbols.end()) throw Error(ErrorKind::UnknownToken, "symbol '" + name + "'");
    return static_cast<int>(it - symbols.begin());
  };

  const auto& start = headers["start"];
  if (start.size() != 1) throw Error(ErrorKind::InvalidDeclaration, "'start:' takes exactly one state");
  if (state_of(start.front()) != 1) {
    throw Error(ErrorKind::InvalidDeclaration, "start state must be listed first in 'states:'");
  }

  std::vector<int> halt;
  if (auto it = headers.find("halt"); it != headers.end()) {
    for (const auto& name : it->second) {
      int k = state_of(name);
      if (std::find(halt.begin(), halt.end(), k) != halt.end()) {
        throw Error(ErrorKind::DuplicateName, "halt state '" + name + "'");
      }
      halt.push_back(k);
    }
  }
  std::sort(halt.begin(), halt.end());

  std::vector<int> input;
  if (auto it = headers.find("input"); it != headers.end()) {
    for (const auto& name : it->second) {
      int j = symbol_of(name);
      if (j == 0) throw Error(ErrorKind::InvalidDeclaration, "the blank cannot be an input symbol");
      if (std::find(input.begin(), input.end(), j) != input.end()) {
        throw Error(ErrorKind::DuplicateName, "input symbol '" + name + "'");
      }
      input.push_back(j);
    }
  } else {
    for (int j = 1; j < static_cast<int>(symbols.size()); ++j) input.push_back(j);
  }

  const auto width = symbols.size();
  std::vector<std::optional<Transition>> delta(states.size() * width);
  for (const auto& tokens : delta_lines) {
    if (tokens.size() != 6 || tokens[2] != "->") {
      throw Error(ErrorKind::UnknownToken, "delta line must read '<state> <symbol> -> <state> <symbol> <L|R|S>'");
    }
    int k = state_of(tokens[0]);
    int j = symbol_of(tokens[1]);
    Transition t{symbol_of(tokens[4]), state_of(tokens[3]), detail::parse_move(tokens[5])};
    bool halting = std::binary_search(halt.begin(), halt.end(), k);
    if (halting) {
      // Halting rows may only restate the absorbing rule.
      if (t.move != 0 || t.state != k || t.symbol != j) {
        throw Error(ErrorKind::InvalidDeclaration,
                    "rule from halting state '" + tokens[0] + "' must be '" + tokens[0] + " " +
                        tokens[1] + " -> " + tokens[0] + " " + tokens[1] + " S'");
      }
      continue;
    }
    if (t.move == 0) {
      throw Error(ErrorKind::InvalidDeclaration, "'S' is only allowed on halting rows");
    }
    auto& slot = delta[static_cast<std::size_t>(k - 1) * width + static_cast<std::size_t>(j)];
    if (slot) throw Error(ErrorKind::DuplicateName, "second rule for (" + tokens[0] + ", " + tokens[1] + ")");
    slot = t;
  }
  for (int k = 1; k <= static_cast<int>(states.size()); ++k) {
    if (std::binary_search(halt.begin(), halt.end(), k)) continue;
    for (int j = 0; j < static_cast<int>(width); ++j) {
      if (!delta[static_cast<std::size_t>(k - 1) * width + static_cast<std::size_t>(j)]) {
        throw Error(ErrorKind::IncompleteDelta, "no rule for (" + states[static_cast<std::size_t>(k - 1)] +
                                                    ", " + symbols[static_cast<std::size_t>(j)] + ")");
      }
    }
  }

  MachineFile out{MachineBuilder::build(states, symbols, std::move(halt), std::move(input), std::move(delta)),
                  std::nullopt};
  if (tape_text) out.tape = parse_tape(out.machine, *tape_text);
  return out;
}

inline Machine parse_machine(std::string_view text) { return parse_machine_file(text).machine; }

inline std::string serialize_machine(const Machine& machine) {
  std::ostringstream out;
  auto join = [&](const std::vector<std::string>& names) {
    for (const auto& name : names) out << ' ' << name;
    out << '\n';
  };
  out << "states:";
  join(machine.states());
  out << "start: " << machine.state_name(machine.start_state()) << '\n';
  out << "halt:";
  for (int k : machine.halt_states()) out << ' ' << machine.state_name(k);
  out << '\n';
  out << "symbols:";
  join(machine.symbols());
  out << "input:";
  for (int j : machine.input_symbols()) out << ' ' << machine.symbol_name(j);
  out << '\n';
  for (int k = 1; k <= machine.n(); ++k) {
    if (machine.is_halting(k)) continue;
    for (int j = 0; j <= machine.m(); ++j) {
      const auto& t = machine.rule(j, k);
      out << "delta: " << machine.state_name(k) << ' ' << machine.symbol_name(j) << " -> "
          << machine.state_name(t.state) << ' ' << machine.symbol_name(t.symbol) << ' '
          << detail::move_token(t.move) << '\n';
    }
  }
  return out.str();
}

/// Totalizes delta: state 0 copies its symbol and stays put, halting states
/// are absorbing, every other pair follows the machine.
inline ExtendedDelta extend_delta(const Machine& machine) {
  const int m = machine.m();
  const int n = machine.n();
  std::vector<Transition> table(static_cast<std::size_t>((m + 1) * (n + 1)));
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= m; ++j) {
      auto& t = table[static_cast<std::size_t>(k * (m + 1) + j)];
      if (k == 0 || machine.is_halting(k)) {
        t = Transition{j, k, 0};
      } else {
        t = machine.rule(j, k);
      }
    }
  }
  return ExtendedDelta(m, n, std::move(table));
}

inline void check_configuration(const Machine& machine, const Configuration& config) {
  if (config.tape.empty()) throw Error(ErrorKind::InvalidArgument, "empty tape window");
  if (config.head < 1 || config.head > config.cells()) {
    throw Error(ErrorKind::IndexOutOfRange, "head " + std::to_string(config.head));
  }
  if (config.state < 1 || config.state > machine.n()) {
    throw Error(ErrorKind::IndexOutOfRange, "state " + std::to_string(config.state));
  }
  for (int j : config.tape) {
    if (j < 0 || j > machine.m()) throw Error(ErrorKind::IndexOutOfRange, "tape symbol " + std::to_string(j));
  }
}

/// Lays `tape` into cells 1..k of an N-cell window, blanks after, head on
/// cell 1 in the start state.
inline Configuration initial_configuration(const Machine& machine, const std::vector<int>& tape, int cells) {
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "window needs at least one cell");
  if (static_cast<int>(tape.size()) > cells) {
    throw Error(ErrorKind::InvalidArgument,
                "tape of " + std::to_string(tape.size()) + " symbols does not fit in " + std::to_string(cells) + " cells");
  }
  Configuration out{std::vector<int>(static_cast<std::size_t>(cells), 0), 1, machine.start_state()};
  std::copy(tape.begin(), tape.end(), out.tape.begin());
  check_configuration(machine, out);
  return out;
}

enum class StepStatus { Ok, Halted, BoundaryOverflow };

struct StepResult {
  StepStatus status = StepStatus::Ok;
  Configuration next;  // meaningful only when status == Ok
};

inline StepResult oracle_step(const Machine& machine, const Configuration& config) {
  check_configuration(machine, config);
  if (machine.is_halting(config.state)) return {StepStatus::Halted, {}};
  const auto& t = machine.rule(config.tape[static_cast<std::size_t>(config.head - 1)], config.state);
  int head = config.head + t.move;
  if (head < 1 || head > config.cells()) return {StepStatus::BoundaryOverflow, {}};
  StepResult out{StepStatus::Ok, config};
  out.next.tape[static_cast<std::size_t>(config.head - 1)] = t.symbol;
  out.next.state = t.state;
  out.next.head = head;
  return out;
}

enum class RunStatus { Halted, BoundaryOverflow, StepLimit };

inline std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Halted: return "halted";
    case RunStatus::BoundaryOverflow: return "overflow";
    case RunStatus::StepLimit: return "steplimit";
  }
  return "unknown";
}

struct Trace {
  std::vector<Configuration> configs;
  RunStatus status = RunStatus::StepLimit;
};

inline Trace oracle_run(const Machine& machine, const Configuration& initial, int max_steps) {
  Trace out;
  out.configs.push_back(initial);
  for (;;) {
    const auto& current = out.configs.back();
    if (machine.is_halting(current.state)) {
      out.status = RunStatus::Halted;
      break;
    }
    if (static_cast<int>(out.configs.size()) > max_steps) {
      out.status = RunStatus::StepLimit;
      break;
    }
    auto step = oracle_step(machine, current);
    if (step.status == StepStatus::BoundaryOverflow) {
      out.status = RunStatus::BoundaryOverflow;
      break;
    }
    out.configs.push_back(std::move(step.next));
  }
  return out;
}

/// `t=<t> state=<name> head=<l> tape=<s1,s2,...>`
inline std::string format_config_line(const Machine& machine, int t, const Configuration& config) {
  std::ostringstream out;
  out << "t=" << t << " state=" << machine.state_name(config.state) << " head=" << config.head << " tape=";
  for (std::size_t c = 0; c < config.tape.size(); ++c) {
    if (c) out << ',';
    out << machine.symbol_name(config.tape[c]);
  }
  return out.str();
}

}  // namespace tmt
