#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tmtensor/tmtensor.hpp"

namespace tmt::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kResource = 3 };

struct MachineArgs {
  std::string machine_file;
  std::optional<std::string> tape;
  int cells = 8;
  int steps = 20;
};

struct Loaded {
  Machine machine;
  std::optional<std::vector<int>> tape;
};

inline Loaded load(const MachineArgs& args) {
  std::ifstream in(args.machine_file);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open machine file '" + args.machine_file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto file = parse_machine_file(buffer.str());
  Loaded out{std::move(file.machine), std::move(file.tape)};
  if (args.tape) out.tape = parse_tape(out.machine, *args.tape);
  return out;
}

inline Configuration initial_of(const Loaded& loaded, int cells) {
  return initial_configuration(loaded.machine, loaded.tape.value_or(std::vector<int>{}), cells);
}

inline int cmd_simulate(const MachineArgs& args, std::ostream& out) {
  auto loaded = load(args);
  auto trace = oracle_run(loaded.machine, initial_of(loaded, args.cells), args.steps);
  for (std::size_t t = 0; t < trace.configs.size(); ++t) {
    out << format_config_line(loaded.machine, static_cast<int>(t) + 1, trace.configs[t]) << '\n';
  }
  out << "status=" << to_string(trace.status) << '\n';
  return kOk;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  f << text;
}

inline int cmd_evolve(const MachineArgs& args, const std::optional<std::string>& dump_dir, bool strict,
                      std::ostream& out) {
  auto loaded = load(args);
  const auto& machine = loaded.machine;
  const auto dims = dims_for(machine, args.cells);
  const auto encoded = encode_machine(machine, dims);
  const auto evo = evolve(encode_config(initial_of(loaded, args.cells), dims), encoded.tensor, args.steps);

  bool printing = true;
  bool halted = false;
  bool overflow = false;
  for (std::size_t t = 1; t <= evo.states.size(); ++t) {
    const auto& a = evo.states[t - 1];
    std::string_view status = to_string(EvolveStatus::Ok);
    if (t >= 2 && evo.steps[t - 2] == EvolveStatus::Overflow) {
      status = to_string(EvolveStatus::Overflow);
      overflow = true;
      printing = false;
    } else {
      auto config = decode_config(restrict_k_nonzero(a));
      if (printing) out << format_config_line(machine, static_cast<int>(t), config) << '\n';
      if (machine.is_halting(config.state)) {
        status = to_string(EvolveStatus::Halted);
        halted = true;
        printing = false;
      }
    }
    out << format_step_line(static_cast<int>(t), a.nnz(), status) << '\n';
  }
  RunStatus final_status = overflow ? RunStatus::BoundaryOverflow : (halted ? RunStatus::Halted : RunStatus::StepLimit);
  out << "status=" << to_string(final_status) << '\n';

  if (dump_dir) {
    std::filesystem::create_directories(*dump_dir);
    write_file(std::filesystem::path(*dump_dir) / "B.tsv", dump_tensor(encoded.tensor));
    for (std::size_t t = 1; t <= evo.states.size(); ++t) {
      write_file(std::filesystem::path(*dump_dir) / ("A_" + std::to_string(t) + ".tsv"), dump_tensor(evo.states[t - 1]));
    }
  }
  for (const auto& d : encoded.dropped) std::cerr << format_dropped(d) << '\n';
  return (strict && overflow) ? kFail : kOk;
}

inline int cmd_verify(const MachineArgs& args, std::ostream& out) {
  auto loaded = load(args);
  const auto dims = dims_for(loaded.machine, args.cells);
  auto report = verify_theorem1(loaded.machine, loaded.tape.value_or(std::vector<int>{}), dims, args.steps);
  out << report.text();
  return report.passed() ? kOk : kFail;
}

inline int cmd_compose(const MachineArgs& args, int power, bool steps_given, std::uint64_t cap, std::ostream& out) {
  auto loaded = load(args);
  const auto& machine = loaded.machine;
  const auto dims = dims_for(machine, args.cells);
  const auto b = encode_machine(machine, dims).tensor;
  ProductOptions options;
  options.max_entries = cap;
  const auto composite = type2_power(b, power, options);
  out << "power=" << power << " upper=" << composite.upper() << " order=" << composite.order()
      << " nnz=" << composite.nnz() << '\n';
  if (!loaded.tape) return kOk;

  // Apply the composite `applications` times and compare with the oracle
  // after power * s single steps.
  const int applications = steps_given ? args.steps : 1;
  const auto initial = initial_of(loaded, args.cells);
  const auto trace = oracle_run(machine, initial, power * applications);
  Report report;
  auto a = encode_config(initial, dims);
  for (int s = 1; s <= applications; ++s) {
    a = type1(a, composite);
    const auto index = static_cast<std::size_t>(s * power);
    SparseTensor expected(dims, 0);
    if (index < trace.configs.size()) {
      expected = encode_config(trace.configs[index], dims);
    } else if (trace.status == RunStatus::Halted) {
      expected = encode_config(trace.configs.back(), dims);
    }
    const auto restricted = restrict_k_nonzero(a);
    Check check{"compose.power=" + std::to_string(power) + ".s=" + std::to_string(s), std::nullopt,
                restricted == expected, {}};
    if (!check.pass) check.witness = first_difference(restricted, expected);
    report.checks.push_back(std::move(check));
  }
  out << report.text();
  return report.passed() ? kOk : kFail;
}

struct AssocArgs {
  int cells = 2;
  int m = 1;
  int n = 1;
  int p = 1;
  int q = 1;
  std::optional<int> r;
  int trials = 100;
  std::uint64_t seed = 1;
  double density = 0.2;
  std::uint64_t cap = ProductOptions{}.max_entries;
};

inline constexpr std::int64_t kTrialValueBound = 3;

inline int cmd_assoc(const AssocArgs& args, std::ostream& out) {
  Dims dims{args.cells, args.m + 1, args.n + 1};
  dims.validate();
  ProductOptions options;
  options.max_entries = args.cap;
  Report report;
  for (int trial = 0; trial < args.trials; ++trial) {
    const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(trial);
    auto mixed = mixed_assoc_trial(dims, args.p, args.q, args.density, kTrialValueBound, seed, options);
    Check check{"mixed.p=" + std::to_string(args.p) + ".q=" + std::to_string(args.q), seed, mixed.pass,
                mixed.witness};
    out << check.line() << '\n';
    report.checks.push_back(std::move(check));
    if (args.r) {
      auto pure = type2_assoc_trial(dims, args.p, args.q, *args.r, args.density, kTrialValueBound, seed, 10, options);
      std::string tag = ".p=" + std::to_string(args.p) + ".q=" + std::to_string(args.q) + ".r=" + std::to_string(*args.r);
      Check entrywise{"type2.entrywise" + tag, seed, pure.entrywise, {}};
      if (!pure.entrywise) {
        entrywise.witness = pure.witness;
        if (pure.permutation) {
          entrywise.witness += ";perm=";
          for (std::size_t g = 0; g < pure.permutation->size(); ++g) {
            if (g) entrywise.witness += ",";
            entrywise.witness += std::to_string((*pure.permutation)[g] + 1);
          }
        }
      }
      Check action{"type2.action" + tag, seed, pure.action, pure.action ? std::string{} : pure.witness};
      out << entrywise.line() << '\n' << action.line() << '\n';
      report.checks.push_back(std::move(entrywise));
      report.checks.push_back(std::move(action));
    }
  }
  return report.passed() ? kOk : kFail;
}

inline void add_machine_args(CLI::App* cmd, MachineArgs& args) {
  cmd->add_option("machine", args.machine_file, "Machine description file")->required();
  cmd->add_option("--tape", args.tape, "Initial tape symbols, whitespace separated (overrides the file's tape: line)");
  cmd->add_option("--cells", args.cells, "Tape window size N")->check(CLI::PositiveNumber);
  cmd->add_option("--steps", args.steps, "Number of steps T")->check(CLI::NonNegativeNumber);
}

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor representation of one-tape Turing machines"};
  app.require_subcommand(1);

  MachineArgs sim_args, evo_args, ver_args, comp_args;
  auto* simulate = app.add_subcommand("simulate", "Print the direct-simulation trace");
  add_machine_args(simulate, sim_args);

  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve the configuration tensor and print the decoded trace");
  add_machine_args(evolve_cmd, evo_args);
  std::optional<std::string> dump_dir;
  bool strict = false;
  evolve_cmd->add_option("--dump-dir", dump_dir, "Write A_<t>.tsv and B.tsv here");
  evolve_cmd->add_flag("--strict", strict, "Exit nonzero on boundary overflow");

  auto* verify = app.add_subcommand("verify", "Compare tensor evolution against the simulator step by step");
  add_machine_args(verify, ver_args);

  auto* compose = app.add_subcommand("compose", "Build the Type II power of the transition tensor");
  add_machine_args(compose, comp_args);
  int power = 2;
  std::uint64_t compose_cap = ProductOptions{}.max_entries;
  compose->add_option("--power", power, "Exponent e >= 1")->check(CLI::PositiveNumber);
  compose->add_option("--cap", compose_cap, "Maximum stored entries of a Type II product");

  AssocArgs assoc_args;
  auto* assoc = app.add_subcommand("assoc", "Random associativity trials");
  assoc->add_option("--cells", assoc_args.cells, "N")->check(CLI::PositiveNumber);
  assoc->add_option("--m", assoc_args.m, "Largest symbol index m")->check(CLI::NonNegativeNumber);
  assoc->add_option("--n", assoc_args.n, "Number of states n")->check(CLI::PositiveNumber);
  assoc->add_option("--p", assoc_args.p, "Upper groups of B")->check(CLI::PositiveNumber);
  assoc->add_option("--q", assoc_args.q, "Upper groups of C")->check(CLI::PositiveNumber);
  assoc->add_option("--r", assoc_args.r, "Upper groups of F; enables the Type II trials")->check(CLI::PositiveNumber);
  assoc->add_option("--trials", assoc_args.trials, "Number of trials")->check(CLI::NonNegativeNumber);
  assoc->add_option("--seed", assoc_args.seed, "First seed; trial t uses seed + t");
  assoc->add_option("--density", assoc_args.density, "Nonzero probability per coordinate")->check(CLI::Range(0.0, 1.0));
  assoc->add_option("--cap", assoc_args.cap, "Maximum stored entries of a Type II product");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage_out, usage_err;
    int code = app.exit(e, usage_out, usage_err);
    out << usage_out.str();
    err << usage_err.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim_args, out);
    if (*evolve_cmd) return cmd_evolve(evo_args, dump_dir, strict, out);
    if (*verify) return cmd_verify(ver_args, out);
    if (*compose) return cmd_compose(comp_args, power, compose->count("--steps") > 0, compose_cap, out);
    if (*assoc) return cmd_assoc(assoc_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ResourceLimit ? kResource : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tmt::cli
