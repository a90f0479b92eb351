#include <gtest/gtest.h>

#include <random>
#include <string>

#include "test_support.hpp"
#include "tmtensor/machine.hpp"

namespace tmt {
namespace {

using testing::kM1;

ErrorKind kind_of(const std::string& text) {
  try {
    parse_machine(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ErrorKind::InvalidArgument;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

Configuration config(std::vector<int> tape, int head, int state) { return {std::move(tape), head, state}; }

TEST(ParseMachine, UnaryAppend) {
  auto m = parse_machine(kM1);
  EXPECT_EQ(m.n(), 2);
  EXPECT_EQ(m.m(), 1);
  EXPECT_EQ(m.halt_states(), std::vector<int>{2});
  EXPECT_EQ(m.start_state(), 1);
  EXPECT_EQ(m.input_symbols(), std::vector<int>{1});
  EXPECT_EQ(m.rule(1, 1), (Transition{1, 1, +1}));
  EXPECT_EQ(m.rule(0, 1), (Transition{1, 2, +1}));
  EXPECT_THROW(m.rule(0, 2), Error);
}

TEST(ParseMachine, CommentsAndBlankLines) {
  auto m = parse_machine(std::string("# header\n\n") + replace(kM1, "symbols: _ 1", "symbols: _ 1   # blank first"));
  EXPECT_EQ(m, parse_machine(kM1));
}

TEST(ParseMachine, Errors) {
  EXPECT_EQ(kind_of(replace(kM1, "start: q1\n", "")), ErrorKind::MissingField);
  EXPECT_EQ(kind_of(replace(kM1, "states: q1 q2\n", "")), ErrorKind::MissingField);
  EXPECT_EQ(kind_of(replace(kM1, "symbols: _ 1\n", "")), ErrorKind::MissingField);
  EXPECT_EQ(kind_of(replace(kM1, "states: q1 q2", "states: q1 q2 q0")), ErrorKind::ReservedName);
  EXPECT_EQ(kind_of(replace(kM1, "states: q1 q2", "states: q1 q2 q1")), ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of(replace(kM1, "symbols: _ 1", "symbols: _ 1 _")), ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of(std::string(kM1) + "delta: q1 1 -> q2 1 R\n"), ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of(std::string(kM1) + "halt: q1\n"), ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of(replace(kM1, "delta: q1 _ -> q2 1 R\n", "")), ErrorKind::IncompleteDelta);
  EXPECT_EQ(kind_of(std::string(kM1) + "colour: red\n"), ErrorKind::UnknownToken);
  EXPECT_EQ(kind_of(replace(kM1, "q1 1 -> q1 1 R", "q1 1 -> q1 1 X")), ErrorKind::UnknownToken);
  EXPECT_EQ(kind_of(replace(kM1, "q1 1 -> q1 1 R", "q1 1 -> q9 1 R")), ErrorKind::UnknownToken);
  EXPECT_EQ(kind_of(replace(kM1, "q1 1 -> q1 1 R", "q1 1 q1 1 R")), ErrorKind::UnknownToken);
  EXPECT_EQ(kind_of(std::string(kM1) + "just words\n"), ErrorKind::UnknownToken);
  EXPECT_EQ(kind_of(replace(kM1, "start: q1", "start: q2")), ErrorKind::InvalidDeclaration);
  EXPECT_EQ(kind_of(replace(kM1, "q1 1 -> q1 1 R", "q1 1 -> q1 1 S")), ErrorKind::InvalidDeclaration);
  EXPECT_EQ(kind_of(std::string(kM1) + "input: _\n"), ErrorKind::InvalidDeclaration);
  EXPECT_EQ(kind_of(std::string(kM1) + "delta: q2 1 -> q1 1 R\n"), ErrorKind::InvalidDeclaration);
}

TEST(ParseMachine, HaltRowsMayRestateAbsorption) {
  auto m = parse_machine(std::string(kM1) + "delta: q2 1 -> q2 1 S\n");
  EXPECT_EQ(m, parse_machine(kM1));
}

TEST(ParseMachine, TapeLine) {
  auto file = parse_machine_file(std::string(kM1) + "tape: 1 1\n");
  ASSERT_TRUE(file.tape);
  EXPECT_EQ(*file.tape, (std::vector<int>{1, 1}));
  EXPECT_FALSE(parse_machine_file(kM1).tape);
}

TEST(ParseTape, RejectsUnknownAndNonInputSymbols) {
  auto m = parse_machine(std::string(kM1) + "input:\n");
  EXPECT_EQ(parse_tape(m, "_ _").size(), 2u);
  try {
    parse_tape(m, "1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDeclaration);
  }
  try {
    parse_tape(parse_machine(kM1), "1 x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownToken);
  }
}

TEST(ParseMachine, CorpusFilesParse) {
  for (const char* name : {"unary_append.tm", "binary_increment.tm", "bouncer.tm"}) {
    EXPECT_NO_THROW(testing::corpus(name)) << name;
  }
  EXPECT_EQ(testing::corpus("unary_append.tm").machine, parse_machine(kM1));
}

// Random machines survive serialize -> parse unchanged.
TEST(ParseMachine, SerializeRoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int symbols = 1 + static_cast<int>(rng() % 4);
    std::string text = "states:";
    for (int k = 1; k <= n; ++k) text += " s" + std::to_string(k);
    text += "\nstart: s1\nhalt:";
    std::vector<bool> halting(static_cast<std::size_t>(n + 1), false);
    for (int k = 1; k <= n; ++k) {
      if (rng() % 3 == 0) {
        halting[static_cast<std::size_t>(k)] = true;
        text += " s" + std::to_string(k);
      }
    }
    text += "\nsymbols: b";
    for (int j = 1; j < symbols; ++j) text += " x" + std::to_string(j);
    text += "\n";
    for (int k = 1; k <= n; ++k) {
      if (halting[static_cast<std::size_t>(k)]) continue;
      for (int j = 0; j < symbols; ++j) {
        text += "delta: s" + std::to_string(k) + " " + (j ? "x" + std::to_string(j) : std::string("b")) + " -> s" +
                std::to_string(1 + rng() % static_cast<unsigned>(n)) + " ";
        int w = static_cast<int>(rng() % static_cast<unsigned>(symbols));
        text += (w ? "x" + std::to_string(w) : std::string("b")) + (rng() % 2 ? " L\n" : " R\n");
      }
    }
    auto m = parse_machine(text);
    EXPECT_EQ(parse_machine(serialize_machine(m)), m) << text;
  }
}

TEST(ExtendDelta, Examples) {
  auto m = parse_machine(kM1);
  auto d = extend_delta(m);
  EXPECT_EQ(d.at(1, 0), (Transition{1, 0, 0}));
  EXPECT_EQ(d.at(0, 0), (Transition{0, 0, 0}));
  EXPECT_EQ(d.at(0, 2), (Transition{0, 2, 0}));
  EXPECT_EQ(d.at(1, 2), (Transition{1, 2, 0}));
  EXPECT_EQ(d.at(1, 1), (Transition{1, 1, +1}));
  EXPECT_EQ(d.at(0, 1), (Transition{1, 2, +1}));
  EXPECT_THROW(d.at(2, 0), Error);
}

TEST(OracleStep, Examples) {
  auto m = parse_machine(kM1);
  auto r = oracle_step(m, config({1, 1, 0, 0}, 1, 1));
  ASSERT_EQ(r.status, StepStatus::Ok);
  EXPECT_EQ(r.next, config({1, 1, 0, 0}, 2, 1));

  EXPECT_EQ(oracle_step(m, config({1, 1, 1, 0}, 3, 2)).status, StepStatus::Halted);
  EXPECT_EQ(oracle_step(m, config({1, 1, 1, 1}, 4, 1)).status, StepStatus::BoundaryOverflow);
  EXPECT_THROW(oracle_step(m, config({1, 1}, 3, 1)), Error);
  EXPECT_THROW(oracle_step(m, config({1, 2}, 1, 1)), Error);
}

// A step rewrites at most the cell under the pre-step head.
TEST(OracleStep, TouchesOnlyTheHeadCellProperty) {
  for (const char* name : {"unary_append.tm", "binary_increment.tm", "bouncer.tm"}) {
    auto m = testing::corpus(name).machine;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      Configuration c{std::vector<int>(6), 1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % static_cast<unsigned>(m.n()))};
      for (auto& s : c.tape) s = static_cast<int>(rng() % static_cast<unsigned>(m.m() + 1));
      auto r = oracle_step(m, c);
      if (m.is_halting(c.state)) {
        EXPECT_EQ(r.status, StepStatus::Halted);
        continue;
      }
      if (r.status != StepStatus::Ok) continue;
      for (int i = 1; i <= 6; ++i) {
        if (i == c.head) continue;
        EXPECT_EQ(r.next.tape[static_cast<std::size_t>(i - 1)], c.tape[static_cast<std::size_t>(i - 1)]);
      }
      EXPECT_EQ(std::abs(r.next.head - c.head), 1);
    }
  }
}

TEST(OracleRun, UnaryAppendHalts) {
  auto m = parse_machine(kM1);
  auto trace = oracle_run(m, config({1, 1, 0, 0}, 1, 1), 10);
  ASSERT_EQ(trace.configs.size(), 4u);
  EXPECT_EQ(trace.status, RunStatus::Halted);
  EXPECT_EQ(trace.configs.back(), config({1, 1, 1, 0}, 4, 2));
}

TEST(OracleRun, DegenerateBounds) {
  auto m = parse_machine(kM1);
  auto zero = oracle_run(m, config({1, 1, 0, 0}, 1, 1), 0);
  EXPECT_EQ(zero.configs.size(), 1u);
  EXPECT_EQ(zero.status, RunStatus::StepLimit);

  auto halted = oracle_run(m, config({1, 0}, 2, 2), 5);
  EXPECT_EQ(halted.configs.size(), 1u);
  EXPECT_EQ(halted.status, RunStatus::Halted);

  auto over = oracle_run(m, config({1, 1, 1, 1}, 1, 1), 10);
  EXPECT_EQ(over.configs.size(), 4u);
  EXPECT_EQ(over.status, RunStatus::BoundaryOverflow);
}

TEST(InitialConfiguration, LaysTapeFromCellOne) {
  auto m = parse_machine(kM1);
  EXPECT_EQ(initial_configuration(m, {1, 1}, 4), config({1, 1, 0, 0}, 1, 1));
  EXPECT_THROW(initial_configuration(m, {1, 1, 1}, 2), Error);
}

TEST(FormatConfigLine, Layout) {
  auto m = parse_machine(kM1);
  EXPECT_EQ(format_config_line(m, 3, config({1, 1, 0, 0}, 3, 1)), "t=3 state=q1 head=3 tape=1,1,_,_");
}

}  // namespace
}  // namespace tmt
