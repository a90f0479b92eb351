#include <gtest/gtest.h>

#include <map>
#include <random>

#include "test_support.hpp"
#include "tmtensor/tensor.hpp"

namespace tmt {
namespace {

const Dims kSmall{2, 2, 2};

TEST(Dims, Validation) {
  EXPECT_NO_THROW((Dims{1, 1, 2}.validate()));
  EXPECT_THROW((Dims{0, 1, 2}.validate()), Error);
  EXPECT_THROW((Dims{1, 0, 2}.validate()), Error);
  EXPECT_THROW((Dims{1, 1, 1}.validate()), Error);
  EXPECT_EQ((Dims{2, 2, 2}.quad_count()), 16u);
}

TEST(Quad, CodeRoundTripAndOrder) {
  Dims d{3, 2, 3};
  auto quads = testing::all_quads(d);
  ASSERT_EQ(quads.size(), d.quad_count());
  for (std::uint32_t c = 0; c < quads.size(); ++c) {
    EXPECT_EQ(encode_quad(quads[c], d), c);
    EXPECT_EQ(decode_quad(c, d), quads[c]);
    EXPECT_EQ(join_quad(local_code(quads[c], d), global_code(quads[c], d), d), quads[c]);
  }
  EXPECT_THROW(encode_quad(Quad{0, 0, 0, 1}, d), Error);
  EXPECT_THROW(encode_quad(Quad{1, 2, 0, 1}, d), Error);
  EXPECT_THROW(encode_quad(Quad{1, 0, 3, 1}, d), Error);
  EXPECT_THROW(encode_quad(Quad{1, 0, 0, 4}, d), Error);
}

TEST(FromEntries, Examples) {
  Quad x{1, 1, 1, 1};
  Quad y{2, 0, 1, 2};
  EXPECT_EQ(from_entries(kSmall, 0, {}).nnz(), 0u);
  EXPECT_EQ(from_entries(kSmall, 0, {{{x}, 2}, {{x}, -2}}).nnz(), 0u);
  auto t = from_entries(kSmall, 0, {{{x}, 1}, {{y}, 3}});
  EXPECT_EQ(t.nnz(), 2u);
  EXPECT_EQ(t.get({x}), 1);
  EXPECT_EQ(t.get({y}), 3);
  EXPECT_EQ(t.order(), 4);
}

TEST(FromEntries, Errors) {
  Quad x{1, 1, 1, 1};
  try {
    from_entries(kSmall, 1, {{{x}, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
  try {
    from_entries(kSmall, 0, {{{Quad{3, 0, 0, 1}}, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(Get, Examples) {
  Quad x{1, 1, 1, 1};
  SparseTensor zero(kSmall, 1);
  EXPECT_EQ(zero.get({x, x}), 0);
  EXPECT_EQ(from_entries(kSmall, 0, {{{x}, 1}}).get({x}), 1);
  try {
    zero.get({x});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
  EXPECT_THROW(zero.get({x, Quad{9, 0, 0, 1}}), Error);
}

TEST(Equal, Examples) {
  Quad x{1, 1, 1, 1};
  Quad y{2, 1, 0, 1};
  auto t = from_entries(kSmall, 1, {{{x, y}, 4}, {{y, x}, 1}});
  EXPECT_EQ(t, t);
  EXPECT_EQ(SparseTensor(kSmall, 1), SparseTensor(kSmall, 1));
  EXPECT_NE(t, from_entries(kSmall, 1, {{{x, y}, 4}, {{y, x}, 2}}));
  EXPECT_NE(SparseTensor(kSmall, 1), SparseTensor(kSmall, 2));
  EXPECT_NE(SparseTensor(kSmall, 1), SparseTensor(Dims{3, 2, 2}, 1));
}

// Canonical form: no stored zero, and get() agrees with summing the entry
// multiset, across the dense, hashed and ordered accumulation paths.
TEST(FromEntries, CanonicalFormProperty) {
  std::mt19937_64 rng(3);
  for (int upper : {0, 1, 5, 16}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Entry> entries;
      std::map<std::vector<Quad>, Scalar> sums;
      auto quads = testing::all_quads(kSmall);
      for (int e = 0; e < 40; ++e) {
        std::vector<Quad> idx;
        // Narrow choice so duplicates and cancellations actually happen.
        for (int g = 0; g <= upper; ++g) idx.push_back(quads[rng() % 3]);
        Scalar v = static_cast<Scalar>(rng() % 5) - 2;
        entries.push_back({idx, v});
        sums[idx] += v;
      }
      auto t = from_entries(kSmall, upper, entries);
      std::size_t nonzero = 0;
      for (const auto& [idx, v] : sums) {
        EXPECT_EQ(testing::get_seq(t, idx), v);
        nonzero += v != 0;
      }
      EXPECT_EQ(t.nnz(), nonzero);
      for (std::size_t e = 0; e < t.nnz(); ++e) EXPECT_NE(t.value(e), 0);
      for (std::size_t e = 1; e < t.nnz(); ++e) {
        auto a = t.codes(e - 1);
        auto b = t.codes(e);
        EXPECT_TRUE(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
      }
    }
  }
}

// Sums and dumps stay exact past the 64-bit range.
TEST(Scalar, ExactBeyond64Bits) {
  Quad x{1, 1, 1, 1};
  const Scalar big = std::numeric_limits<std::int64_t>::max();
  auto t = from_entries(kSmall, 0, {{{x}, big}, {{x}, big}, {{x}, 2}});
  EXPECT_EQ(to_string(t.get({x})), "18446744073709551616");
  auto text = dump_tensor(t);
  EXPECT_EQ(parse_tensor_dump(text), t);
  EXPECT_EQ(to_string(big * big * -1), "-85070591730234615847396907784232501249");
}

TEST(Dump, Format) {
  Dims d{2, 2, 3};
  auto t = from_entries(d, 1, {{{Quad{2, 1, 1, 1}, Quad{2, 1, 0, 1}}, 1}, {{Quad{1, 1, 1, 1}, Quad{1, 1, 1, 2}}, -7}});
  EXPECT_EQ(dump_tensor(t),
            "dims 2 1 2  upper 1\n"
            "1 1 1 1 | 1 1 1 2 : -7\n"
            "2 1 1 1 | 2 1 0 1 : 1\n");
  EXPECT_EQ(dump_tensor(SparseTensor(d, 0)), "dims 2 1 2  upper 0\n");
}

TEST(Dump, ParseRejectsGarbage) {
  for (const char* bad : {"", "dims 2 1\n", "dims 2 1 1  upper 0\n1 1 1 1\n", "dims 2 1 1  upper 0\n1 1 x 1 : 1\n",
                          "dims 2 1 1  upper 0\n1 1 1 1 | 1 1 1 1 : 1\n"}) {
    EXPECT_THROW(parse_tensor_dump(bad), Error) << bad;
  }
}

// dump -> parse -> dump is byte-identical.
TEST(Dump, RoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Dims d{1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 2)};
    int upper = static_cast<int>(rng() % 3);
    auto quads = testing::all_quads(d);
    std::vector<Entry> entries;
    for (int e = 0; e < 25; ++e) {
      std::vector<Quad> idx;
      for (int g = 0; g <= upper; ++g) idx.push_back(quads[rng() % quads.size()]);
      entries.push_back({idx, static_cast<Scalar>(rng() % 7) - 3});
    }
    auto t = from_entries(d, upper, entries);
    auto text = dump_tensor(t);
    auto back = parse_tensor_dump(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(dump_tensor(back), text);
  }
}

}  // namespace
}  // namespace tmt
