#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "hasr/realgen.hpp"

using namespace hasr;

namespace {

Integer pow2(std::size_t e) {
  Integer r = 1;
  r <<= e;
  return r;
}

Integer abs_diff(const Integer& a, const Integer& b) { return a > b ? Integer(a - b) : Integer(b - a); }

// Straight transcriptions of the bounded predicates, used to cross-check the
// library's searches on small horizons.
bool oracle_eq(const RealGen& a, const RealGen& b, std::size_t k, std::size_t h) {
  for (std::size_t x = 0; x <= h; ++x) {
    bool all = true;
    for (std::size_t p = 0; p <= h && all; ++p)
      all = pow2(k) * abs_diff(a.at(x + p), b.at(x + p)) < pow2(x + p);
    if (all) return true;
  }
  return false;
}

bool oracle_lt(const RealGen& a, const RealGen& b, std::size_t kmax, std::size_t h) {
  for (std::size_t k = 0; k <= kmax; ++k)
    for (std::size_t x = 0; x <= h; ++x) {
      bool all = true;
      for (std::size_t p = 0; p <= h && all; ++p) {
        Integer d = b.at(x + p) - a.at(x + p);
        if (d < 0) d = 0;
        all = pow2(k) * d >= pow2(x + p);
      }
      if (all) return true;
    }
  return false;
}

std::vector<RealGen> constructor_corpus() {
  std::vector<RealGen> out;
  for (unsigned long n : {0ul, 1ul, 2ul, 5ul}) out.push_back(from_nat(n));
  for (unsigned long q : {1ul, 2ul, 3ul, 7ul}) out.push_back(from_unit_fraction(q));
  out.push_back(add(from_unit_fraction(3), from_unit_fraction(6)));
  out.push_back(mul(from_nat(3), from_unit_fraction(5)));
  out.push_back(mul(from_unit_fraction(2), from_unit_fraction(3)));
  out.push_back(nat_scalar(4, from_unit_fraction(7)));
  return out;
}

}  // namespace

TEST(RealGen, FromNat) {
  EXPECT_EQ(from_nat(3).at(4), 48);
  EXPECT_EQ(from_nat(1).at(10), 1024);
  for (std::size_t l = 0; l < 70; l += 7) EXPECT_EQ(from_nat(0).at(l), 0);
  EXPECT_EQ(from_nat(7).at(100), Integer(7) * pow2(100));
}

TEST(RealGen, UnitFraction) {
  EXPECT_EQ(from_unit_fraction(4).at(5), 8);
  EXPECT_EQ(from_unit_fraction(3).at(4), 5);
  EXPECT_THROW(from_unit_fraction(0), std::invalid_argument);
  EXPECT_TRUE(eq_at(from_unit_fraction(1), from_nat(1), Precision{16, 64}));
  for (std::size_t k = 0; k <= 20; ++k) EXPECT_EQ(from_unit_fraction(9).modulus_hint(k), k + 2);
  ASSERT_TRUE(from_unit_fraction(3).closed_form().has_value());
  EXPECT_EQ(*from_unit_fraction(3).closed_form(), Rational(1, 3));
}

TEST(RealGen, AddPointwise) {
  RealGen g = from_unit_fraction(3);
  for (std::size_t x = 0; x <= 64; ++x) {
    EXPECT_EQ(add(from_nat(2), from_nat(3)).at(x), from_nat(5).at(x));
    EXPECT_EQ(add(from_nat(0), g).at(x), g.at(x));
  }
  auto corpus = constructor_corpus();
  for (const auto& a : corpus)
    for (const auto& b : corpus)
      for (const auto& c : {corpus[1], corpus[6]})
        for (std::size_t x : {0u, 5u, 31u}) {
          EXPECT_EQ(add(a, b).at(x), add(b, a).at(x));
          EXPECT_EQ(add(add(a, b), c).at(x), add(a, add(b, c)).at(x));
        }
}

TEST(RealGen, Mul) {
  EXPECT_EQ(mul(from_nat(2), from_nat(3)).at(3), 48);
  for (unsigned long n = 0; n <= 50; n += 5)
    for (unsigned long m = 0; m <= 50; m += 7)
      for (std::size_t x : {0u, 3u, 17u, 40u}) EXPECT_EQ(mul(from_nat(n), from_nat(m)).at(x), from_nat(n * m).at(x));
  for (const auto& g : constructor_corpus()) {
    for (std::size_t x = 0; x <= 64; ++x) {
      EXPECT_LE(abs_diff(mul(from_nat(1), g).at(x), g.at(x)), 1);
      EXPECT_EQ(mul(from_nat(0), g).at(x), 0);
    }
  }
}

TEST(RealGen, NatScalar) {
  for (std::size_t x = 0; x <= 30; ++x) {
    EXPECT_EQ(nat_scalar(3, from_nat(2)).at(x), from_nat(6).at(x));
    EXPECT_EQ(nat_scalar(0, from_unit_fraction(3)).at(x), 0);
  }
  for (const auto& g : constructor_corpus())
    for (unsigned long n = 0; n <= 20; ++n)
      EXPECT_TRUE(eq_at(nat_scalar(n, g), mul(from_nat(n), g), Precision{16, 64})) << n << " * " << g.label();
}

TEST(EqAt, Examples) {
  EXPECT_TRUE(eq_at(from_nat(5), add(from_nat(2), from_nat(3)), Precision{20, 64}));
  EXPECT_FALSE(eq_at(from_nat(1), from_nat(2), Precision{1, 32}));

  RealGen g = RealGen::custom(
      "2^x+1", [](std::size_t x) { return Integer(pow2(x) + 1); }, [](std::size_t k) { return k + 2; });
  for (std::size_t k = 0; k <= 20; ++k) {
    Verdict v = eq_at(from_nat(1), g, Precision{k, 64});
    ASSERT_TRUE(v) << k;
    EXPECT_EQ(v.x, k + 1);
  }
}

TEST(EqAt, AgreesWithOracle) {
  auto corpus = constructor_corpus();
  corpus.push_back(add(from_nat(1), from_unit_fraction(1)));
  for (const auto& a : corpus)
    for (const auto& b : corpus)
      for (std::size_t k : {0u, 3u, 8u})
        EXPECT_EQ(static_cast<bool>(eq_at(a, b, Precision{k, 12})), oracle_eq(a, b, k, 12))
            << a.label() << " vs " << b.label() << " k=" << k;
}

TEST(LtAt, Examples) {
  Verdict v = lt_at(from_nat(1), from_nat(2), Precision{16, 32});
  ASSERT_TRUE(v);
  EXPECT_EQ(v.x, 0u);
  EXPECT_TRUE(lt_witness_holds(from_nat(1), from_nat(2), 1, 0, 32));
  EXPECT_TRUE(lt_witness_holds(from_nat(1), from_nat(2), v.k, v.x, 32));
  EXPECT_FALSE(lt_at(from_nat(2), from_nat(1), Precision{16, 32}));
  for (const auto& g : constructor_corpus()) EXPECT_FALSE(lt_at(g, g, Precision{16, 32})) << g.label();
}

TEST(LtAt, ReportsMinimalWitness) {
  // 1/3 < 1/2 needs 2^k * (1/2 - 1/3) >= 1, so k = 3 is the least precision.
  Verdict v = lt_at(from_unit_fraction(3), from_unit_fraction(2), Precision{16, 40});
  ASSERT_TRUE(v);
  EXPECT_EQ(v.k, 3u);
  EXPECT_FALSE(lt_witness_holds(from_unit_fraction(3), from_unit_fraction(2), 2, v.x, 40));
}

TEST(LtAt, AgreesWithOracleAndIsAsymmetric) {
  auto corpus = constructor_corpus();
  for (const auto& a : corpus)
    for (const auto& b : corpus) {
      Precision prec{6, 12};
      bool ab = static_cast<bool>(lt_at(a, b, prec));
      EXPECT_EQ(ab, oracle_lt(a, b, 6, 12)) << a.label() << " < " << b.label();
      EXPECT_FALSE(ab && lt_at(b, a, prec)) << a.label() << " " << b.label();
      if (ab) {
        Verdict v = lt_at(a, b, prec);
        EXPECT_TRUE(lt_witness_holds(a, b, v.k, v.x, 12));
      }
    }
}

TEST(EqAt, CongruenceForAdd) {
  auto corpus = constructor_corpus();
  for (std::size_t k = 0; k <= 12; k += 4)
    for (const auto& a : corpus)
      for (const auto& b : corpus)
        if (eq_at(a, b, Precision{k + 2, 64}))
          for (const auto& c : corpus) EXPECT_TRUE(eq_at(add(a, c), add(b, c), Precision{k, 64}));
}

TEST(CheckR, Constructors) {
  for (unsigned long n = 0; n <= 100; ++n) EXPECT_TRUE(check_R(from_nat(n), Precision{20, 64})) << n;
  EXPECT_TRUE(check_R(from_unit_fraction(3), Precision{20, 64}));
  for (const auto& g : constructor_corpus()) EXPECT_TRUE(check_R(g, Precision{20, 64})) << g.label();
}

TEST(CheckR, AgainstAdversarialSequence) {
  RealGen four = RealGen::custom(
      "4^x", [](std::size_t x) { return pow2(2 * x); }, [](std::size_t k) { return k; });
  for (std::size_t k : {0u, 5u, 20u}) EXPECT_FALSE(check_R(four, Precision{k, 64}));
}

TEST(CheckR, InsufficientHorizon) {
  EXPECT_THROW(check_R(from_unit_fraction(5), Precision{20, 10}), InsufficientHorizon);
  try {
    check_R(from_unit_fraction(5), Precision{20, 10});
  } catch (const InsufficientHorizon& e) {
    EXPECT_GT(e.needed(), 10u);
  }
}

TEST(RealGen, MemoIsSafeUnderConcurrentReads) {
  RealGen g = mul(from_unit_fraction(7), add(from_nat(3), from_unit_fraction(11)));
  std::vector<Integer> expected;
  for (std::size_t x = 0; x < 200; ++x) {
    Integer a = Integer(pow2(x) / 7), b = Integer(3 * pow2(x) + pow2(x) / 11);
    expected.push_back(Integer(a * b / pow2(x)));
  }
  std::vector<std::thread> threads;
  std::vector<int> mismatches(8, 0);
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = 0; i < 200; ++i) {
        std::size_t x = (i * 37 + t * 11) % 200;
        if (g.at(x) != expected[x]) ++mismatches[t];
      }
    });
  for (auto& th : threads) th.join();
  for (int m : mismatches) EXPECT_EQ(m, 0);
}

TEST(RealGen, Monus) {
  EXPECT_EQ(monus(5, 3), 2);
  EXPECT_EQ(monus(3, 5), 0);
}
