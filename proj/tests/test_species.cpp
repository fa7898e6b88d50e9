#include <gtest/gtest.h>

#include <set>

#include "hasr/species.hpp"

using namespace hasr;

namespace {

SimRun stabilized_at(natural m, natural k, natural horizon = 40) {
  SimRun r;
  r.config = RunConfig{horizon, 0, ChoiceSeq::witnesses({{0, k}}), Schedule::phi_at(m)};
  for (natural n = 0; n <= horizon; ++n) r.beta.push_back(n < m ? 0 : k);
  r.draws.push_back(Draw{m, k, true});
  r.stabilized = Stabilization{m, k};
  return r;
}

Integer pow2(std::size_t e) {
  Integer r = 1;
  r <<= e;
  return r;
}

}  // namespace

TEST(Encode, FourTwo) {
  EncodedSpecies enc = encode(stabilized_at(4, 2));
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_EQ(enc.u.at(n), 0);
    EXPECT_EQ(enc.v.at(n), 0);
  }
  for (std::size_t n = 4; n <= 80; ++n) {
    EXPECT_EQ(enc.u.at(n), pow2(n - 2));
    EXPECT_EQ(enc.v.at(n), pow2(n - 3));
  }
  EXPECT_EQ(enc.u.closed_form(), std::optional<Rational>(Rational(1, 4)));
  EXPECT_EQ(enc.v.closed_form(), std::optional<Rational>(Rational(1, 8)));
  EXPECT_TRUE(eq_at(mul(from_nat(2), enc.v), enc.u, encoding_precision(enc, 16)));
}

TEST(Encode, FloorOfGeneralFractions) {
  EncodedSpecies enc = encode(stabilized_at(5, 3, 30));
  for (std::size_t n = 5; n <= 60; ++n) {
    EXPECT_EQ(enc.u.at(n), Integer(pow2(n) / 5));
    EXPECT_EQ(enc.v.at(n), Integer(pow2(n) / 15));
  }
}

TEST(Encode, UnstabilizedRunIsZero) {
  SimRun r = run(ChoiceSeq::total(), Schedule::not_phi_at(1), 20, 0);
  EncodedSpecies enc = encode(r);
  for (std::size_t n = 0; n <= 64; n += 4) {
    EXPECT_EQ(enc.u.at(n), 0);
    EXPECT_EQ(enc.v.at(n), 0);
  }
  for (natural n = 1; n <= 20; ++n) EXPECT_EQ(quotient_status(enc, n, Precision{16, 64}), Quotient::Confirmed);
}

TEST(Encode, RejectsImpossibleRuns) {
  SimRun r = stabilized_at(3, 2);
  r.stabilized->value = 0;
  EXPECT_THROW(encode(r), std::logic_error);
}

TEST(Quotient, FourTwo) {
  EncodedSpecies enc = encode(stabilized_at(4, 2));
  Precision prec = encoding_precision(enc, 24);
  EXPECT_EQ(quotient_status(enc, 2, prec), Quotient::Confirmed);
  EXPECT_EQ(quotient_status(enc, 3, prec), Quotient::Excluded);
  EXPECT_EQ(quotient_status(enc, 1, prec), Quotient::Excluded);
  EXPECT_THROW(quotient_status(enc, 0, prec), std::invalid_argument);
}

TEST(Quotient, ShortWindowsDoNotOverclaim) {
  // A window that only sees moments before stabilization must not confirm
  // the wrong quotient.
  EncodedSpecies enc = encode(stabilized_at(30, 3, 60));
  EXPECT_NE(quotient_status(enc, 2, Precision{4, 8}), Quotient::Excluded);
  EXPECT_EQ(quotient_status(enc, 2, encoding_precision(enc, 24)), Quotient::Excluded);
  EXPECT_GE(encoding_precision(enc, 24).horizon, 30u + 24u);
}

TEST(Quotient, SimulatedRunsHaveExactlyTheirValue) {
  const ChoiceSeq alpha = ChoiceSeq::parse("witnesses:0/2,1/3,0/5,4/7");
  int stabilized = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SimRun r = run(alpha, Schedule::phi_at(1 + seed % 3), 80, seed);
    if (!r.stabilized) continue;
    ++stabilized;
    natural k = r.stabilized->value;
    EXPECT_TRUE(alpha.contains(k));
    EncodedSpecies enc = encode(r);
    EXPECT_TRUE(check_R(enc.u, Precision{20, 64 + enc.u.modulus_hint(20)}));
    EXPECT_TRUE(check_R(enc.v, Precision{20, 64 + enc.v.modulus_hint(20)}));
    EXPECT_EQ(quotient_status(enc, k, encoding_precision(enc, 16)), Quotient::Confirmed);
    for (natural n = 1; n <= 20; ++n) {
      if (n == k) continue;
      EXPECT_EQ(quotient_status(enc, n, encoding_precision(enc, 24)), Quotient::Excluded) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_GT(stabilized, 50);
}

TEST(Quotient, EnsembleCoversTheSpecies) {
  const ChoiceSeq alpha = ChoiceSeq::parse("witnesses:0/1,2/2,0/4,1/6,3/9");
  std::set<natural> realized;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    SimRun r = run(alpha, Schedule::phi_at(1 + seed % 12), 120, seed);
    if (!r.stabilized) continue;
    EncodedSpecies enc = encode(r);
    for (natural n = 1; n <= 12; ++n)
      if (quotient_status(enc, n, encoding_precision(enc, 20)) == Quotient::Confirmed) realized.insert(n);
  }
  EXPECT_EQ(realized, (std::set<natural>{1, 2, 4, 6, 9}));
}
