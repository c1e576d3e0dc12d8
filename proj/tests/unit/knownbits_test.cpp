#include <gtest/gtest.h>

#include "isskit/knownbits.hpp"
#include "support/knownbits_oracle.hpp"

namespace isskit::kb {
namespace {

using testing::members;
using testing::tightest;

TEST(KnownBits, FromConstantIsFullyKnown) {
  EXPECT_EQ(from_constant(0b1010), (Tnum{0b1010, 0}));
  EXPECT_TRUE(top().contains(0xdeadbeef));
}

TEST(KnownBits, JoinOfFourAndSixMatchesTightestContainer) {
  Tnum j = join(from_constant(0b100), from_constant(0b110));
  EXPECT_EQ(j, tightest({4, 6}, 6));
  EXPECT_EQ(j, (Tnum{0b100, 0b010}));
}

TEST(KnownBits, TopAbsorbsJoin) {
  EXPECT_EQ(join(from_constant(77), top()), top());
  EXPECT_EQ(join(top(), Tnum{8, 3}), top());
}

TEST(KnownBits, AndWithLowMaskLeavesOnlyMaskedBitsUnknown) {
  Tnum r = truncate(transfer_and(Tnum::top(6), from_constant(0b011)), 6);
  std::vector<uint64_t> results;
  for (uint64_t x : members(Tnum::top(6), 6)) results.push_back(x & 0b011);
  EXPECT_EQ(r, tightest(results, 6));
  EXPECT_EQ(r, (Tnum{0, 0b011}));
}

TEST(KnownBits, AddOfConstantsIsConstant) {
  EXPECT_EQ(transfer_add(from_constant(2), from_constant(3)), from_constant(5));
}

TEST(KnownBits, AlignmentMaskingClearsLowBits) {
  Tnum r = transfer_and(top(), from_constant(~uint64_t{7}));
  EXPECT_EQ(known_eq_zero(r, 0b111), Tri::yes);
  EXPECT_EQ(r.mask, ~uint64_t{7});
}

TEST(KnownBits, KnownEqZero) {
  EXPECT_EQ(known_eq_zero(Tnum{0b1000, ~uint64_t{0b1111}}, 0b111), Tri::yes);
  EXPECT_EQ(known_eq_zero(from_constant(4), 0b100), Tri::no);
  EXPECT_EQ(known_eq_zero(top(), 0b1), Tri::unknown);
}

TEST(KnownBits, AlignedBasePlusEightStaysAligned) {
  Tnum base{0, ~uint64_t{7}};
  EXPECT_EQ(known_eq_zero(transfer_add(base, from_constant(8)), 7), Tri::yes);
  EXPECT_EQ(known_eq_zero(transfer_add(base, from_constant(4)), 7), Tri::no);
  EXPECT_EQ(known_eq_zero(transfer_add(base, top()), 7), Tri::unknown);
}

TEST(KnownBits, TextForm) {
  EXPECT_EQ(to_string(Tnum{0x4, 0x2}), "⟨0x4, 0x2⟩");
}

TEST(KnownBits, ExhaustiveWidthSixSoundnessAndExactness) {
  auto r = testing::check_transfer_functions(6);
  EXPECT_GT(r.checks, 1000000u);
  EXPECT_EQ(r.violations, 0u) << r.first_failure;
  EXPECT_EQ(r.inexact_constants, 0u);
}

TEST(KnownBits, ExhaustiveWidthSixJoinLaws) {
  auto r = testing::check_join(6);
  EXPECT_EQ(r.unsound, 0u);
  EXPECT_EQ(r.not_commutative, 0u);
  EXPECT_EQ(r.not_associative, 0u);
  EXPECT_EQ(r.not_idempotent, 0u);
  EXPECT_EQ(r.not_tightest, 0u);
}

TEST(KnownBits, SignExtendReplicatesUnknownSignBit) {
  Tnum t{0, 0b100000};
  Tnum s = sign_extend(t, 6);
  EXPECT_TRUE(s.contains(0));
  EXPECT_TRUE(s.contains(~uint64_t{0} << 5));
  EXPECT_EQ(s.value, 0u);
  EXPECT_EQ(s.mask, ~uint64_t{0} << 5);
}

}  // namespace
}  // namespace isskit::kb
