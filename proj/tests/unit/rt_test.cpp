#include <gtest/gtest.h>

#include <random>

#include "isskit/rt/ops.hpp"
#include "support/specialized_oracle.hpp"

namespace isskit::rt {
namespace {

TEST(Bits, SignExtendTwelveToSixtyFour) {
  EXPECT_EQ(sign_extend(Bits::make(12, 0xfff), 64).bits, ~uint64_t{0});
  EXPECT_EQ(sign_extend(Bits::make(12, 0x7ff), 64).bits, 0x7ffu);
}

TEST(Bits, SignedOfAllOnesFiveBits) { EXPECT_EQ(to_signed(Bits::make(5, 0b11111)), -1); }

TEST(Bits, ArithmeticWraps) {
  EXPECT_EQ(add(Bits::make(8, 0xff), Bits::make(8, 2)).bits, 1u);
  EXPECT_EQ(sub(Bits::make(8, 0), Bits::make(8, 1)).bits, 0xffu);
  EXPECT_EQ(add(Bits::make(64, ~uint64_t{0}), Bits::make(64, 1)).bits, 0u);
}

TEST(Bits, ShiftsAndSlices) {
  EXPECT_EQ(shl(Bits::make(8, 0x81), 1).bits, 0x02u);
  EXPECT_EQ(ashr(Bits::make(8, 0x80), 3).bits, 0xf0u);
  EXPECT_EQ(lshr(Bits::make(8, 0x80), 9).bits, 0u);
  EXPECT_EQ(ashr(Bits::make(8, 0x80), 100).bits, 0xffu);
  EXPECT_THROW(shl(Bits::make(8, 1), -1), ModelTrap);
  EXPECT_EQ(subrange(Bits::make(32, 0x00a00513), 6, 0).bits, 0x13u);
  EXPECT_EQ(concat(Bits::make(4, 0xa), Bits::make(8, 0x5c)).bits, 0xa5cu);
  EXPECT_EQ(concat(Bits::make(4, 0xa), Bits::make(8, 0x5c)).width, 12u);
}

TEST(GenericInt, MulOverflowSwitchesToBig) {
  Context ctx;
  auto a = make_int(ctx, int64_t{1} << 40);
  EXPECT_TRUE(a.is_small());
  ctx.reset_allocation_count();
  auto p = imul(ctx, a, a);
  EXPECT_FALSE(p.is_small());
  EXPECT_EQ(p.to_big(), BigInt(1) << 80);
  EXPECT_EQ(ctx.allocation_count(), 1u);
}

TEST(GenericInt, SmallResultsDoNotAllocate) {
  Context ctx;
  auto s = iadd(ctx, make_int(ctx, int64_t{2}), make_int(ctx, int64_t{3}));
  EXPECT_EQ(s.as_i64(), 5);
  EXPECT_EQ(ctx.allocation_count(), 0u);
}

TEST(GenericInt, NonSwitchableAlwaysAllocates) {
  Context ctx;
  ctx.switchable_ints = false;
  auto s = iadd(ctx, make_int(ctx, int64_t{2}), make_int(ctx, int64_t{3}));
  EXPECT_FALSE(s.is_small());
  EXPECT_EQ(s.as_i64(), 5);
  EXPECT_GE(ctx.allocation_count(), 1u);
}

TEST(GenericInt, RepresentationIsTransparent) {
  std::mt19937_64 rng(3);
  Context on, off;
  off.switchable_ints = false;
  for (int i = 0; i < 2000; ++i) {
    int64_t x = static_cast<int64_t>(rng()) >> (rng() % 64);
    int64_t y = static_cast<int64_t>(rng()) >> (rng() % 64);
    auto a1 = make_int(on, x), b1 = make_int(on, y);
    auto a2 = make_int(off, x), b2 = make_int(off, y);
    EXPECT_EQ(imul(on, a1, b1), imul(off, a2, b2));
    EXPECT_EQ(iadd(on, a1, b1), iadd(off, a2, b2));
    EXPECT_EQ(isub(on, a1, b1), isub(off, a2, b2));
    EXPECT_EQ(ineg(on, a1), ineg(off, a2));
    EXPECT_EQ(icmp(a1, b1), icmp(a2, b2));
    auto g1 = to_generic(on, Bits::make(64, static_cast<uint64_t>(x)));
    auto g2 = to_generic(off, Bits::make(64, static_cast<uint64_t>(x)));
    EXPECT_EQ(gsigned(on, g1), gsigned(off, g2));
    EXPECT_EQ(gunsigned(on, g1), gunsigned(off, g2));
  }
}

TEST(GenericBits, CreationAllocates) {
  Context ctx;
  auto g = to_generic(ctx, Bits::make(12, 0xfff));
  auto e = gsign_extend(ctx, g, GenericInt(int64_t{64}));
  EXPECT_EQ(ctx.allocation_count(), 2u);
  EXPECT_EQ(from_generic(e, 64).bits, ~uint64_t{0});
}

TEST(Casts, CheckedCastsTrap) {
  Context ctx;
  auto g = to_generic(ctx, Bits::make(32, 1));
  EXPECT_THROW(from_generic(g, 64), ModelTrap);
  EXPECT_THROW(int_to_i64(GenericInt(BigInt(1) << 70)), ModelTrap);
  EXPECT_EQ(int_to_i64(GenericInt(BigInt(-5))), -5);
}

TEST(MachineInts, OverflowTraps) {
  EXPECT_THROW(add_i64(INT64_MAX, 1), ModelTrap);
  EXPECT_THROW(mul_i64(int64_t{1} << 32, int64_t{1} << 31), ModelTrap);
  EXPECT_THROW(neg_i64(INT64_MIN), ModelTrap);
  EXPECT_EQ(mul_i64(-(int64_t{1} << 31), -(int64_t{1} << 31)), int64_t{1} << 62);
}

TEST(Specialized, AgreeWithGenericExhaustivelyUpToEightBits) {
  auto r = testing::check_specialized_ops(8, 48, 7);
  EXPECT_GT(r.checks, 100000u);
  EXPECT_EQ(r.mismatches, 0u) << r.first_failure;
}

}  // namespace
}  // namespace isskit::rt
