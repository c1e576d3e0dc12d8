#include "isskit/rt/ops.hpp"

#include <fmt/format.h>

namespace isskit::rt {

void trap(const std::string& message) { throw ModelTrap(message); }

namespace {

void same_width(unsigned a, unsigned b, const char* op) {
  if (a != b) trap(fmt::format("{}: width mismatch {} vs {}", op, a, b));
}

BigInt pow2(uint64_t n) { return BigInt(1) << static_cast<unsigned>(n); }

BigInt big_mask(uint64_t width) { return pow2(width) - 1; }

uint64_t to_u64(const BigInt& b) { return static_cast<uint64_t>(b & BigInt(~uint64_t{0})); }

// Non-negative amount or position as a host integer; anything too large to
// matter is clamped to `cap`.
uint64_t amount(const GenericInt& n, uint64_t cap, const char* op) {
  if (n.is_small()) {
    if (n.small() < 0) trap(fmt::format("{}: negative amount {}", op, n.small()));
    return std::min<uint64_t>(static_cast<uint64_t>(n.small()), cap);
  }
  if (n.big() < 0) trap(fmt::format("{}: negative amount", op));
  if (n.big() > BigInt(cap)) return cap;
  return static_cast<uint64_t>(n.big());
}

}  // namespace

Bits add(Bits a, Bits b) {
  same_width(a.width, b.width, "add_bits");
  return Bits::make(a.width, a.bits + b.bits);
}
Bits sub(Bits a, Bits b) {
  same_width(a.width, b.width, "sub_bits");
  return Bits::make(a.width, a.bits - b.bits);
}
Bits band(Bits a, Bits b) {
  same_width(a.width, b.width, "and_bits");
  return {a.width, a.bits & b.bits};
}
Bits bor(Bits a, Bits b) {
  same_width(a.width, b.width, "or_bits");
  return {a.width, a.bits | b.bits};
}
Bits bxor(Bits a, Bits b) {
  same_width(a.width, b.width, "xor_bits");
  return {a.width, a.bits ^ b.bits};
}
Bits bnot(Bits a) { return Bits::make(a.width, ~a.bits); }
bool eq(Bits a, Bits b) {
  same_width(a.width, b.width, "eq_bits");
  return a.bits == b.bits;
}
bool ult(Bits a, Bits b) {
  same_width(a.width, b.width, "ult_bits");
  return a.bits < b.bits;
}

Bits shl(Bits a, int64_t n) {
  if (n < 0) trap(fmt::format("shiftl: negative amount {}", n));
  if (n >= a.width) return {a.width, 0};
  return Bits::make(a.width, a.bits << n);
}
Bits lshr(Bits a, int64_t n) {
  if (n < 0) trap(fmt::format("shiftr: negative amount {}", n));
  if (n >= a.width) return {a.width, 0};
  return {a.width, a.bits >> n};
}
Bits ashr(Bits a, int64_t n) {
  if (n < 0) trap(fmt::format("arith_shiftr: negative amount {}", n));
  int64_t s = to_signed(a);
  if (n >= a.width) n = a.width - 1;
  return Bits::make(a.width, static_cast<uint64_t>(s >> n));
}

Bits sign_extend(Bits a, unsigned to) {
  if (to < a.width || to > 64) trap(fmt::format("sign_extend: {} to {}", a.width, to));
  return Bits::make(to, static_cast<uint64_t>(to_signed(a)));
}
Bits zero_extend(Bits a, unsigned to) {
  if (to < a.width || to > 64) trap(fmt::format("zero_extend: {} to {}", a.width, to));
  return {to, a.bits};
}
Bits subrange(Bits a, unsigned hi, unsigned lo) {
  if (hi >= a.width || lo > hi)
    trap(fmt::format("vector_subrange: [{}:{}] of width {}", hi, lo, a.width));
  return Bits::make(hi - lo + 1, a.bits >> lo);
}
Bits concat(Bits hi, Bits lo) {
  if (hi.width + lo.width > 64) trap("bitvector_concat: result wider than 64");
  return Bits::make(hi.width + lo.width, (hi.bits << lo.width) | lo.bits);
}
int64_t to_signed(Bits a) {
  if (a.width >= 64) return static_cast<int64_t>(a.bits);
  unsigned s = 64 - a.width;
  return static_cast<int64_t>(a.bits << s) >> s;
}
int64_t to_unsigned(Bits a) {
  if (a.width >= 64) trap("unsigned: width 64 does not fit a machine integer");
  return static_cast<int64_t>(a.bits);
}
Bits int_to_bits(int64_t v, unsigned width) {
  if (width < 1 || width > 64) trap(fmt::format("int_to_bits: width {}", width));
  return Bits::make(width, static_cast<uint64_t>(v));
}

int64_t add_i64(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) trap("add_int_i64: overflow");
  return r;
}
int64_t sub_i64(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) trap("sub_int_i64: overflow");
  return r;
}
int64_t mul_i64(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) trap("mul_int_i64: overflow");
  return r;
}
int64_t neg_i64(int64_t a) {
  if (a == std::numeric_limits<int64_t>::min()) trap("neg_int_i64: overflow");
  return -a;
}

GenericBits gadd(Context& ctx, const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "add_bits");
  return make_generic_bits(ctx, a.width, (a.bits + b.bits) & big_mask(a.width));
}
GenericBits gsub(Context& ctx, const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "sub_bits");
  BigInt r = a.bits - b.bits;
  if (r < 0) r += pow2(a.width);
  return make_generic_bits(ctx, a.width, std::move(r));
}
GenericBits gand(Context& ctx, const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "and_bits");
  return make_generic_bits(ctx, a.width, a.bits & b.bits);
}
GenericBits gor(Context& ctx, const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "or_bits");
  return make_generic_bits(ctx, a.width, a.bits | b.bits);
}
GenericBits gxor(Context& ctx, const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "xor_bits");
  return make_generic_bits(ctx, a.width, a.bits ^ b.bits);
}
GenericBits gnot(Context& ctx, const GenericBits& a) {
  return make_generic_bits(ctx, a.width, big_mask(a.width) - a.bits);
}
bool geq(const GenericBits& a, const GenericBits& b) {
  same_width(a.width, b.width, "eq_bits");
  return a.bits == b.bits;
}
GenericBits gshl(Context& ctx, const GenericBits& a, const GenericInt& n) {
  uint64_t k = amount(n, a.width, "shiftl");
  if (k >= a.width) return make_generic_bits(ctx, a.width, 0);
  return make_generic_bits(ctx, a.width, (a.bits << static_cast<unsigned>(k)) & big_mask(a.width));
}
GenericBits glshr(Context& ctx, const GenericBits& a, const GenericInt& n) {
  uint64_t k = amount(n, a.width, "shiftr");
  if (k >= a.width) return make_generic_bits(ctx, a.width, 0);
  return make_generic_bits(ctx, a.width, a.bits >> static_cast<unsigned>(k));
}
GenericBits gashr(Context& ctx, const GenericBits& a, const GenericInt& n) {
  uint64_t k = amount(n, a.width, "arith_shiftr");
  if (k >= a.width) k = a.width - 1;
  bool negative = bit_test(a.bits, a.width - 1);
  BigInt r = a.bits >> static_cast<unsigned>(k);
  if (negative) r |= big_mask(a.width) ^ big_mask(a.width - k);
  return make_generic_bits(ctx, a.width, std::move(r));
}
GenericBits gsign_extend(Context& ctx, const GenericBits& a, const GenericInt& to) {
  uint64_t t = amount(to, kMaxGenericWidth + 1, "sign_extend");
  if (t < a.width || t > kMaxGenericWidth)
    trap(fmt::format("sign_extend: {} to {}", a.width, to.to_big().str()));
  BigInt r = a.bits;
  if (bit_test(a.bits, a.width - 1)) r |= big_mask(t) ^ big_mask(a.width);
  return make_generic_bits(ctx, static_cast<unsigned>(t), std::move(r));
}
GenericBits gzero_extend(Context& ctx, const GenericBits& a, const GenericInt& to) {
  uint64_t t = amount(to, kMaxGenericWidth + 1, "zero_extend");
  if (t < a.width || t > kMaxGenericWidth)
    trap(fmt::format("zero_extend: {} to {}", a.width, to.to_big().str()));
  return make_generic_bits(ctx, static_cast<unsigned>(t), a.bits);
}
GenericBits gsubrange(Context& ctx, const GenericBits& a, const GenericInt& hi,
                      const GenericInt& lo) {
  uint64_t h = amount(hi, kMaxGenericWidth + 1, "vector_subrange");
  uint64_t l = amount(lo, kMaxGenericWidth + 1, "vector_subrange");
  if (h >= a.width || l > h)
    trap(fmt::format("vector_subrange: [{}:{}] of width {}", h, l, a.width));
  unsigned w = static_cast<unsigned>(h - l + 1);
  return make_generic_bits(ctx, w, (a.bits >> static_cast<unsigned>(l)) & big_mask(w));
}
GenericBits gconcat(Context& ctx, const GenericBits& hi, const GenericBits& lo) {
  uint64_t w = uint64_t{hi.width} + lo.width;
  if (w > kMaxGenericWidth) trap("bitvector_concat: result too wide");
  return make_generic_bits(ctx, static_cast<unsigned>(w), (hi.bits << lo.width) | lo.bits);
}
GenericInt glength(Context& ctx, const GenericBits& a) { return make_int(ctx, int64_t{a.width}); }
GenericInt gsigned(Context& ctx, const GenericBits& a) {
  if (bit_test(a.bits, a.width - 1)) return make_int(ctx, BigInt(a.bits - pow2(a.width)));
  return make_int(ctx, a.bits);
}
GenericInt gunsigned(Context& ctx, const GenericBits& a) { return make_int(ctx, a.bits); }
GenericBits gint_to_bits(Context& ctx, const GenericInt& v, const GenericInt& width) {
  if (width.is_small() ? width.small() < 1 : width.big() < 1)
    trap("int_to_bits: non-positive width");
  uint64_t w = amount(width, kMaxGenericWidth + 1, "int_to_bits");
  if (w > kMaxGenericWidth) trap("int_to_bits: width too large");
  BigInt r = v.to_big() % pow2(w);
  if (r < 0) r += pow2(w);
  return make_generic_bits(ctx, static_cast<unsigned>(w), std::move(r));
}

GenericInt iadd(Context& ctx, const GenericInt& a, const GenericInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_add_overflow(a.small(), b.small(), &r)) return make_int(ctx, r);
  }
  return make_int(ctx, BigInt(a.to_big() + b.to_big()));
}
GenericInt isub(Context& ctx, const GenericInt& a, const GenericInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_sub_overflow(a.small(), b.small(), &r)) return make_int(ctx, r);
  }
  return make_int(ctx, BigInt(a.to_big() - b.to_big()));
}
GenericInt imul(Context& ctx, const GenericInt& a, const GenericInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_mul_overflow(a.small(), b.small(), &r)) return make_int(ctx, r);
  }
  return make_int(ctx, BigInt(a.to_big() * b.to_big()));
}
GenericInt ineg(Context& ctx, const GenericInt& a) {
  if (a.is_small() && a.small() != std::numeric_limits<int64_t>::min())
    return make_int(ctx, -a.small());
  return make_int(ctx, BigInt(-a.to_big()));
}
int icmp(const GenericInt& a, const GenericInt& b) {
  if (a.is_small() && b.is_small()) return (a.small() > b.small()) - (a.small() < b.small());
  BigInt x = a.to_big(), y = b.to_big();
  return (x > y) - (x < y);
}

GenericBits to_generic(Context& ctx, Bits a) { return make_generic_bits(ctx, a.width, a.bits); }
Bits from_generic(const GenericBits& a, unsigned width) {
  if (a.width != width)
    trap(fmt::format("cast_bv_from_generic<{}>: value has width {}", width, a.width));
  return {width, to_u64(a.bits)};
}
GenericInt i64_to_int(Context& ctx, int64_t v) { return make_int(ctx, v); }
int64_t int_to_i64(const GenericInt& v) {
  if (auto s = v.as_i64()) return *s;
  trap("cast_int_to_i64: " + v.big().str() + " out of range");
}

}  // namespace isskit::rt
