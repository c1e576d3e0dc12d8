// Arithmetic on runtime values, one entry per builtin operation family.
// Fixed-width operations wrap modulo 2^width; generic ones are exact and
// count allocations through the Context.
#pragma once

#include <cstdint>

#include "isskit/rt/value.hpp"

namespace isskit::rt {

// Upper bound on generic widths; larger requests trap instead of
// exhausting host memory.
inline constexpr uint64_t kMaxGenericWidth = 1u << 16;

[[noreturn]] void trap(const std::string& message);

// ---- fixed width -------------------------------------------------------
Bits add(Bits a, Bits b);
Bits sub(Bits a, Bits b);
Bits band(Bits a, Bits b);
Bits bor(Bits a, Bits b);
Bits bxor(Bits a, Bits b);
Bits bnot(Bits a);
bool eq(Bits a, Bits b);
bool ult(Bits a, Bits b);
Bits shl(Bits a, int64_t n);
Bits lshr(Bits a, int64_t n);
Bits ashr(Bits a, int64_t n);
Bits sign_extend(Bits a, unsigned to);
Bits zero_extend(Bits a, unsigned to);
Bits subrange(Bits a, unsigned hi, unsigned lo);
Bits concat(Bits hi, Bits lo);
int64_t to_signed(Bits a);
int64_t to_unsigned(Bits a);
Bits int_to_bits(int64_t v, unsigned width);

// ---- machine integers (trap on overflow) ------------------------------
int64_t add_i64(int64_t a, int64_t b);
int64_t sub_i64(int64_t a, int64_t b);
int64_t mul_i64(int64_t a, int64_t b);
int64_t neg_i64(int64_t a);

// ---- generic bitvectors ------------------------------------------------
GenericBits gadd(Context& ctx, const GenericBits& a, const GenericBits& b);
GenericBits gsub(Context& ctx, const GenericBits& a, const GenericBits& b);
GenericBits gand(Context& ctx, const GenericBits& a, const GenericBits& b);
GenericBits gor(Context& ctx, const GenericBits& a, const GenericBits& b);
GenericBits gxor(Context& ctx, const GenericBits& a, const GenericBits& b);
GenericBits gnot(Context& ctx, const GenericBits& a);
bool geq(const GenericBits& a, const GenericBits& b);
GenericBits gshl(Context& ctx, const GenericBits& a, const GenericInt& n);
GenericBits glshr(Context& ctx, const GenericBits& a, const GenericInt& n);
GenericBits gashr(Context& ctx, const GenericBits& a, const GenericInt& n);
GenericBits gsign_extend(Context& ctx, const GenericBits& a, const GenericInt& to);
GenericBits gzero_extend(Context& ctx, const GenericBits& a, const GenericInt& to);
GenericBits gsubrange(Context& ctx, const GenericBits& a, const GenericInt& hi,
                      const GenericInt& lo);
GenericBits gconcat(Context& ctx, const GenericBits& hi, const GenericBits& lo);
GenericInt glength(Context& ctx, const GenericBits& a);
GenericInt gsigned(Context& ctx, const GenericBits& a);
GenericInt gunsigned(Context& ctx, const GenericBits& a);
GenericBits gint_to_bits(Context& ctx, const GenericInt& v, const GenericInt& width);

// ---- generic integers --------------------------------------------------
GenericInt iadd(Context& ctx, const GenericInt& a, const GenericInt& b);
GenericInt isub(Context& ctx, const GenericInt& a, const GenericInt& b);
GenericInt imul(Context& ctx, const GenericInt& a, const GenericInt& b);
GenericInt ineg(Context& ctx, const GenericInt& a);
// -1, 0, 1
int icmp(const GenericInt& a, const GenericInt& b);

// ---- casts -------------------------------------------------------------
GenericBits to_generic(Context& ctx, Bits a);
Bits from_generic(const GenericBits& a, unsigned width);
GenericInt i64_to_int(Context& ctx, int64_t v);
int64_t int_to_i64(const GenericInt& v);

}  // namespace isskit::rt
