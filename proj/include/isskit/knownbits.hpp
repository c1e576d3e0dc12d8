// Tristate numbers: a 64-bit quantity where each bit is known 0, known 1 or
// unknown. `mask` marks the unknown bits; `value` holds the known ones.
#pragma once

#include <cstdint>
#include <string>

namespace isskit::kb {

enum class Tri { yes, no, unknown };

struct Tnum {
  uint64_t value = 0;
  uint64_t mask = ~uint64_t{0};

  static constexpr Tnum constant(uint64_t c) { return {c, 0}; }
  static constexpr Tnum top() { return {0, ~uint64_t{0}}; }
  static constexpr Tnum top(unsigned width) { return {0, low_mask(width)}; }

  constexpr bool is_const() const { return mask == 0; }
  constexpr bool well_formed() const { return (value & mask) == 0; }
  constexpr bool contains(uint64_t c) const { return (c & ~mask) == value; }

  static constexpr uint64_t low_mask(unsigned width) {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
  }

  friend constexpr bool operator==(const Tnum&, const Tnum&) = default;
};

constexpr Tnum from_constant(uint64_t c) { return Tnum::constant(c); }
constexpr Tnum top() { return Tnum::top(); }

// Smallest tnum containing both concretizations.
constexpr Tnum join(Tnum a, Tnum b) {
  uint64_t mu = a.mask | b.mask | (a.value ^ b.value);
  return {a.value & ~mu, mu};
}

// Both facts hold at once; callers guarantee the operands are compatible.
constexpr Tnum meet(Tnum a, Tnum b) {
  uint64_t mu = a.mask & b.mask;
  return {(a.value | b.value) & ~mu, mu};
}

constexpr Tnum transfer_and(Tnum a, Tnum b) {
  uint64_t alpha = a.value | a.mask;
  uint64_t beta = b.value | b.mask;
  uint64_t v = a.value & b.value;
  return {v, alpha & beta & ~v};
}

constexpr Tnum transfer_or(Tnum a, Tnum b) {
  uint64_t v = a.value | b.value;
  return {v, (a.mask | b.mask) & ~v};
}

constexpr Tnum transfer_xor(Tnum a, Tnum b) {
  uint64_t mu = a.mask | b.mask;
  return {(a.value ^ b.value) & ~mu, mu};
}

constexpr Tnum transfer_not(Tnum a) { return {~a.value & ~a.mask, a.mask}; }

constexpr Tnum transfer_add(Tnum a, Tnum b) {
  uint64_t sm = a.mask + b.mask;
  uint64_t sv = a.value + b.value;
  uint64_t chi = (sm + sv) ^ sv;
  uint64_t mu = chi | a.mask | b.mask;
  return {sv & ~mu, mu};
}

constexpr Tnum transfer_sub(Tnum a, Tnum b) {
  uint64_t dv = a.value - b.value;
  uint64_t alpha = dv + a.mask;
  uint64_t beta = dv - b.mask;
  uint64_t mu = (alpha ^ beta) | a.mask | b.mask;
  return {dv & ~mu, mu};
}

constexpr Tnum transfer_shl_const(Tnum a, unsigned amount) {
  if (amount >= 64) return Tnum::constant(0);
  return {a.value << amount, a.mask << amount};
}

constexpr Tnum transfer_lshr_const(Tnum a, unsigned amount) {
  if (amount >= 64) return Tnum::constant(0);
  return {a.value >> amount, a.mask >> amount};
}

constexpr Tnum transfer_ashr_const(Tnum a, unsigned amount) {
  if (amount > 63) amount = 63;
  return {static_cast<uint64_t>(static_cast<int64_t>(a.value) >> amount),
          static_cast<uint64_t>(static_cast<int64_t>(a.mask) >> amount)};
}

// Keep the low `width` bits; higher bits become known zero.
constexpr Tnum truncate(Tnum a, unsigned width) {
  uint64_t m = Tnum::low_mask(width);
  return {a.value & m, a.mask & m};
}

// Replicate bit `width-1` (known or not) into all higher positions.
constexpr Tnum sign_extend(Tnum a, unsigned width) {
  if (width == 0 || width >= 64) return a;
  unsigned shift = 64 - width;
  return transfer_ashr_const(transfer_shl_const(a, shift), shift);
}

constexpr Tri known_eq_zero(Tnum t, uint64_t bitmask) {
  if ((t.value & bitmask) != 0) return Tri::no;
  if ((t.mask & bitmask) == 0) return Tri::yes;
  return Tri::unknown;
}

// Equality of two quantities as far as the known bits decide it.
constexpr Tri known_equal(Tnum a, Tnum b) {
  uint64_t both_known = ~a.mask & ~b.mask;
  if (((a.value ^ b.value) & both_known) != 0) return Tri::no;
  if (a.mask == 0 && b.mask == 0) return Tri::yes;
  return Tri::unknown;
}

std::string to_string(Tnum t);

}  // namespace isskit::kb
