// Interval analysis over integer-typed MIR values.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::analysis {

using rt::BigInt;

// [lo, hi] with either bound possibly infinite (nullopt).
struct IntRange {
  std::optional<BigInt> lo;
  std::optional<BigInt> hi;

  static IntRange top() { return {}; }
  static IntRange exact(const BigInt& v) { return {v, v}; }
  static IntRange of(const BigInt& lo, const BigInt& hi) { return {lo, hi}; }
  static IntRange i64();
  static IntRange signed_bits(unsigned width);
  static IntRange unsigned_bits(unsigned width);

  bool is_top() const { return !lo && !hi; }
  bool fits_i64() const;
  bool contains(const BigInt& v) const;
  bool contains(const IntRange& r) const;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

IntRange hull(const IntRange& a, const IntRange& b);
IntRange meet(const IntRange& a, const IntRange& b);
IntRange add(const IntRange& a, const IntRange& b);
IntRange sub(const IntRange& a, const IntRange& b);
IntRange mul(const IntRange& a, const IntRange& b);
IntRange neg(const IntRange& a);

std::string to_string(const IntRange& r);

// Joins at one block parameter before it widens to top.
inline constexpr unsigned kWidenAfter = 3;

// One entry per value of the function. Integer-typed values (%i and %i64)
// that are reachable carry a range; everything else is nullopt.
struct RangeMap {
  std::vector<std::optional<IntRange>> ranges;
  size_t join_updates = 0;

  const std::optional<IntRange>& operator[](mir::ValueId v) const { return ranges[v]; }
};

RangeMap analyze(const mir::Function& f, const mir::Program& p);

// Range of an operand: literals are exact, values come from `m`.
std::optional<IntRange> operand_range(const RangeMap& m, const mir::Operand& o);

// Rewrite generic integer arithmetic whose operands are available as machine
// integers and whose result range fits into the _i64 form. Returns the number
// of statements rewritten.
size_t narrow(mir::Function& f, const mir::Program& p, const RangeMap& ranges);

// `fn:block:value lo..hi` per integer value, in block order.
std::string dump_ranges(const mir::Function& f, const mir::Program& p, const RangeMap& ranges);
std::string dump_ranges(const mir::Program& p);

}  // namespace isskit::analysis
