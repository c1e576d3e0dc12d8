// Runtime values of the model language.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace isskit::rt {

using BigInt = boost::multiprecision::cpp_int;

// A failure the model itself defines: checked casts, out-of-range
// memory, explicit raise. Distinct from host bugs.
class ModelTrap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-simulator bookkeeping shared by every operation that may allocate.
struct Context {
  uint64_t allocations = 0;
  bool switchable_ints = true;

  uint64_t allocation_count() const { return allocations; }
  void reset_allocation_count() { allocations = 0; }
};

inline uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

struct Bits {
  uint32_t width = 1;
  uint64_t bits = 0;

  static Bits make(unsigned width, uint64_t bits) {
    return {width, bits & width_mask(width)};
  }
  friend bool operator==(const Bits&, const Bits&) = default;
};

struct GenericBits {
  uint32_t width = 1;
  BigInt bits;
  friend bool operator==(const GenericBits&, const GenericBits&) = default;
};

class GenericInt {
 public:
  GenericInt() = default;
  explicit GenericInt(int64_t small) : rep_(small) {}
  explicit GenericInt(BigInt big) : rep_(std::move(big)) {}

  bool is_small() const { return std::holds_alternative<int64_t>(rep_); }
  int64_t small() const { return std::get<int64_t>(rep_); }
  const BigInt& big() const { return std::get<BigInt>(rep_); }
  BigInt to_big() const { return is_small() ? BigInt(small()) : big(); }
  bool fits_i64() const;
  std::optional<int64_t> as_i64() const;

  friend bool operator==(const GenericInt& a, const GenericInt& b);

 private:
  std::variant<int64_t, BigInt> rep_{int64_t{0}};
};

struct I64 {
  int64_t v = 0;
  friend bool operator==(const I64&, const I64&) = default;
};

struct Unit {
  friend bool operator==(const Unit&, const Unit&) = default;
};

struct EnumVal {
  uint32_t type = 0;
  uint32_t member = 0;
  friend bool operator==(const EnumVal&, const EnumVal&) = default;
};

class Value;
using Fields = std::shared_ptr<const std::vector<Value>>;

struct UnionVal {
  uint32_t type = 0;
  uint32_t variant = 0;
  Fields fields;
};

struct RecordVal {
  uint32_t type = 0;
  Fields fields;
};

class Value {
 public:
  using Rep = std::variant<Bits, GenericBits, I64, GenericInt, bool, Unit, EnumVal, UnionVal,
                           RecordVal>;

  Value() : rep_(Unit{}) {}
  template <typename T, typename = std::enable_if_t<std::is_constructible_v<Rep, T&&> &&
                                                    !std::is_same_v<std::decay_t<T>, Value>>>
  Value(T&& v) : rep_(std::forward<T>(v)) {}

  template <typename T>
  bool is() const { return std::holds_alternative<T>(rep_); }
  template <typename T>
  const T& as() const { return std::get<T>(rep_); }
  template <typename T>
  const T* get_if() const { return std::get_if<T>(&rep_); }
  const Rep& rep() const { return rep_; }

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Rep rep_;
};

size_t hash_value(const Value& v);

// Constructors that respect allocation accounting and the switchable
// integer representation.
GenericBits make_generic_bits(Context& ctx, unsigned width, BigInt bits);
GenericInt make_int(Context& ctx, const BigInt& v);
GenericInt make_int(Context& ctx, int64_t v);

std::string debug_string(const Value& v);

}  // namespace isskit::rt
