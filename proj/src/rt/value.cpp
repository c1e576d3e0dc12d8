#include "isskit/rt/value.hpp"

#include <fmt/format.h>

#include <functional>
#include <limits>

namespace isskit::rt {

namespace {
const BigInt& i64_min() {
  static const BigInt v(std::numeric_limits<int64_t>::min());
  return v;
}
const BigInt& i64_max() {
  static const BigInt v(std::numeric_limits<int64_t>::max());
  return v;
}
}  // namespace

bool GenericInt::fits_i64() const {
  if (is_small()) return true;
  return big() >= i64_min() && big() <= i64_max();
}

std::optional<int64_t> GenericInt::as_i64() const {
  if (is_small()) return small();
  if (!fits_i64()) return std::nullopt;
  return static_cast<int64_t>(big());
}

bool operator==(const GenericInt& a, const GenericInt& b) {
  if (a.is_small() && b.is_small()) return a.small() == b.small();
  return a.to_big() == b.to_big();
}

bool operator==(const Value& a, const Value& b) {
  if (a.rep_.index() != b.rep_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.rep_);
        if constexpr (std::is_same_v<T, UnionVal>) {
          return x.type == y.type && x.variant == y.variant &&
                 (x.fields == y.fields || (x.fields && y.fields && *x.fields == *y.fields));
        } else if constexpr (std::is_same_v<T, RecordVal>) {
          return x.type == y.type &&
                 (x.fields == y.fields || (x.fields && y.fields && *x.fields == *y.fields));
        } else {
          return x == y;
        }
      },
      a.rep_);
}

size_t hash_value(const Value& v) {
  auto mix = [](size_t h, size_t x) { return h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); };
  size_t h = v.rep().index();
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Bits>) {
          h = mix(mix(h, x.width), x.bits);
        } else if constexpr (std::is_same_v<T, GenericBits>) {
          h = mix(mix(h, x.width), std::hash<std::string>{}(x.bits.str()));
        } else if constexpr (std::is_same_v<T, I64>) {
          h = mix(h, static_cast<size_t>(x.v));
        } else if constexpr (std::is_same_v<T, GenericInt>) {
          if (auto s = x.as_i64())
            h = mix(h, static_cast<size_t>(*s));
          else
            h = mix(h, std::hash<std::string>{}(x.big().str()));
        } else if constexpr (std::is_same_v<T, bool>) {
          h = mix(h, x);
        } else if constexpr (std::is_same_v<T, EnumVal>) {
          h = mix(mix(h, x.type), x.member);
        } else if constexpr (std::is_same_v<T, UnionVal>) {
          h = mix(mix(h, x.type), x.variant);
          if (x.fields)
            for (auto& f : *x.fields) h = mix(h, hash_value(f));
        } else if constexpr (std::is_same_v<T, RecordVal>) {
          h = mix(h, x.type);
          if (x.fields)
            for (auto& f : *x.fields) h = mix(h, hash_value(f));
        }
      },
      v.rep());
  return h;
}

GenericBits make_generic_bits(Context& ctx, unsigned width, BigInt bits) {
  ++ctx.allocations;
  return GenericBits{width, std::move(bits)};
}

GenericInt make_int(Context& ctx, const BigInt& v) {
  if (ctx.switchable_ints && v >= i64_min() && v <= i64_max())
    return GenericInt(static_cast<int64_t>(v));
  ++ctx.allocations;
  return GenericInt(v);
}

GenericInt make_int(Context& ctx, int64_t v) {
  if (ctx.switchable_ints) return GenericInt(v);
  ++ctx.allocations;
  return GenericInt(BigInt(v));
}

std::string debug_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Bits>) {
          return fmt::format("bv{}:{:#x}", x.width, x.bits);
        } else if constexpr (std::is_same_v<T, GenericBits>) {
          return fmt::format("bv<{}>:0x{}", x.width, x.bits.str(0, std::ios_base::hex));
        } else if constexpr (std::is_same_v<T, I64>) {
          return fmt::format("i64:{}", x.v);
        } else if constexpr (std::is_same_v<T, GenericInt>) {
          return "int:" + x.to_big().str();
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Unit>) {
          return "()";
        } else if constexpr (std::is_same_v<T, EnumVal>) {
          return fmt::format("enum{}:{}", x.type, x.member);
        } else if constexpr (std::is_same_v<T, UnionVal>) {
          std::string s = fmt::format("union{}.{}(", x.type, x.variant);
          if (x.fields)
            for (size_t i = 0; i < x.fields->size(); ++i)
              s += (i ? ", " : "") + debug_string((*x.fields)[i]);
          return s + ")";
        } else {
          std::string s = fmt::format("record{}{{", x.type);
          if (x.fields)
            for (size_t i = 0; i < x.fields->size(); ++i)
              s += (i ? ", " : "") + debug_string((*x.fields)[i]);
          return s + "}";
        }
      },
      v.rep());
}

}  // namespace isskit::rt
