#include "isskit/mir/eval.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "isskit/rt/ops.hpp"

namespace isskit::mir {

namespace {

const rt::Bits& B(const rt::Value* v) { return v->as<rt::Bits>(); }
const rt::GenericBits& G(const rt::Value* v) { return v->as<rt::GenericBits>(); }
const rt::GenericInt& N(const rt::Value* v) { return v->as<rt::GenericInt>(); }
int64_t I(const rt::Value* v) { return v->as<rt::I64>().v; }

}  // namespace

rt::Value eval_pure(const OpKind& op, const rt::Value* const* a, size_t n, rt::Context& ctx) {
  using rt::I64;
  auto w = [&](int i) { return static_cast<unsigned>(op.ints[i]); };
  switch (op.code) {
    case Opcode::add_bits: return rt::gadd(ctx, G(a[0]), G(a[1]));
    case Opcode::sub_bits: return rt::gsub(ctx, G(a[0]), G(a[1]));
    case Opcode::and_bits: return rt::gand(ctx, G(a[0]), G(a[1]));
    case Opcode::or_bits: return rt::gor(ctx, G(a[0]), G(a[1]));
    case Opcode::xor_bits: return rt::gxor(ctx, G(a[0]), G(a[1]));
    case Opcode::not_bits: return rt::gnot(ctx, G(a[0]));
    case Opcode::eq_bits: return rt::geq(G(a[0]), G(a[1]));
    case Opcode::shiftl: return rt::gshl(ctx, G(a[0]), N(a[1]));
    case Opcode::shiftr: return rt::glshr(ctx, G(a[0]), N(a[1]));
    case Opcode::arith_shiftr: return rt::gashr(ctx, G(a[0]), N(a[1]));
    case Opcode::sign_extend: return rt::gsign_extend(ctx, G(a[0]), N(a[1]));
    case Opcode::zero_extend: return rt::gzero_extend(ctx, G(a[0]), N(a[1]));
    case Opcode::vector_subrange: return rt::gsubrange(ctx, G(a[0]), N(a[1]), N(a[2]));
    case Opcode::bitvector_concat: return rt::gconcat(ctx, G(a[0]), G(a[1]));
    case Opcode::bitvector_length: return rt::glength(ctx, G(a[0]));
    case Opcode::signed_: return rt::gsigned(ctx, G(a[0]));
    case Opcode::unsigned_: return rt::gunsigned(ctx, G(a[0]));
    case Opcode::add_int: return rt::iadd(ctx, N(a[0]), N(a[1]));
    case Opcode::sub_int: return rt::isub(ctx, N(a[0]), N(a[1]));
    case Opcode::mul_int: return rt::imul(ctx, N(a[0]), N(a[1]));
    case Opcode::neg_int: return rt::ineg(ctx, N(a[0]));
    case Opcode::eq_int: return rt::icmp(N(a[0]), N(a[1])) == 0;
    case Opcode::lt_int: return rt::icmp(N(a[0]), N(a[1])) < 0;
    case Opcode::lteq_int: return rt::icmp(N(a[0]), N(a[1])) <= 0;
    case Opcode::gt_int: return rt::icmp(N(a[0]), N(a[1])) > 0;
    case Opcode::gteq_int: return rt::icmp(N(a[0]), N(a[1])) >= 0;
    case Opcode::int_to_bits: return rt::gint_to_bits(ctx, N(a[0]), N(a[1]));
    case Opcode::cast_bv_to_generic: {
      const rt::Bits& b = B(a[0]);
      if (b.width != w(0)) rt::trap("cast_bv_to_generic: width mismatch");
      return rt::to_generic(ctx, b);
    }
    case Opcode::cast_bv_from_generic: return rt::from_generic(G(a[0]), w(0));
    case Opcode::cast_i64_to_int: return rt::i64_to_int(ctx, I(a[0]));
    case Opcode::cast_int_to_i64: return I64{rt::int_to_i64(N(a[0]))};
    case Opcode::add_bits_bv_c: return rt::add(B(a[0]), B(a[1]));
    case Opcode::sub_bits_bv_c: return rt::sub(B(a[0]), B(a[1]));
    case Opcode::and_bits_bv_c: return rt::band(B(a[0]), B(a[1]));
    case Opcode::or_bits_bv_c: return rt::bor(B(a[0]), B(a[1]));
    case Opcode::xor_bits_bv_c: return rt::bxor(B(a[0]), B(a[1]));
    case Opcode::not_bits_bv_c: return rt::bnot(B(a[0]));
    case Opcode::eq_bits_bv_c: return rt::eq(B(a[0]), B(a[1]));
    case Opcode::ult_bits_bv_c: return rt::ult(B(a[0]), B(a[1]));
    case Opcode::shiftl_bv_c: return rt::shl(B(a[0]), I(a[1]));
    case Opcode::shiftr_bv_c: return rt::lshr(B(a[0]), I(a[1]));
    case Opcode::arith_shiftr_bv_c: return rt::ashr(B(a[0]), I(a[1]));
    case Opcode::sign_extend_bv_c: return rt::sign_extend(B(a[0]), w(1));
    case Opcode::zero_extend_bv_c: return rt::zero_extend(B(a[0]), w(1));
    case Opcode::vector_subrange_bv_c: return rt::subrange(B(a[0]), w(1), w(2));
    case Opcode::bitvector_concat_bv_c: return rt::concat(B(a[0]), B(a[1]));
    case Opcode::bitvector_length_bv_c: return I64{B(a[0]).width};
    case Opcode::signed_bv_c: return I64{rt::to_signed(B(a[0]))};
    case Opcode::unsigned_bv_c: return I64{rt::to_unsigned(B(a[0]))};
    case Opcode::int_to_bits_i64: return rt::int_to_bits(I(a[0]), w(0));
    case Opcode::add_int_i64: return I64{rt::add_i64(I(a[0]), I(a[1]))};
    case Opcode::sub_int_i64: return I64{rt::sub_i64(I(a[0]), I(a[1]))};
    case Opcode::mul_int_i64: return I64{rt::mul_i64(I(a[0]), I(a[1]))};
    case Opcode::neg_int_i64: return I64{rt::neg_i64(I(a[0]))};
    case Opcode::eq_int_i64: return I(a[0]) == I(a[1]);
    case Opcode::lt_int_i64: return I(a[0]) < I(a[1]);
    case Opcode::lteq_int_i64: return I(a[0]) <= I(a[1]);
    case Opcode::gt_int_i64: return I(a[0]) > I(a[1]);
    case Opcode::gteq_int_i64: return I(a[0]) >= I(a[1]);
    case Opcode::eq_enum: return a[0]->as<rt::EnumVal>() == a[1]->as<rt::EnumVal>();
    case Opcode::eq_bool: return a[0]->as<bool>() == a[1]->as<bool>();
    case Opcode::not_bool: return !a[0]->as<bool>();
    case Opcode::and_bool: return a[0]->as<bool>() && a[1]->as<bool>();
    case Opcode::or_bool: return a[0]->as<bool>() || a[1]->as<bool>();
    case Opcode::make_union: {
      auto fields = std::make_shared<std::vector<rt::Value>>();
      fields->reserve(n);
      for (size_t i = 0; i < n; ++i) fields->push_back(*a[i]);
      return rt::UnionVal{op.sym, op.sym2, std::move(fields)};
    }
    case Opcode::union_tag:
      return rt::EnumVal{op.sym, a[0]->as<rt::UnionVal>().variant};
    case Opcode::union_field: {
      const auto& u = a[0]->as<rt::UnionVal>();
      if (u.variant != op.sym2)
        rt::trap(fmt::format("union_field<{}>: value holds a different variant", op.name));
      return (*u.fields)[op.ints[0]];
    }
    case Opcode::record_make: {
      auto fields = std::make_shared<std::vector<rt::Value>>();
      fields->reserve(n);
      for (size_t i = 0; i < n; ++i) fields->push_back(*a[i]);
      return rt::RecordVal{op.sym, std::move(fields)};
    }
    case Opcode::record_get: return (*a[0]->as<rt::RecordVal>().fields)[op.sym2];
    case Opcode::record_set: {
      const auto& r = a[0]->as<rt::RecordVal>();
      auto fields = std::make_shared<std::vector<rt::Value>>(*r.fields);
      (*fields)[op.sym2] = *a[1];
      return rt::RecordVal{r.type, std::move(fields)};
    }
    default:
      throw std::logic_error(fmt::format("eval_pure: {} is not a pure operation", to_string(op)));
  }
}

}  // namespace isskit::mir
