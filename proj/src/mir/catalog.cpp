#include "isskit/mir/catalog.hpp"

#include <fmt/format.h>

namespace isskit::mir {

Effect effect_of(Opcode op) {
  switch (op) {
    case Opcode::not_bits:
    case Opcode::bitvector_length:
    case Opcode::signed_:
    case Opcode::unsigned_:
    case Opcode::add_int:
    case Opcode::sub_int:
    case Opcode::mul_int:
    case Opcode::neg_int:
    case Opcode::eq_int:
    case Opcode::lt_int:
    case Opcode::lteq_int:
    case Opcode::gt_int:
    case Opcode::gteq_int:
    case Opcode::cast_bv_to_generic:
    case Opcode::cast_i64_to_int:
    case Opcode::add_bits_bv_c:
    case Opcode::sub_bits_bv_c:
    case Opcode::and_bits_bv_c:
    case Opcode::or_bits_bv_c:
    case Opcode::xor_bits_bv_c:
    case Opcode::not_bits_bv_c:
    case Opcode::eq_bits_bv_c:
    case Opcode::ult_bits_bv_c:
    case Opcode::sign_extend_bv_c:
    case Opcode::zero_extend_bv_c:
    case Opcode::vector_subrange_bv_c:
    case Opcode::bitvector_concat_bv_c:
    case Opcode::bitvector_length_bv_c:
    case Opcode::signed_bv_c:
    case Opcode::unsigned_bv_c:
    case Opcode::int_to_bits_i64:
    case Opcode::eq_int_i64:
    case Opcode::lt_int_i64:
    case Opcode::lteq_int_i64:
    case Opcode::gt_int_i64:
    case Opcode::gteq_int_i64:
    case Opcode::eq_enum:
    case Opcode::eq_bool:
    case Opcode::not_bool:
    case Opcode::and_bool:
    case Opcode::or_bool:
    case Opcode::make_union:
    case Opcode::union_tag:
    case Opcode::record_make:
    case Opcode::record_get:
    case Opcode::record_set:
      return Effect::pure;
    case Opcode::add_bits:
    case Opcode::sub_bits:
    case Opcode::and_bits:
    case Opcode::or_bits:
    case Opcode::xor_bits:
    case Opcode::eq_bits:
    case Opcode::shiftl:
    case Opcode::shiftr:
    case Opcode::arith_shiftr:
    case Opcode::sign_extend:
    case Opcode::zero_extend:
    case Opcode::vector_subrange:
    case Opcode::bitvector_concat:
    case Opcode::int_to_bits:
    case Opcode::cast_bv_from_generic:
    case Opcode::cast_int_to_i64:
    case Opcode::shiftl_bv_c:
    case Opcode::shiftr_bv_c:
    case Opcode::arith_shiftr_bv_c:
    case Opcode::add_int_i64:
    case Opcode::sub_int_i64:
    case Opcode::mul_int_i64:
    case Opcode::neg_int_i64:
    case Opcode::union_field:
      return Effect::checked;
    case Opcode::read_reg:
    case Opcode::write_reg:
    case Opcode::mem_read:
    case Opcode::mem_read_bv_c:
    case Opcode::mem_write:
    case Opcode::mem_write_bv_c:
    case Opcode::fetch:
    case Opcode::halt_check:
      return Effect::state;
    case Opcode::call:
      return Effect::call;
  }
  return Effect::state;
}

std::optional<Opcode> generic_counterpart(Opcode op) {
  switch (op) {
    case Opcode::add_bits_bv_c: return Opcode::add_bits;
    case Opcode::sub_bits_bv_c: return Opcode::sub_bits;
    case Opcode::and_bits_bv_c: return Opcode::and_bits;
    case Opcode::or_bits_bv_c: return Opcode::or_bits;
    case Opcode::xor_bits_bv_c: return Opcode::xor_bits;
    case Opcode::not_bits_bv_c: return Opcode::not_bits;
    case Opcode::eq_bits_bv_c: return Opcode::eq_bits;
    case Opcode::shiftl_bv_c: return Opcode::shiftl;
    case Opcode::shiftr_bv_c: return Opcode::shiftr;
    case Opcode::arith_shiftr_bv_c: return Opcode::arith_shiftr;
    case Opcode::sign_extend_bv_c: return Opcode::sign_extend;
    case Opcode::zero_extend_bv_c: return Opcode::zero_extend;
    case Opcode::vector_subrange_bv_c: return Opcode::vector_subrange;
    case Opcode::bitvector_concat_bv_c: return Opcode::bitvector_concat;
    case Opcode::bitvector_length_bv_c: return Opcode::bitvector_length;
    case Opcode::signed_bv_c: return Opcode::signed_;
    case Opcode::unsigned_bv_c: return Opcode::unsigned_;
    case Opcode::int_to_bits_i64: return Opcode::int_to_bits;
    case Opcode::add_int_i64: return Opcode::add_int;
    case Opcode::sub_int_i64: return Opcode::sub_int;
    case Opcode::mul_int_i64: return Opcode::mul_int;
    case Opcode::neg_int_i64: return Opcode::neg_int;
    case Opcode::eq_int_i64: return Opcode::eq_int;
    case Opcode::lt_int_i64: return Opcode::lt_int;
    case Opcode::lteq_int_i64: return Opcode::lteq_int;
    case Opcode::gt_int_i64: return Opcode::gt_int;
    case Opcode::gteq_int_i64: return Opcode::gteq_int;
    case Opcode::mem_read_bv_c: return Opcode::mem_read;
    case Opcode::mem_write_bv_c: return Opcode::mem_write;
    default: return std::nullopt;
  }
}

namespace {

using Result = std::variant<Signature, std::string>;

Signature sig(std::vector<Type> params, Type result) { return {std::move(params), std::move(result)}; }

bool width_ok(int64_t w) { return w >= 1 && w <= 64; }

}  // namespace

Result signature(const OpKind& op, const Program& p, const Type* first) {
  const Type bv = Type::bv_generic(), gi = Type::int_generic(), i64 = Type::i64(),
             boolean = Type::boolean(), unit = Type::unit();
  auto w0 = op.ints[0], w1 = op.ints[1], w2 = op.ints[2];
  auto bad = [&](const std::string& why) -> Result {
    return fmt::format("{}: {}", to_string(op), why);
  };
  auto need_width = [&](int64_t w) { return width_ok(w); };

  switch (op.code) {
    case Opcode::add_bits:
    case Opcode::sub_bits:
    case Opcode::and_bits:
    case Opcode::or_bits:
    case Opcode::xor_bits:
    case Opcode::bitvector_concat:
      return sig({bv, bv}, bv);
    case Opcode::not_bits:
      return sig({bv}, bv);
    case Opcode::eq_bits:
      return sig({bv, bv}, boolean);
    case Opcode::shiftl:
    case Opcode::shiftr:
    case Opcode::arith_shiftr:
    case Opcode::sign_extend:
    case Opcode::zero_extend:
      return sig({bv, gi}, bv);
    case Opcode::vector_subrange:
      return sig({bv, gi, gi}, bv);
    case Opcode::bitvector_length:
    case Opcode::signed_:
    case Opcode::unsigned_:
      return sig({bv}, gi);
    case Opcode::add_int:
    case Opcode::sub_int:
    case Opcode::mul_int:
      return sig({gi, gi}, gi);
    case Opcode::neg_int:
      return sig({gi}, gi);
    case Opcode::eq_int:
    case Opcode::lt_int:
    case Opcode::lteq_int:
    case Opcode::gt_int:
    case Opcode::gteq_int:
      return sig({gi, gi}, boolean);
    case Opcode::int_to_bits:
      return sig({gi, gi}, bv);
    case Opcode::cast_bv_to_generic:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0)}, bv);
    case Opcode::cast_bv_from_generic:
      if (!need_width(w0)) return bad("width out of range");
      return sig({bv}, Type::bv(w0));
    case Opcode::cast_i64_to_int:
      return sig({i64}, gi);
    case Opcode::cast_int_to_i64:
      return sig({gi}, i64);
    case Opcode::add_bits_bv_c:
    case Opcode::sub_bits_bv_c:
    case Opcode::and_bits_bv_c:
    case Opcode::or_bits_bv_c:
    case Opcode::xor_bits_bv_c:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0), Type::bv(w0)}, Type::bv(w0));
    case Opcode::not_bits_bv_c:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0)}, Type::bv(w0));
    case Opcode::eq_bits_bv_c:
    case Opcode::ult_bits_bv_c:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0), Type::bv(w0)}, boolean);
    case Opcode::shiftl_bv_c:
    case Opcode::shiftr_bv_c:
    case Opcode::arith_shiftr_bv_c:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0), i64}, Type::bv(w0));
    case Opcode::sign_extend_bv_c:
    case Opcode::zero_extend_bv_c:
      if (!need_width(w0) || !need_width(w1) || w0 > w1) return bad("needs 1 <= from <= to <= 64");
      return sig({Type::bv(w0)}, Type::bv(w1));
    case Opcode::vector_subrange_bv_c:
      if (!need_width(w0) || w1 >= w0 || w2 < 0 || w2 > w1) return bad("needs width > hi >= lo >= 0");
      return sig({Type::bv(w0)}, Type::bv(w1 - w2 + 1));
    case Opcode::bitvector_concat_bv_c:
      if (!need_width(w0) || !need_width(w1) || w0 + w1 > 64) return bad("result wider than 64");
      return sig({Type::bv(w0), Type::bv(w1)}, Type::bv(w0 + w1));
    case Opcode::bitvector_length_bv_c:
    case Opcode::signed_bv_c:
      if (!need_width(w0)) return bad("width out of range");
      return sig({Type::bv(w0)}, i64);
    case Opcode::unsigned_bv_c:
      if (w0 < 1 || w0 > 63) return bad("width must be 1..63");
      return sig({Type::bv(w0)}, i64);
    case Opcode::int_to_bits_i64:
      if (!need_width(w0)) return bad("width out of range");
      return sig({i64}, Type::bv(w0));
    case Opcode::add_int_i64:
    case Opcode::sub_int_i64:
    case Opcode::mul_int_i64:
      return sig({i64, i64}, i64);
    case Opcode::neg_int_i64:
      return sig({i64}, i64);
    case Opcode::eq_int_i64:
    case Opcode::lt_int_i64:
    case Opcode::lteq_int_i64:
    case Opcode::gt_int_i64:
    case Opcode::gteq_int_i64:
      return sig({i64, i64}, boolean);
    case Opcode::eq_enum:
      if (!first || first->kind != TypeKind::Enum) return bad("operands must be enums");
      return sig({*first, *first}, boolean);
    case Opcode::eq_bool:
    case Opcode::and_bool:
    case Opcode::or_bool:
      return sig({boolean, boolean}, boolean);
    case Opcode::not_bool:
      return sig({boolean}, boolean);
    case Opcode::read_reg: {
      auto r = p.find_register(op.name);
      if (!r) return bad("unknown register");
      return sig({}, p.registers[*r].type);
    }
    case Opcode::write_reg: {
      auto r = p.find_register(op.name);
      if (!r) return bad("unknown register");
      return sig({p.registers[*r].type}, unit);
    }
    case Opcode::mem_read:
      return sig({Type::bv(64), i64}, bv);
    case Opcode::mem_read_bv_c:
      if (w0 != 1 && w0 != 2 && w0 != 4 && w0 != 8) return bad("byte count must be 1, 2, 4 or 8");
      return sig({Type::bv(64)}, Type::bv(8 * w0));
    case Opcode::mem_write:
      return sig({Type::bv(64), i64, bv}, unit);
    case Opcode::mem_write_bv_c:
      if (w0 != 1 && w0 != 2 && w0 != 4 && w0 != 8) return bad("byte count must be 1, 2, 4 or 8");
      return sig({Type::bv(64), Type::bv(8 * w0)}, unit);
    case Opcode::fetch:
      return sig({Type::bv(64)}, Type::bv(32));
    case Opcode::halt_check:
      return sig({}, unit);
    case Opcode::make_union: {
      auto it = p.variant_index.find(op.name);
      if (it == p.variant_index.end()) return bad("unknown union variant");
      const UnionDecl& u = p.unions[it->second.first];
      return sig(u.variants[it->second.second].fields, Type::union_of(u.name));
    }
    case Opcode::union_tag:
      if (!first || first->kind != TypeKind::Union || !p.find_union(first->name))
        return bad("operand must be a union");
      return sig({*first}, Type::enumeration(first->name));
    case Opcode::union_field: {
      auto it = p.variant_index.find(op.name);
      if (it == p.variant_index.end()) return bad("unknown union variant");
      const UnionDecl& u = p.unions[it->second.first];
      const auto& fields = u.variants[it->second.second].fields;
      if (w0 < 0 || w0 >= static_cast<int64_t>(fields.size())) return bad("field index out of range");
      return sig({Type::union_of(u.name)}, fields[w0]);
    }
    case Opcode::record_make: {
      const RecordDecl* r = p.find_record(op.name);
      if (!r) return bad("unknown record");
      Signature s;
      for (auto& f : r->fields) s.params.push_back(f.type);
      s.result = Type::record(r->name);
      return s;
    }
    case Opcode::record_get:
    case Opcode::record_set: {
      if (!first || first->kind != TypeKind::Record) return bad("operand must be a record");
      const RecordDecl* r = p.find_record(first->name);
      if (!r) return bad("unknown record");
      for (auto& f : r->fields)
        if (f.name == op.name) {
          if (op.code == Opcode::record_get) return sig({*first}, f.type);
          return sig({*first, f.type}, *first);
        }
      return bad("unknown field");
    }
    case Opcode::call: {
      const Function* f = p.find_function(op.name);
      if (!f) return bad("unknown function");
      Signature s;
      for (auto v : f->params) s.params.push_back(f->values[v].type);
      s.result = f->ret;
      return s;
    }
  }
  return bad("unknown operation");
}

}  // namespace isskit::mir
