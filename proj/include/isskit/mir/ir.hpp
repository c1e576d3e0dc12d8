// The model IR: typed basic blocks with block parameters.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "isskit/rt/value.hpp"

namespace isskit::mir {

enum class TypeKind : uint8_t {
  BvFixed,
  BvGeneric,
  IntMachine,
  IntGeneric,
  Bool,
  Unit,
  Enum,
  Union,
  Record,
};

struct Type {
  TypeKind kind = TypeKind::Unit;
  uint32_t width = 0;
  std::string name;

  static Type bv(unsigned width) { return {TypeKind::BvFixed, width, {}}; }
  static Type bv_generic() { return {TypeKind::BvGeneric, 0, {}}; }
  static Type i64() { return {TypeKind::IntMachine, 0, {}}; }
  static Type int_generic() { return {TypeKind::IntGeneric, 0, {}}; }
  static Type boolean() { return {TypeKind::Bool, 0, {}}; }
  static Type unit() { return {TypeKind::Unit, 0, {}}; }
  static Type enumeration(std::string n) { return {TypeKind::Enum, 0, std::move(n)}; }
  static Type union_of(std::string n) { return {TypeKind::Union, 0, std::move(n)}; }
  static Type record(std::string n) { return {TypeKind::Record, 0, std::move(n)}; }

  bool is_bv() const { return kind == TypeKind::BvFixed; }
  bool is_generic() const { return kind == TypeKind::BvGeneric || kind == TypeKind::IntGeneric; }

  friend bool operator==(const Type&, const Type&) = default;
};

std::string to_string(const Type& t);

struct SourceSpan {
  std::shared_ptr<const std::string> file;
  uint32_t line = 0;
  uint32_t column = 0;
  uint32_t length = 0;

  bool valid() const { return line >= 1 && column >= 1; }
};

std::string to_string(const SourceSpan& s);

// ---- operation catalog -------------------------------------------------

// name, integer type arguments, takes a symbolic type argument
#define ISSKIT_OPCODES(X)                     \
  X(add_bits, "add_bits", 0, false)           \
  X(sub_bits, "sub_bits", 0, false)           \
  X(and_bits, "and_bits", 0, false)           \
  X(or_bits, "or_bits", 0, false)             \
  X(xor_bits, "xor_bits", 0, false)           \
  X(not_bits, "not_bits", 0, false)           \
  X(eq_bits, "eq_bits", 0, false)             \
  X(shiftl, "shiftl", 0, false)               \
  X(shiftr, "shiftr", 0, false)               \
  X(arith_shiftr, "arith_shiftr", 0, false)   \
  X(sign_extend, "sign_extend", 0, false)     \
  X(zero_extend, "zero_extend", 0, false)     \
  X(vector_subrange, "vector_subrange", 0, false) \
  X(bitvector_concat, "bitvector_concat", 0, false) \
  X(bitvector_length, "bitvector_length", 0, false) \
  X(signed_, "signed", 0, false)              \
  X(unsigned_, "unsigned", 0, false)          \
  X(add_int, "add_int", 0, false)             \
  X(sub_int, "sub_int", 0, false)             \
  X(mul_int, "mul_int", 0, false)             \
  X(neg_int, "neg_int", 0, false)             \
  X(eq_int, "eq_int", 0, false)               \
  X(lt_int, "lt_int", 0, false)               \
  X(lteq_int, "lteq_int", 0, false)           \
  X(gt_int, "gt_int", 0, false)               \
  X(gteq_int, "gteq_int", 0, false)           \
  X(int_to_bits, "int_to_bits", 0, false)     \
  X(cast_bv_to_generic, "cast_bv_to_generic", 1, false) \
  X(cast_bv_from_generic, "cast_bv_from_generic", 1, false) \
  X(cast_i64_to_int, "cast_i64_to_int", 0, false) \
  X(cast_int_to_i64, "cast_int_to_i64", 0, false) \
  X(add_bits_bv_c, "add_bits_bv_c", 1, false) \
  X(sub_bits_bv_c, "sub_bits_bv_c", 1, false) \
  X(and_bits_bv_c, "and_bits_bv_c", 1, false) \
  X(or_bits_bv_c, "or_bits_bv_c", 1, false)   \
  X(xor_bits_bv_c, "xor_bits_bv_c", 1, false) \
  X(not_bits_bv_c, "not_bits_bv_c", 1, false) \
  X(eq_bits_bv_c, "eq_bits_bv_c", 1, false)   \
  X(ult_bits_bv_c, "ult_bits_bv_c", 1, false) \
  X(shiftl_bv_c, "shiftl_bv_c", 1, false)     \
  X(shiftr_bv_c, "shiftr_bv_c", 1, false)     \
  X(arith_shiftr_bv_c, "arith_shiftr_bv_c", 1, false) \
  X(sign_extend_bv_c, "sign_extend_bv_c", 2, false) \
  X(zero_extend_bv_c, "zero_extend_bv_c", 2, false) \
  X(vector_subrange_bv_c, "vector_subrange_bv_c", 3, false) \
  X(bitvector_concat_bv_c, "bitvector_concat_bv_c", 2, false) \
  X(bitvector_length_bv_c, "bitvector_length_bv_c", 1, false) \
  X(signed_bv_c, "signed_bv_c", 1, false)     \
  X(unsigned_bv_c, "unsigned_bv_c", 1, false) \
  X(int_to_bits_i64, "int_to_bits_i64", 1, false) \
  X(add_int_i64, "add_int_i64", 0, false)     \
  X(sub_int_i64, "sub_int_i64", 0, false)     \
  X(mul_int_i64, "mul_int_i64", 0, false)     \
  X(neg_int_i64, "neg_int_i64", 0, false)     \
  X(eq_int_i64, "eq_int_i64", 0, false)       \
  X(lt_int_i64, "lt_int_i64", 0, false)       \
  X(lteq_int_i64, "lteq_int_i64", 0, false)   \
  X(gt_int_i64, "gt_int_i64", 0, false)       \
  X(gteq_int_i64, "gteq_int_i64", 0, false)   \
  X(eq_enum, "eq_enum", 0, false)             \
  X(eq_bool, "eq_bool", 0, false)             \
  X(not_bool, "not_bool", 0, false)           \
  X(and_bool, "and_bool", 0, false)           \
  X(or_bool, "or_bool", 0, false)             \
  X(read_reg, "read_reg", 0, true)            \
  X(write_reg, "write_reg", 0, true)          \
  X(mem_read, "mem_read", 0, false)           \
  X(mem_read_bv_c, "mem_read_bv_c", 1, false) \
  X(mem_write, "mem_write", 0, false)         \
  X(mem_write_bv_c, "mem_write_bv_c", 1, false) \
  X(fetch, "fetch", 0, false)                 \
  X(halt_check, "halt_check", 0, false)       \
  X(make_union, "make_union", 0, true)        \
  X(union_tag, "union_tag", 0, false)         \
  X(union_field, "union_field", 1, true)      \
  X(record_make, "record_make", 0, true)      \
  X(record_get, "record_get", 0, true)        \
  X(record_set, "record_set", 0, true)        \
  X(call, "call", 0, true)

enum class Opcode : uint8_t {
#define ISSKIT_ENUM(id, text, nints, named) id,
  ISSKIT_OPCODES(ISSKIT_ENUM)
#undef ISSKIT_ENUM
};

inline constexpr uint32_t kUnresolved = ~uint32_t{0};

struct OpKind {
  Opcode code = Opcode::add_bits;
  std::array<int64_t, 3> ints{};
  std::string name;
  // Resolved by resolve_symbols: register, function, union or record index,
  // and the variant or field index where one applies.
  uint32_t sym = kUnresolved;
  uint32_t sym2 = 0;

  int64_t arg(size_t i) const { return ints[i]; }

  friend bool operator==(const OpKind& a, const OpKind& b) {
    return a.code == b.code && a.ints == b.ints && a.name == b.name;
  }
};

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);
unsigned opcode_int_args(Opcode op);
bool opcode_takes_name(Opcode op);
std::string to_string(const OpKind& op);

OpKind make_op(Opcode code, std::initializer_list<int64_t> ints = {}, std::string name = {});

// ---- functions and programs -------------------------------------------

using ValueId = uint32_t;
inline constexpr ValueId kNoValue = ~ValueId{0};

struct Operand {
  ValueId id = kNoValue;
  rt::Value literal;

  static Operand value(ValueId v) { return Operand{v, {}}; }
  static Operand lit(rt::Value v) { return Operand{kNoValue, std::move(v)}; }
  bool is_value() const { return id != kNoValue; }
  bool is_literal() const { return id == kNoValue; }

  friend bool operator==(const Operand& a, const Operand& b) {
    return a.id == b.id && (a.id != kNoValue || a.literal == b.literal);
  }
};

struct Statement {
  ValueId result = kNoValue;
  OpKind op;
  std::vector<Operand> args;
  SourceSpan span;
};

using BlockId = uint32_t;

struct Terminator {
  enum class Kind : uint8_t { None, Goto, Branch, Return, Halt, Raise };
  Kind kind = Kind::None;
  Operand value;
  BlockId target = 0;
  BlockId other = 0;
  std::vector<Operand> args;
  std::string message;
  SourceSpan span;

  static Terminator go(BlockId target, std::vector<Operand> args = {}) {
    Terminator t;
    t.kind = Kind::Goto;
    t.target = target;
    t.args = std::move(args);
    return t;
  }
  static Terminator branch(Operand cond, BlockId then_block, BlockId else_block) {
    Terminator t;
    t.kind = Kind::Branch;
    t.value = std::move(cond);
    t.target = then_block;
    t.other = else_block;
    return t;
  }
  static Terminator ret(Operand v) {
    Terminator t;
    t.kind = Kind::Return;
    t.value = std::move(v);
    return t;
  }
};

struct Block {
  std::string label;
  std::vector<ValueId> params;
  std::vector<Statement> stmts;
  Terminator term;
  SourceSpan span;
};

struct ValueInfo {
  std::string name;
  Type type;
};

struct Function {
  std::string name;
  std::vector<ValueId> params;
  Type ret;
  std::vector<Block> blocks;  // blocks[0] is the entry
  std::vector<ValueInfo> values;
  SourceSpan span;

  ValueId add_value(std::string name, Type type) {
    values.push_back({std::move(name), std::move(type)});
    return static_cast<ValueId>(values.size() - 1);
  }
  // A value name not yet used in this function, derived from `base`.
  std::string fresh_name(const std::string& base) const;
  const Type& type_of(ValueId v) const { return values[v].type; }
  std::optional<BlockId> find_block(const std::string& label) const;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> members;
  bool implicit = false;  // the tag enum synthesized for a union
};

struct UnionVariant {
  std::string name;
  std::vector<Type> fields;
};

struct UnionDecl {
  std::string name;
  std::vector<UnionVariant> variants;
  uint32_t tag_enum = kUnresolved;
};

struct RecordField {
  std::string name;
  Type type;
};

struct RecordDecl {
  std::string name;
  std::vector<RecordField> fields;
};

struct RegisterDecl {
  std::string name;
  Type type;
};

struct Program {
  std::string name;
  std::string loop_fn;
  std::string pc_reg;
  std::string tick_fn;

  std::vector<EnumDecl> enums;
  std::vector<UnionDecl> unions;
  std::vector<RecordDecl> records;
  std::vector<RegisterDecl> registers;
  std::vector<Function> functions;

  std::unordered_map<std::string, uint32_t> enum_index;
  std::unordered_map<std::string, uint32_t> union_index;
  std::unordered_map<std::string, uint32_t> record_index;
  std::unordered_map<std::string, uint32_t> register_index;
  std::unordered_map<std::string, uint32_t> function_index;
  // variant name -> (union index, variant index)
  std::unordered_map<std::string, std::pair<uint32_t, uint32_t>> variant_index;

  // Rebuild the name maps after declarations or functions change.
  void reindex();

  const Function* find_function(const std::string& n) const;
  Function* find_function(const std::string& n);
  const EnumDecl* find_enum(const std::string& n) const;
  const UnionDecl* find_union(const std::string& n) const;
  const RecordDecl* find_record(const std::string& n) const;
  std::optional<uint32_t> find_register(const std::string& n) const;
};

// Static type of an operand within `f`.
Type operand_type(const Function& f, const Operand& o, const Program& p);
Type literal_type(const rt::Value& v, const Program& p);

// Fill OpKind::sym/sym2 from names. Unresolvable names stay kUnresolved;
// verify reports them.
void resolve_symbols(Program& p);
void resolve_symbols(Function& f, const Program& p);

// Number of statements producing a generic (allocating) value.
size_t count_generic_ops(const Function& f);
size_t count_generic_ops(const Program& p);

}  // namespace isskit::mir
