#include "isskit/mir/ir.hpp"

#include <fmt/format.h>

#include <unordered_set>

namespace isskit::mir {

std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::BvFixed: return fmt::format("%bv{}", t.width);
    case TypeKind::BvGeneric: return "%bv";
    case TypeKind::IntMachine: return "%i64";
    case TypeKind::IntGeneric: return "%i";
    case TypeKind::Bool: return "%bool";
    case TypeKind::Unit: return "%unit";
    case TypeKind::Enum: return "%enum " + t.name;
    case TypeKind::Union: return "%union " + t.name;
    case TypeKind::Record: return "%record " + t.name;
  }
  return "?";
}

std::string to_string(const SourceSpan& s) {
  return fmt::format("{}:{}:{}", s.file ? *s.file : std::string("<input>"), s.line, s.column);
}

namespace {

struct OpInfo {
  std::string_view name;
  unsigned nints;
  bool named;
};

constexpr OpInfo kOpInfo[] = {
#define ISSKIT_INFO(id, text, nints, named) {text, nints, named},
    ISSKIT_OPCODES(ISSKIT_INFO)
#undef ISSKIT_INFO
};

}  // namespace

std::string_view opcode_name(Opcode op) { return kOpInfo[static_cast<size_t>(op)].name; }
unsigned opcode_int_args(Opcode op) { return kOpInfo[static_cast<size_t>(op)].nints; }
bool opcode_takes_name(Opcode op) { return kOpInfo[static_cast<size_t>(op)].named; }

std::optional<Opcode> opcode_from_name(std::string_view name) {
  static const std::unordered_map<std::string_view, Opcode> table = [] {
    std::unordered_map<std::string_view, Opcode> m;
    for (size_t i = 0; i < std::size(kOpInfo); ++i) m.emplace(kOpInfo[i].name, static_cast<Opcode>(i));
    return m;
  }();
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::string to_string(const OpKind& op) {
  if (op.code == Opcode::call) return op.name;
  std::string s(opcode_name(op.code));
  unsigned n = opcode_int_args(op.code);
  bool named = opcode_takes_name(op.code);
  if (n == 0 && !named) return s;
  s += '<';
  bool first = true;
  if (named) {
    s += op.name;
    first = false;
  }
  for (unsigned i = 0; i < n; ++i) {
    if (!first) s += ',';
    s += std::to_string(op.ints[i]);
    first = false;
  }
  return s + '>';
}

OpKind make_op(Opcode code, std::initializer_list<int64_t> ints, std::string name) {
  OpKind op;
  op.code = code;
  size_t i = 0;
  for (int64_t v : ints) op.ints[i++] = v;
  op.name = std::move(name);
  return op;
}

std::string Function::fresh_name(const std::string& base) const {
  std::unordered_set<std::string_view> used;
  for (auto& v : values) used.insert(v.name);
  if (!used.count(base)) return base;
  for (unsigned i = 1;; ++i) {
    std::string candidate = fmt::format("{}.{}", base, i);
    if (!used.count(candidate)) return candidate;
  }
}

std::optional<BlockId> Function::find_block(const std::string& label) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].label == label) return static_cast<BlockId>(i);
  return std::nullopt;
}

void Program::reindex() {
  enum_index.clear();
  union_index.clear();
  record_index.clear();
  register_index.clear();
  function_index.clear();
  variant_index.clear();
  for (size_t i = 0; i < enums.size(); ++i) enum_index.emplace(enums[i].name, i);
  for (size_t i = 0; i < unions.size(); ++i) {
    union_index.emplace(unions[i].name, i);
    auto it = enum_index.find(unions[i].name);
    unions[i].tag_enum = it == enum_index.end() ? kUnresolved : it->second;
    for (size_t v = 0; v < unions[i].variants.size(); ++v)
      variant_index.emplace(unions[i].variants[v].name, std::make_pair(uint32_t(i), uint32_t(v)));
  }
  for (size_t i = 0; i < records.size(); ++i) record_index.emplace(records[i].name, i);
  for (size_t i = 0; i < registers.size(); ++i) register_index.emplace(registers[i].name, i);
  for (size_t i = 0; i < functions.size(); ++i) function_index.emplace(functions[i].name, i);
}

const Function* Program::find_function(const std::string& n) const {
  auto it = function_index.find(n);
  return it == function_index.end() ? nullptr : &functions[it->second];
}
Function* Program::find_function(const std::string& n) {
  auto it = function_index.find(n);
  return it == function_index.end() ? nullptr : &functions[it->second];
}
const EnumDecl* Program::find_enum(const std::string& n) const {
  auto it = enum_index.find(n);
  return it == enum_index.end() ? nullptr : &enums[it->second];
}
const UnionDecl* Program::find_union(const std::string& n) const {
  auto it = union_index.find(n);
  return it == union_index.end() ? nullptr : &unions[it->second];
}
const RecordDecl* Program::find_record(const std::string& n) const {
  auto it = record_index.find(n);
  return it == record_index.end() ? nullptr : &records[it->second];
}
std::optional<uint32_t> Program::find_register(const std::string& n) const {
  auto it = register_index.find(n);
  if (it == register_index.end()) return std::nullopt;
  return it->second;
}

Type literal_type(const rt::Value& v, const Program& p) {
  if (auto b = v.get_if<rt::Bits>()) return Type::bv(b->width);
  if (v.is<rt::GenericBits>()) return Type::bv_generic();
  if (v.is<rt::I64>()) return Type::i64();
  if (v.is<rt::GenericInt>()) return Type::int_generic();
  if (v.is<bool>()) return Type::boolean();
  if (auto e = v.get_if<rt::EnumVal>())
    return Type::enumeration(e->type < p.enums.size() ? p.enums[e->type].name : "?");
  if (auto u = v.get_if<rt::UnionVal>())
    return Type::union_of(u->type < p.unions.size() ? p.unions[u->type].name : "?");
  if (auto r = v.get_if<rt::RecordVal>())
    return Type::record(r->type < p.records.size() ? p.records[r->type].name : "?");
  return Type::unit();
}

Type operand_type(const Function& f, const Operand& o, const Program& p) {
  if (o.is_value()) return f.values[o.id].type;
  return literal_type(o.literal, p);
}

void resolve_symbols(Function& f, const Program& p) {
  for (auto& b : f.blocks)
    for (auto& s : b.stmts) {
      OpKind& op = s.op;
      op.sym = kUnresolved;
      op.sym2 = 0;
      switch (op.code) {
        case Opcode::read_reg:
        case Opcode::write_reg:
          if (auto r = p.find_register(op.name)) op.sym = *r;
          break;
        case Opcode::call:
          if (auto it = p.function_index.find(op.name); it != p.function_index.end())
            op.sym = it->second;
          break;
        case Opcode::make_union:
        case Opcode::union_field:
          if (auto it = p.variant_index.find(op.name); it != p.variant_index.end()) {
            op.sym = it->second.first;
            op.sym2 = it->second.second;
          }
          break;
        case Opcode::union_tag:
          if (!s.args.empty()) {
            Type t = operand_type(f, s.args[0], p);
            if (auto u = p.find_union(t.name); u && t.kind == TypeKind::Union) op.sym = u->tag_enum;
          }
          break;
        case Opcode::record_make:
          if (auto it = p.record_index.find(op.name); it != p.record_index.end()) op.sym = it->second;
          break;
        case Opcode::record_get:
        case Opcode::record_set:
          if (!s.args.empty()) {
            Type t = operand_type(f, s.args[0], p);
            if (auto it = p.record_index.find(t.name);
                it != p.record_index.end() && t.kind == TypeKind::Record) {
              const auto& fields = p.records[it->second].fields;
              for (size_t i = 0; i < fields.size(); ++i)
                if (fields[i].name == op.name) {
                  op.sym = it->second;
                  op.sym2 = i;
                }
            }
          }
          break;
        default:
          break;
      }
    }
}

void resolve_symbols(Program& p) {
  p.reindex();
  for (auto& f : p.functions) resolve_symbols(f, p);
}

size_t count_generic_ops(const Function& f) {
  size_t n = 0;
  for (auto& b : f.blocks)
    for (auto& s : b.stmts)
      if (s.result != kNoValue && f.values[s.result].type.is_generic()) ++n;
  return n;
}

size_t count_generic_ops(const Program& p) {
  size_t n = 0;
  for (auto& f : p.functions) n += count_generic_ops(f);
  return n;
}

}  // namespace isskit::mir
