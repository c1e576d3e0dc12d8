#include "isskit/trace/trace.hpp"

#include <fmt/format.h>

#include "isskit/mir/parser.hpp"

namespace isskit::trace {

std::string_view to_string(TraceOpKind k) {
  switch (k) {
    case TraceOpKind::op: return "op";
    case TraceOpKind::read_state: return "read_state_field";
    case TraceOpKind::write_state: return "write_state_field";
    case TraceOpKind::mem_read: return "mem_read_op";
    case TraceOpKind::mem_write: return "mem_write_op";
    case TraceOpKind::fetch: return "fetch";
    case TraceOpKind::guard_true: return "guard_true";
    case TraceOpKind::guard_false: return "guard_false";
    case TraceOpKind::guard_value_eq: return "guard_value_eq";
    case TraceOpKind::guard_pc_eq: return "guard_pc_eq";
    case TraceOpKind::insn_end: return "insn_end";
  }
  return "?";
}

size_t Trace::guard_count(bool optimized_ops) const {
  size_t n = 0;
  for (auto& op : optimized_ops ? optimized : raw) n += op.is_guard();
  return n;
}

ConstantPool::ConstantPool(std::vector<rt::Value>& values) : values_(values) {
  for (size_t i = 0; i < values_.size(); ++i) index_.emplace(rt::hash_value(values_[i]), i);
}

Ref ConstantPool::intern(const rt::Value& v) {
  size_t h = rt::hash_value(v);
  auto [lo, hi] = index_.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (values_[it->second] == v && values_[it->second].rep().index() == v.rep().index())
      return const_ref(it->second);
  values_.push_back(v);
  index_.emplace(h, values_.size() - 1);
  return const_ref(values_.size() - 1);
}

std::string dump(const std::vector<TraceOp>& ops, const Trace& t, const mir::Program& p) {
  auto arg = [&](Ref r) -> std::string {
    if (r == kNoRef) return "?";
    if (is_const_ref(r)) return mir::format_literal(t.constants[const_index(r)], p);
    return fmt::format("v{}", r);
  };
  std::string out;
  for (size_t i = 0; i < ops.size(); ++i) {
    const TraceOp& op = ops[i];
    std::string name;
    switch (op.kind) {
      case TraceOpKind::op:
      case TraceOpKind::mem_read:
      case TraceOpKind::mem_write: name = mir::to_string(op.op); break;
      case TraceOpKind::read_state:
      case TraceOpKind::write_state:
        name = fmt::format("{}<{}>", to_string(op.kind), p.registers[op.reg].name);
        break;
      default: name = std::string(to_string(op.kind)); break;
    }
    std::string args;
    for (size_t k = 0; k < op.args.size(); ++k) {
      if (k) args += ", ";
      args += arg(op.args[k]);
    }
    if (op.kind == TraceOpKind::guard_value_eq || op.kind == TraceOpKind::guard_pc_eq)
      args += ", " + mir::format_literal(op.value, p);
    out += fmt::format("v{} = {}({})", i, name, args);
    if (op.tnum) out += fmt::format(" [tnum ⟨0x{:X},0x{:X}⟩]", op.tnum->value, op.tnum->mask);
    out += '\n';
  }
  return out;
}

}  // namespace isskit::trace
