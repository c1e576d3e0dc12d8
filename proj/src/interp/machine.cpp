#include "isskit/interp/machine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace isskit::interp {

rt::Value zero_value(const mir::Type& t, const mir::Program& p) {
  using mir::TypeKind;
  switch (t.kind) {
    case TypeKind::BvFixed: return rt::Bits::make(t.width, 0);
    case TypeKind::BvGeneric: return rt::GenericBits{1, 0};
    case TypeKind::IntMachine: return rt::I64{0};
    case TypeKind::IntGeneric: return rt::GenericInt(int64_t{0});
    case TypeKind::Bool: return false;
    case TypeKind::Unit: return rt::Unit{};
    case TypeKind::Enum: {
      auto it = p.enum_index.find(t.name);
      return rt::EnumVal{it == p.enum_index.end() ? 0 : it->second, 0};
    }
    case TypeKind::Union: {
      auto it = p.union_index.find(t.name);
      if (it == p.union_index.end()) return rt::Unit{};
      auto fields = std::make_shared<std::vector<rt::Value>>();
      for (auto& ft : p.unions[it->second].variants.at(0).fields) fields->push_back(zero_value(ft, p));
      return rt::UnionVal{it->second, 0, std::move(fields)};
    }
    case TypeKind::Record: {
      auto it = p.record_index.find(t.name);
      if (it == p.record_index.end()) return rt::Unit{};
      auto fields = std::make_shared<std::vector<rt::Value>>();
      for (auto& f : p.records[it->second].fields) fields->push_back(zero_value(f.type, p));
      return rt::RecordVal{it->second, std::move(fields)};
    }
  }
  return rt::Unit{};
}

MachineState MachineState::for_program(const mir::Program& p) {
  MachineState s;
  for (auto& r : p.registers) s.regs.push_back(zero_value(r.type, p));
  if (auto r = p.find_register(p.pc_reg)) s.pc_reg = *r;
  return s;
}

const rt::Value& MachineState::reg(const mir::Program& p, const std::string& name) const {
  auto r = p.find_register(name);
  if (!r) throw std::out_of_range("no register " + name);
  return regs.at(*r);
}

void MachineState::set_reg(const mir::Program& p, const std::string& name, rt::Value v) {
  auto r = p.find_register(name);
  if (!r) throw std::out_of_range("no register " + name);
  regs.at(*r) = std::move(v);
}

std::string register_dump(const MachineState& s, const mir::Program& p) {
  std::vector<size_t> order(p.registers.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return p.registers[a].name < p.registers[b].name; });
  std::string out;
  for (size_t i : order) {
    const rt::Value& v = s.regs[i];
    if (auto b = v.get_if<rt::Bits>())
      out += fmt::format("{}=0x{:0{}X}\n", p.registers[i].name, b->bits, (b->width + 3) / 4);
    else
      out += fmt::format("{}={}\n", p.registers[i].name, rt::debug_string(v));
  }
  return out;
}

std::string to_string(const RunStats& s) {
  return fmt::format(
      "guest_instructions={}\nexecuted_micro_ops={}\ngeneric_allocations={}\ntraces_compiled={}\n"
      "traces_invalidated={}\ntrace_guard_exits={}\ntraces_aborted={}\nticks={}\n"
      "micro_ops_per_instruction={:.3f}\n",
      s.guest_instructions, s.executed_micro_ops, s.generic_allocations, s.traces_compiled,
      s.traces_invalidated, s.trace_guard_exits, s.traces_aborted, s.ticks,
      s.micro_ops_per_instruction());
}

namespace {

std::string describe(const std::string& message, const std::string& function,
                     const std::string& block, int statement, bool has_pc, uint64_t pc) {
  std::string s = message;
  if (!function.empty()) {
    s += " (in " + function;
    if (!block.empty()) s += ":" + block;
    if (statement >= 0) s += fmt::format(":{}", statement);
    s += ")";
  }
  if (has_pc) s += fmt::format(" at pc 0x{:X}", pc);
  return s;
}

}  // namespace

Trap::Trap(std::string message, std::string function, std::string block, int statement)
    : rt::ModelTrap(describe(message, function, block, statement, false, 0)),
      message_(std::move(message)),
      function_(std::move(function)),
      block_(std::move(block)),
      statement_(statement) {}

void Trap::set_pc(uint64_t pc) {
  has_pc_ = true;
  pc_ = pc;
  static_cast<rt::ModelTrap&>(*this) =
      rt::ModelTrap(describe(message_, function_, block_, statement_, true, pc));
}

}  // namespace isskit::interp
