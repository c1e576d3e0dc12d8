// Architectural state, run statistics and traps of a simulated machine.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isskit/mir/ir.hpp"
#include "isskit/rt/value.hpp"

namespace isskit::interp {

// The all-zero value of a declared type.
rt::Value zero_value(const mir::Type& t, const mir::Program& p);

struct MachineState {
  std::vector<rt::Value> regs;  // indexed like Program::registers
  uint32_t pc_reg = mir::kUnresolved;
  uint64_t icount = 0;
  uint64_t tick_interval = 100;
  bool halted = false;

  static MachineState for_program(const mir::Program& p);

  uint64_t pc() const { return regs[pc_reg].as<rt::Bits>().bits; }
  void set_pc(uint64_t v) { regs[pc_reg] = rt::Bits::make(64, v); }
  // Registers by name; throws std::out_of_range for unknown names.
  const rt::Value& reg(const mir::Program& p, const std::string& name) const;
  void set_reg(const mir::Program& p, const std::string& name, rt::Value v);

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

// One `name=0xHEX` line per register, sorted by name.
std::string register_dump(const MachineState& s, const mir::Program& p);

struct RunStats {
  uint64_t guest_instructions = 0;
  uint64_t executed_micro_ops = 0;
  uint64_t generic_allocations = 0;
  uint64_t traces_compiled = 0;
  uint64_t traces_invalidated = 0;
  uint64_t trace_guard_exits = 0;
  uint64_t traces_aborted = 0;
  uint64_t ticks = 0;

  double micro_ops_per_instruction() const {
    return guest_instructions ? double(executed_micro_ops) / double(guest_instructions) : 0.0;
  }
  friend bool operator==(const RunStats&, const RunStats&) = default;
};

std::string to_string(const RunStats& s);

// A model trap with the coordinates of the failing statement and, once the
// driver has seen it, the guest pc of the instruction.
class Trap : public rt::ModelTrap {
 public:
  Trap(std::string message, std::string function, std::string block, int statement);

  const std::string& message() const { return message_; }
  const std::string& function() const { return function_; }
  const std::string& block() const { return block_; }
  int statement() const { return statement_; }
  bool has_pc() const { return has_pc_; }
  uint64_t pc() const { return pc_; }
  void set_pc(uint64_t pc);

 private:
  std::string message_, function_, block_;
  int statement_;
  bool has_pc_ = false;
  uint64_t pc_ = 0;
};

// What a differential comparison looks at: message and guest pc only.
struct TrapOutcome {
  std::string message;
  uint64_t pc = 0;
  friend bool operator==(const TrapOutcome&, const TrapOutcome&) = default;
};

}  // namespace isskit::interp
