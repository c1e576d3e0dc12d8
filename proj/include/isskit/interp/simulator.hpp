// The fetch-decode-execute driver: runs a model's loop function until the
// guest halts or the instruction budget runs out, optionally handing hot
// loops to the trace engine.
#pragma once

#include <memory>
#include <span>

#include "isskit/interp/interpreter.hpp"
#include "isskit/interp/machine.hpp"
#include "isskit/sim/memory.hpp"
#include "isskit/trace/engine.hpp"

namespace isskit::interp {

struct SimConfig {
  uint64_t budget = ~uint64_t{0};
  uint64_t tick_interval = 100;
  bool tracing = false;
  trace::TraceConfig trace;
  bool switchable_ints = true;
  sim::MemoryConfig memory;
};

class Simulator {
 public:
  Simulator(const mir::Program& p, SimConfig config = {});

  // Raw image load; leaves word status untouched.
  void load(uint64_t addr, std::span<const uint8_t> bytes) { memory_.load(addr, bytes); }
  void set_pc(uint64_t pc) { state_.set_pc(pc); }

  // Runs until halt or budget. Model traps propagate as Trap with the pc of
  // the faulting instruction.
  RunStats run();
  RunStats stats() const;

  const mir::Program& program() const { return program_; }
  const SimConfig& config() const { return config_; }
  MachineState& state() { return state_; }
  const MachineState& state() const { return state_; }
  sim::SimMemory& memory() { return memory_; }
  const sim::SimMemory& memory() const { return memory_; }
  rt::Context& context() { return ctx_; }
  Interpreter& interpreter() { return interp_; }
  trace::TraceEngine* engine() { return engine_.get(); }

 private:
  void tick();

  const mir::Program& program_;
  SimConfig config_;
  sim::SimMemory memory_;
  MachineState state_;
  rt::Context ctx_;
  Interpreter interp_;
  std::unique_ptr<trace::TraceEngine> engine_;
  const mir::Function* loop_ = nullptr;
  const mir::Function* tick_ = nullptr;
  uint64_t ticks_ = 0;
};

}  // namespace isskit::interp
