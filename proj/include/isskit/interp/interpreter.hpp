// Direct interpretation of model functions.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isskit/interp/machine.hpp"
#include "isskit/mir/ir.hpp"
#include "isskit/sim/memory.hpp"

namespace isskit::interp {

// Names a recorded value: >= 0 is an op index, < 0 a constant-pool slot.
using Ref = int32_t;
inline constexpr Ref kNoRef = INT32_MIN;

// Observes every statement the interpreter executes while attached. The
// interpreter threads the returned refs through locals, calls and returns.
class Recorder {
 public:
  virtual ~Recorder() = default;
  virtual Ref constant(const rt::Value& v) = 0;
  // `args` and `argv` are parallel; `fetched` is set for fetch statements.
  virtual Ref statement(const mir::Statement& s, const Ref* args, const rt::Value* const* argv,
                        const rt::Value& result, const sim::FetchResult* fetched) = 0;
  virtual void branch(Ref cond, bool taken) = 0;
};

class Interpreter {
 public:
  Interpreter(const mir::Program& p, MachineState& state, sim::SimMemory& memory, rt::Context& ctx);

  rt::Value call(const mir::Function& f, std::span<const rt::Value> args);
  rt::Value call(const std::string& name, std::span<const rt::Value> args);

  // Attach or detach (nullptr) a recorder.
  void set_recorder(Recorder* r) { recorder_ = r; }
  Recorder* recorder() const { return recorder_; }

  uint64_t micro_ops() const { return micro_ops_; }
  void add_micro_ops(uint64_t n) { micro_ops_ += n; }
  unsigned max_depth = 256;

  const mir::Program& program() const { return program_; }
  MachineState& state() { return state_; }
  sim::SimMemory& memory() { return memory_; }
  rt::Context& context() { return ctx_; }

 private:
  template <bool kRecord>
  rt::Value run(const mir::Function& f, size_t base, Ref* ret_ref);
  template <bool kRecord>
  rt::Value execute_state(const mir::Statement& s, const rt::Value* const* argv,
                          sim::FetchResult* fetched);

  const mir::Program& program_;
  MachineState& state_;
  sim::SimMemory& memory_;
  rt::Context& ctx_;
  Recorder* recorder_ = nullptr;
  uint64_t micro_ops_ = 0;
  using ValueSlot = size_t;
  unsigned depth_ = 0;
  bool halting_ = false;
  std::vector<rt::Value> stack_;
  std::vector<Ref> shadow_;
  size_t top_ = 0;
};

// Memory statements shared with trace execution. Size and width errors trap.
rt::Value memory_read(const mir::OpKind& op, const rt::Value* const* argv, sim::SimMemory& memory,
                      rt::Context& ctx);
struct MemoryWrite {
  uint64_t addr;
  unsigned nbytes;
  uint64_t value;
};
MemoryWrite memory_write_target(const mir::OpKind& op, const rt::Value* const* argv);
void memory_write(const mir::OpKind& op, const rt::Value* const* argv, sim::SimMemory& memory);

// One-shot helper: interpret `f` on `args` against the given state and
// memory with a private context.
rt::Value interpret_function(const mir::Function& f, const mir::Program& p,
                             std::span<const rt::Value> args, MachineState& state,
                             sim::SimMemory& memory, uint64_t* micro_ops = nullptr);

}  // namespace isskit::interp
