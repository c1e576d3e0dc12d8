#include "isskit/interp/simulator.hpp"

#include <stdexcept>

namespace isskit::interp {

Simulator::Simulator(const mir::Program& p, SimConfig config)
    : program_(p),
      config_(std::move(config)),
      memory_(config_.memory),
      state_(MachineState::for_program(p)),
      interp_(p, state_, memory_, ctx_) {
  ctx_.switchable_ints = config_.switchable_ints;
  state_.tick_interval = config_.tick_interval;
  loop_ = p.find_function(p.loop_fn);
  if (!loop_) throw std::invalid_argument("program has no loop function '" + p.loop_fn + "'");
  if (!p.tick_fn.empty()) tick_ = p.find_function(p.tick_fn);
  if (config_.tracing) engine_ = std::make_unique<trace::TraceEngine>(p, config_.trace, memory_);
}

void Simulator::tick() {
  Recorder* r = interp_.recorder();
  interp_.set_recorder(nullptr);
  interp_.call(*tick_, {});
  interp_.set_recorder(r);
  ++ticks_;
}

RunStats Simulator::run() {
  trace::ExecLimits limits{config_.budget, config_.tick_interval, tick_};
  bool resume_in_interpreter = false;
  while (!state_.halted && state_.icount < config_.budget) {
    uint64_t pc = state_.pc();
    trace::TraceRecorder* rec = engine_ ? engine_->recording() : nullptr;
    if (engine_ && !rec && !resume_in_interpreter) {
      if (trace::Trace* t = engine_->lookup(pc)) {
        auto out = engine_->execute(*t, interp_, limits);
        resume_in_interpreter = out.kind == trace::ExecOutcome::Kind::guard_exit ||
                                out.kind == trace::ExecOutcome::Kind::trap_exit;
        continue;
      }
    }
    resume_in_interpreter = false;
    try {
      interp_.call(*loop_, {});
    } catch (Trap& t) {
      if (rec) {
        interp_.set_recorder(nullptr);
        engine_->abort_recording("trap");
      }
      t.set_pc(pc);
      throw;
    }
    ++state_.icount;
    if (tick_ && config_.tick_interval && state_.icount % config_.tick_interval == 0) tick();
    if (state_.halted) {
      if (rec) {
        interp_.set_recorder(nullptr);
        engine_->abort_recording("halt");
      }
      break;
    }
    uint64_t next = state_.pc();
    if (rec) {
      rec->insn_end();
      if (next == engine_->recording_anchor() || rec->aborted()) {
        interp_.set_recorder(nullptr);
        engine_->finish_recording();
      }
    } else if (engine_ && next <= pc && engine_->hot().observe_jump(pc, next) &&
               !engine_->blacklisted(next) && !engine_->lookup(next)) {
      interp_.set_recorder(engine_->begin_recording(next));
    }
  }
  return stats();
}

RunStats Simulator::stats() const {
  RunStats s;
  s.guest_instructions = state_.icount;
  s.executed_micro_ops = interp_.micro_ops();
  s.generic_allocations = ctx_.allocations;
  s.ticks = ticks_;
  if (engine_) {
    const auto& e = engine_->stats();
    s.executed_micro_ops += e.micro_ops;
    s.traces_compiled = e.compiled;
    s.traces_invalidated = e.invalidated;
    s.trace_guard_exits = e.guard_exits;
    s.traces_aborted = e.aborted;
    s.ticks += e.ticks;
  }
  return s;
}

}  // namespace isskit::interp
