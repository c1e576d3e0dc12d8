#include "isskit/trace/engine.hpp"

#include <algorithm>
#include <set>

#include "isskit/mir/eval.hpp"

namespace isskit::trace {

using mir::Opcode;

bool HotCounter::observe_jump(uint64_t from_pc, uint64_t to_pc) {
  if (to_pc > from_pc) return false;
  return ++counts_[to_pc] == threshold_;
}

uint64_t HotCounter::count(uint64_t pc) const {
  auto it = counts_.find(pc);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<uint32_t> registers_written(const mir::Program& p, const std::string& fn) {
  std::set<uint32_t> regs;
  std::set<const mir::Function*> seen;
  std::vector<const mir::Function*> work;
  if (auto f = p.find_function(fn)) work.push_back(f);
  while (!work.empty()) {
    const mir::Function* f = work.back();
    work.pop_back();
    if (!seen.insert(f).second) continue;
    for (auto& b : f->blocks)
      for (auto& s : b.stmts) {
        if (s.op.code == Opcode::write_reg) regs.insert(s.op.sym);
        if (s.op.code == Opcode::call && s.op.sym < p.functions.size())
          work.push_back(&p.functions[s.op.sym]);
      }
  }
  return {regs.begin(), regs.end()};
}

TraceEngine::TraceEngine(const mir::Program& p, TraceConfig config, sim::SimMemory& memory)
    : program_(p), config_(config), memory_(memory), hot_(config.hot_threshold) {
  opt_options_.use_knownbits = config.use_knownbits;
  opt_options_.fold_fetches = memory.tracking();
  if (!p.tick_fn.empty()) opt_options_.tick_clobbers = registers_written(p, p.tick_fn);
  memory_.set_invalidation_handler(
      [this](uint64_t word, const std::vector<uint64_t>&) { invalidate_on_write(word); });
}

TraceEngine::~TraceEngine() { memory_.set_invalidation_handler(nullptr); }

Trace* TraceEngine::lookup(uint64_t pc) {
  auto it = by_anchor_.find(pc);
  if (it == by_anchor_.end() || !it->second->valid) return nullptr;
  return it->second;
}

bool TraceEngine::blacklisted(uint64_t pc) const {
  auto it = aborts_.find(pc);
  return it != aborts_.end() && it->second >= config_.max_aborts;
}

TraceRecorder* TraceEngine::begin_recording(uint64_t anchor_pc) {
  recording_ = std::make_unique<Trace>();
  recording_->id = traces_.size() + 1;
  recording_->anchor_pc = anchor_pc;
  recorder_ = std::make_unique<TraceRecorder>(*recording_, config_, memory_.tracking());
  return recorder_.get();
}

void TraceEngine::abort_recording(const std::string& reason) {
  (void)reason;
  if (!recording_) return;
  uint64_t anchor = recording_->anchor_pc;
  ++aborts_[anchor];
  ++stats_.aborted;
  hot_.reset(anchor);
  recorder_.reset();
  recording_.reset();
}

Trace* TraceEngine::finish_recording() {
  if (!recording_) return nullptr;
  if (recorder_->aborted()) {
    abort_recording(recorder_->abort_reason());
    return nullptr;
  }
  if (memory_.tracking())
    for (uint64_t w : recorder_->dependencies())
      if (memory_.status_of(w) != sim::WordStatus::status_immutable) {
        abort_recording("code changed while recording");
        return nullptr;
      }
  optimize(*recording_, memory_, program_, opt_options_);
  Trace* t = recording_.get();
  for (uint64_t w : t->dependencies) {
    memory_.register_invalidation(w, t->id);
    by_word_.emplace(w, t);
  }
  by_anchor_[t->anchor_pc] = t;
  hot_.reset(t->anchor_pc);
  traces_.push_back(std::move(recording_));
  recorder_.reset();
  ++stats_.compiled;
  return t;
}

size_t TraceEngine::invalidate_on_write(uint64_t word_addr) {
  size_t n = 0;
  auto [lo, hi] = by_word_.equal_range(word_addr);
  for (auto it = lo; it != hi; ++it) {
    Trace* t = it->second;
    if (!t->valid) continue;
    t->valid = false;
    hot_.reset(t->anchor_pc);
    ++stats_.invalidated;
    ++n;
  }
  by_word_.erase(word_addr);
  return n;
}

namespace {

struct Undo {
  enum class Kind : uint8_t { reg, mem, console } kind = Kind::reg;
  uint32_t reg = 0;
  rt::Value old;
  uint64_t addr = 0;
  unsigned nbytes = 0;
  uint64_t bytes = 0;
};

}  // namespace

ExecOutcome TraceEngine::execute(Trace& t, interp::Interpreter& in, const ExecLimits& limits) {
  ExecOutcome out;
  const auto& ops = t.optimized;
  interp::MachineState& st = in.state();
  rt::Context& ctx = in.context();
  slots_.resize(ops.size());
  std::vector<Undo> undo;
  std::vector<const rt::Value*> argv;
  auto arg = [&](Ref r) -> const rt::Value& {
    return r < 0 ? t.constants[const_index(r)] : slots_[r];
  };
  auto rollback = [&] {
    for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
      switch (it->kind) {
        case Undo::Kind::reg: st.regs[it->reg] = std::move(it->old); break;
        case Undo::Kind::mem: memory_.poke(it->addr, it->nbytes, it->bytes); break;
        case Undo::Kind::console: memory_.truncate_console(it->addr); break;
      }
    }
    undo.clear();
  };
  const auto& console = memory_.config().console_port;

  for (;;) {
    for (size_t i = 0; i < ops.size(); ++i) {
      const TraceOp& op = ops[i];
      ++stats_.micro_ops;
      try {
        switch (op.kind) {
          case TraceOpKind::op: {
            argv.clear();
            for (Ref a : op.args) argv.push_back(&arg(a));
            slots_[i] = mir::eval_pure(op.op, argv.data(), argv.size(), ctx);
            break;
          }
          case TraceOpKind::read_state: slots_[i] = st.regs[op.reg]; break;
          case TraceOpKind::write_state:
            undo.push_back({Undo::Kind::reg, op.reg, st.regs[op.reg]});
            st.regs[op.reg] = arg(op.args[0]);
            break;
          case TraceOpKind::mem_read:
            argv.clear();
            for (Ref a : op.args) argv.push_back(&arg(a));
            slots_[i] = interp::memory_read(op.op, argv.data(), memory_, ctx);
            break;
          case TraceOpKind::mem_write: {
            argv.clear();
            for (Ref a : op.args) argv.push_back(&arg(a));
            interp::MemoryWrite w = interp::memory_write_target(op.op, argv.data());
            if (console && w.addr == *console) {
              Undo u;
              u.kind = Undo::Kind::console;
              u.addr = memory_.console().size();
              undo.push_back(std::move(u));
            } else {
              Undo u;
              u.kind = Undo::Kind::mem;
              u.addr = w.addr;
              u.nbytes = w.nbytes;
              u.bytes = memory_.read(w.addr, w.nbytes);
              undo.push_back(std::move(u));
            }
            memory_.write(w.addr, w.nbytes, w.value);
            break;
          }
          case TraceOpKind::fetch:
            slots_[i] = rt::Bits::make(32, memory_.fetch(arg(op.args[0]).as<rt::Bits>().bits, 4).value);
            break;
          case TraceOpKind::guard_true:
          case TraceOpKind::guard_false:
            if (arg(op.args[0]).as<bool>() != (op.kind == TraceOpKind::guard_true)) {
              rollback();
              ++stats_.guard_exits;
              out.kind = ExecOutcome::Kind::guard_exit;
              return out;
            }
            break;
          case TraceOpKind::guard_value_eq:
          case TraceOpKind::guard_pc_eq:
            if (!(arg(op.args[0]) == op.value)) {
              rollback();
              ++stats_.guard_exits;
              out.kind = ExecOutcome::Kind::guard_exit;
              return out;
            }
            break;
          case TraceOpKind::insn_end:
            undo.clear();
            ++st.icount;
            if (limits.tick && limits.tick_interval && st.icount % limits.tick_interval == 0) {
              in.call(*limits.tick, {});
              ++stats_.ticks;
            }
            if (st.icount >= limits.budget) {
              out.kind = ExecOutcome::Kind::budget;
              return out;
            }
            if (!t.valid) {
              out.kind = ExecOutcome::Kind::invalidated;
              return out;
            }
            break;
        }
      } catch (const rt::ModelTrap&) {
        // The interpreter re-executes the instruction and reports the trap.
        rollback();
        out.kind = ExecOutcome::Kind::trap_exit;
        return out;
      }
    }
    ++out.iterations;
  }
}

}  // namespace isskit::trace
