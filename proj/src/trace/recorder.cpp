#include "isskit/trace/recorder.hpp"

#include "isskit/mir/catalog.hpp"

namespace isskit::trace {

using mir::Opcode;

TraceRecorder::TraceRecorder(Trace& trace, const TraceConfig& config, bool memory_tracking)
    : trace_(trace), config_(config), tracking_(memory_tracking), pool_(trace.constants) {}

Ref TraceRecorder::constant(const rt::Value& v) { return pool_.intern(v); }

void TraceRecorder::abort(std::string reason) {
  if (abort_reason_.empty()) abort_reason_ = std::move(reason);
}

Ref TraceRecorder::push(TraceOp op) {
  if (aborted()) return kNoRef;
  if (trace_.raw.size() >= config_.max_length) {
    abort("trace too long");
    return kNoRef;
  }
  trace_.raw.push_back(std::move(op));
  return static_cast<Ref>(trace_.raw.size() - 1);
}

Ref TraceRecorder::statement(const mir::Statement& s, const Ref* args, const rt::Value* const* argv,
                             const rt::Value& result, const sim::FetchResult* fetched) {
  if (aborted()) return kNoRef;
  TraceOp op;
  op.args.assign(args, args + s.args.size());
  op.has_result = s.result != mir::kNoValue;
  switch (s.op.code) {
    case Opcode::read_reg:
      op.kind = TraceOpKind::read_state;
      op.reg = s.op.sym;
      break;
    case Opcode::write_reg:
      op.kind = TraceOpKind::write_state;
      op.reg = s.op.sym;
      break;
    case Opcode::mem_read:
    case Opcode::mem_read_bv_c:
      op.kind = TraceOpKind::mem_read;
      op.op = s.op;
      break;
    case Opcode::mem_write:
    case Opcode::mem_write_bv_c:
      op.kind = TraceOpKind::mem_write;
      op.op = s.op;
      break;
    case Opcode::halt_check:
      return kNoRef;
    case Opcode::fetch: {
      uint64_t addr = argv[0]->as<rt::Bits>().bits;
      if (tracking_ && !fetched->was_immutable) {
        abort("fetch from a word that is not immutable");
        return kNoRef;
      }
      Ref a = args[0];
      if (!is_const_ref(a)) {
        TraceOp g;
        g.kind = TraceOpKind::guard_pc_eq;
        g.args = {a};
        g.value = *argv[0];
        push(std::move(g));
        a = constant(*argv[0]);
      }
      deps_.insert(sim::word_of(addr));
      deps_.insert(sim::word_of(addr + 3));
      op.kind = TraceOpKind::fetch;
      op.op = s.op;
      op.args = {a};
      op.value = *argv[0];
      break;
    }
    default:
      op.kind = TraceOpKind::op;
      op.op = s.op;
      break;
  }
  if (auto b = result.get_if<rt::Bits>()) {
    op.width = b->width;
  } else if (result.is<bool>()) {
    op.width = 1;
    op.is_bool = true;
  }
  Ref r = push(std::move(op));
  return r;
}

void TraceRecorder::branch(Ref cond, bool taken) {
  if (aborted() || is_const_ref(cond)) return;
  TraceOp g;
  g.kind = taken ? TraceOpKind::guard_true : TraceOpKind::guard_false;
  g.args = {cond};
  push(std::move(g));
}

void TraceRecorder::insn_end() {
  TraceOp op;
  op.kind = TraceOpKind::insn_end;
  push(std::move(op));
}

}  // namespace isskit::trace
