#include "isskit/interp/interpreter.hpp"

#include <fmt/format.h>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/eval.hpp"
#include "isskit/rt/ops.hpp"

namespace isskit::interp {

using mir::Opcode;
using mir::Terminator;

Interpreter::Interpreter(const mir::Program& p, MachineState& state, sim::SimMemory& memory,
                         rt::Context& ctx)
    : program_(p), state_(state), memory_(memory), ctx_(ctx) {
  stack_.resize(1024);
  shadow_.resize(1024, kNoRef);
}

rt::Value Interpreter::call(const std::string& name, std::span<const rt::Value> args) {
  const mir::Function* f = program_.find_function(name);
  if (!f) throw std::invalid_argument("no function " + name);
  return call(*f, args);
}

rt::Value Interpreter::call(const mir::Function& f, std::span<const rt::Value> args) {
  if (args.size() != f.params.size())
    throw std::invalid_argument(fmt::format("{} takes {} arguments", f.name, f.params.size()));
  size_t base = top_;
  top_ += f.values.size();
  if (stack_.size() < top_) {
    stack_.resize(top_ * 2);
    shadow_.resize(top_ * 2, kNoRef);
  }
  for (size_t i = 0; i < args.size(); ++i) stack_[base + f.params[i]] = args[i];
  halting_ = false;
  struct Restore {
    Interpreter* self;
    size_t base;
    ~Restore() {
      self->top_ = base;
      self->depth_ = 0;
    }
  } restore{this, base};
  if (recorder_) {
    for (size_t i = 0; i < args.size(); ++i) shadow_[base + f.params[i]] = recorder_->constant(args[i]);
    Ref r;
    return run<true>(f, base, &r);
  }
  return run<false>(f, base, nullptr);
}

namespace {

unsigned access_bytes(int64_t n) {
  if (n != 1 && n != 2 && n != 4 && n != 8) rt::trap(fmt::format("invalid memory access size {}", n));
  return static_cast<unsigned>(n);
}

}  // namespace

rt::Value memory_read(const mir::OpKind& op, const rt::Value* const* a, sim::SimMemory& memory,
                      rt::Context& ctx) {
  if (op.code == Opcode::mem_read_bv_c) {
    unsigned n = static_cast<unsigned>(op.ints[0]);
    return rt::Bits::make(8 * n, memory.read(a[0]->as<rt::Bits>().bits, n));
  }
  unsigned n = access_bytes(a[1]->as<rt::I64>().v);
  uint64_t v = memory.read(a[0]->as<rt::Bits>().bits, n);
  return rt::make_generic_bits(ctx, 8 * n, rt::BigInt(v));
}

MemoryWrite memory_write_target(const mir::OpKind& op, const rt::Value* const* a) {
  if (op.code == Opcode::mem_write_bv_c)
    return {a[0]->as<rt::Bits>().bits, static_cast<unsigned>(op.ints[0]), a[1]->as<rt::Bits>().bits};
  unsigned n = access_bytes(a[1]->as<rt::I64>().v);
  const auto& v = a[2]->as<rt::GenericBits>();
  if (v.width != 8 * n) rt::trap(fmt::format("mem_write of {} bits with size {}", v.width, n));
  return {a[0]->as<rt::Bits>().bits, n, static_cast<uint64_t>(v.bits)};
}

void memory_write(const mir::OpKind& op, const rt::Value* const* a, sim::SimMemory& memory) {
  MemoryWrite w = memory_write_target(op, a);
  memory.write(w.addr, w.nbytes, w.value);
}

template <bool kRecord>
rt::Value Interpreter::execute_state(const mir::Statement& s, const rt::Value* const* a,
                                     sim::FetchResult* fetched) {
  switch (s.op.code) {
    case Opcode::read_reg: return state_.regs[s.op.sym];
    case Opcode::write_reg: state_.regs[s.op.sym] = *a[0]; return rt::Unit{};
    case Opcode::mem_read:
    case Opcode::mem_read_bv_c: return memory_read(s.op, a, memory_, ctx_);
    case Opcode::mem_write:
    case Opcode::mem_write_bv_c: memory_write(s.op, a, memory_); return rt::Unit{};
    case Opcode::fetch: {
      *fetched = memory_.fetch(a[0]->as<rt::Bits>().bits, 4);
      return rt::Bits::make(32, fetched->value);
    }
    case Opcode::halt_check: return rt::Unit{};
    default: break;
  }
  throw std::logic_error("not a state operation: " + mir::to_string(s.op));
}

template <bool kRecord>
rt::Value Interpreter::run(const mir::Function& f, size_t base, Ref* ret_ref) {
  const mir::Block* b = &f.blocks[0];
  constexpr size_t kInline = 12;
  const rt::Value* argv_inline[kInline];
  Ref refs_inline[kInline];
  std::vector<const rt::Value*> argv_heap;
  std::vector<Ref> refs_heap;
  int index = -1;
  try {
    for (;;) {
      const auto& stmts = b->stmts;
      for (index = 0; index < static_cast<int>(stmts.size()); ++index) {
        const mir::Statement& s = stmts[index];
        ++micro_ops_;
        size_t n = s.args.size();
        const rt::Value** argv = argv_inline;
        Ref* refs = refs_inline;
        if (n > kInline) {
          argv_heap.resize(n);
          argv = argv_heap.data();
          if constexpr (kRecord) {
            refs_heap.resize(n);
            refs = refs_heap.data();
          }
        }
        if (s.op.code == Opcode::call) {
          const mir::Function& callee = program_.functions[s.op.sym];
          if (++depth_ > max_depth) rt::trap("call depth limit exceeded");
          size_t nb = top_;
          top_ += callee.values.size();
          if (stack_.size() < top_) {
            stack_.resize(top_ * 2);
            shadow_.resize(top_ * 2, kNoRef);
          }
          for (size_t k = 0; k < n; ++k) {
            const mir::Operand& o = s.args[k];
            ValueSlot slot = nb + callee.params[k];
            if (o.is_value()) {
              stack_[slot] = stack_[base + o.id];
              if constexpr (kRecord) shadow_[slot] = shadow_[base + o.id];
            } else {
              stack_[slot] = o.literal;
              if constexpr (kRecord) shadow_[slot] = recorder_->constant(o.literal);
            }
          }
          Ref rr = kNoRef;
          rt::Value r = run<kRecord>(callee, nb, &rr);
          top_ = nb;
          --depth_;
          if (halting_) return rt::Unit{};
          if (s.result != mir::kNoValue) {
            stack_[base + s.result] = std::move(r);
            if constexpr (kRecord) shadow_[base + s.result] = rr;
          }
          continue;
        }
        for (size_t k = 0; k < n; ++k) {
          const mir::Operand& o = s.args[k];
          if (o.is_value()) {
            argv[k] = &stack_[base + o.id];
            if constexpr (kRecord) refs[k] = shadow_[base + o.id];
          } else {
            argv[k] = &o.literal;
            if constexpr (kRecord) refs[k] = recorder_->constant(o.literal);
          }
        }
        sim::FetchResult fetched;
        rt::Value r;
        if (mir::effect_of(s.op.code) == mir::Effect::state)
          r = execute_state<kRecord>(s, argv, &fetched);
        else
          r = mir::eval_pure(s.op, argv, n, ctx_);
        if constexpr (kRecord) {
          Ref rr = recorder_->statement(s, refs, argv, r,
                                        s.op.code == Opcode::fetch ? &fetched : nullptr);
          if (s.result != mir::kNoValue) shadow_[base + s.result] = rr;
        }
        if (s.result != mir::kNoValue) stack_[base + s.result] = std::move(r);
      }
      index = -1;
      const Terminator& t = b->term;
      switch (t.kind) {
        case Terminator::Kind::Goto: {
          const mir::Block& dst = f.blocks[t.target];
          size_t n = t.args.size();
          if (n == 1) {
            const mir::Operand& o = t.args[0];
            ValueSlot slot = base + dst.params[0];
            if (o.is_value()) {
              if (o.id != dst.params[0]) {
                stack_[slot] = stack_[base + o.id];
                if constexpr (kRecord) shadow_[slot] = shadow_[base + o.id];
              }
            } else {
              stack_[slot] = o.literal;
              if constexpr (kRecord) shadow_[slot] = recorder_->constant(o.literal);
            }
          } else if (n > 1) {
            std::vector<rt::Value> tmp(n);
            std::vector<Ref> tref(kRecord ? n : 0);
            for (size_t k = 0; k < n; ++k) {
              const mir::Operand& o = t.args[k];
              tmp[k] = o.is_value() ? stack_[base + o.id] : o.literal;
              if constexpr (kRecord)
                tref[k] = o.is_value() ? shadow_[base + o.id] : recorder_->constant(o.literal);
            }
            for (size_t k = 0; k < n; ++k) {
              stack_[base + dst.params[k]] = std::move(tmp[k]);
              if constexpr (kRecord) shadow_[base + dst.params[k]] = tref[k];
            }
          }
          b = &dst;
          break;
        }
        case Terminator::Kind::Branch: {
          const mir::Operand& o = t.value;
          bool c = o.is_value() ? stack_[base + o.id].as<bool>() : o.literal.as<bool>();
          if constexpr (kRecord)
            recorder_->branch(o.is_value() ? shadow_[base + o.id] : recorder_->constant(o.literal), c);
          b = &f.blocks[c ? t.target : t.other];
          break;
        }
        case Terminator::Kind::Return: {
          const mir::Operand& o = t.value;
          if constexpr (kRecord)
            *ret_ref = o.is_value() ? shadow_[base + o.id] : recorder_->constant(o.literal);
          return o.is_value() ? std::move(stack_[base + o.id]) : o.literal;
        }
        case Terminator::Kind::Halt:
          state_.halted = true;
          halting_ = true;
          return rt::Unit{};
        case Terminator::Kind::Raise:
          throw Trap(t.message, f.name, b->label, -1);
        case Terminator::Kind::None:
          throw std::logic_error("block without terminator in " + f.name);
      }
    }
  } catch (const Trap&) {
    throw;
  } catch (const rt::ModelTrap& e) {
    throw Trap(e.what(), f.name, b->label, index);
  }
}

template rt::Value Interpreter::run<true>(const mir::Function&, size_t, Ref*);
template rt::Value Interpreter::run<false>(const mir::Function&, size_t, Ref*);

rt::Value interpret_function(const mir::Function& f, const mir::Program& p,
                             std::span<const rt::Value> args, MachineState& state,
                             sim::SimMemory& memory, uint64_t* micro_ops) {
  rt::Context ctx;
  Interpreter in(p, state, memory, ctx);
  rt::Value r = in.call(f, args);
  if (micro_ops) *micro_ops = in.micro_ops();
  return r;
}

}  // namespace isskit::interp
