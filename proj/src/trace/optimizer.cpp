#include "isskit/trace/optimizer.hpp"

#include <set>
#include <tuple>
#include <unordered_map>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/eval.hpp"
#include "isskit/rt/ops.hpp"

namespace isskit::trace {

using kb::Tnum;
using mir::Opcode;

namespace {

class Optimizer {
 public:
  Optimizer(Trace& t, const sim::SimMemory& mem, const OptimizeOptions& o)
      : t_(t), mem_(mem), o_(o), pool_(t.constants), remap_(t.raw.size(), kNoRef) {}

  void run() {
    for (size_t i = 0; i < t_.raw.size(); ++i) visit(i);
    dce();
    t_.optimized = std::move(out_);
  }

 private:
  const rt::Value& cval(Ref r) const { return t_.constants[const_index(r)]; }

  // Raw ref to optimized ref.
  Ref map(Ref r) const {
    if (r == kNoRef || r < 0) return r;
    return resolve(remap_[r]);
  }
  // Optimized ref to the constant it is known to equal, if any.
  Ref resolve(Ref m) const {
    while (m >= 0 && subst_[m] != kNoRef) m = subst_[m];
    return m;
  }

  Ref emit(TraceOp op) {
    out_.push_back(std::move(op));
    subst_.push_back(kNoRef);
    return static_cast<Ref>(out_.size() - 1);
  }

  // Known bits of a ref, in the low `width` bits.
  std::optional<Tnum> tnum_of(Ref r) const {
    if (r == kNoRef) return std::nullopt;
    if (r < 0) {
      const rt::Value& v = cval(r);
      if (auto b = v.get_if<rt::Bits>()) return Tnum::constant(b->bits);
      if (auto b = v.get_if<bool>()) return Tnum::constant(*b ? 1 : 0);
      return std::nullopt;
    }
    return out_[r].tnum;
  }

  std::optional<uint64_t> const_bits(Ref r) const {
    if (r < 0 && r != kNoRef) {
      if (auto b = cval(r).get_if<rt::Bits>()) return b->bits;
      if (auto i = cval(r).get_if<rt::I64>()) return static_cast<uint64_t>(i->v);
    }
    return std::nullopt;
  }

  Ref const_for(const TraceOp& op, uint64_t v) {
    if (op.is_bool) return pool_.intern(rt::Value(v != 0));
    return pool_.intern(rt::Value(rt::Bits::make(op.width, v)));
  }

  std::optional<Tnum> transfer(const TraceOp& op) const {
    if (op.width == 0 || op.width > 64) return std::nullopt;
    unsigned w = op.width;
    auto a = [&](size_t i) { return op.args.size() > i ? tnum_of(op.args[i]) : std::nullopt; };
    Tnum top = Tnum::top(w);
    auto bool_of = [&](kb::Tri t) -> Tnum {
      if (t == kb::Tri::yes) return Tnum::constant(1);
      if (t == kb::Tri::no) return Tnum::constant(0);
      return Tnum::top(1);
    };
    auto both = [&](auto fn) -> Tnum {
      auto x = a(0), y = a(1);
      if (!x || !y) return top;
      return kb::truncate(fn(*x, *y), w);
    };
    switch (op.op.code) {
      case Opcode::add_bits_bv_c: return both(kb::transfer_add);
      case Opcode::sub_bits_bv_c: return both(kb::transfer_sub);
      case Opcode::and_bits_bv_c: return both(kb::transfer_and);
      case Opcode::or_bits_bv_c: return both(kb::transfer_or);
      case Opcode::xor_bits_bv_c: return both(kb::transfer_xor);
      case Opcode::not_bits_bv_c:
        if (auto x = a(0)) return kb::truncate(kb::transfer_not(*x), w);
        return top;
      case Opcode::shiftl_bv_c:
      case Opcode::shiftr_bv_c:
      case Opcode::arith_shiftr_bv_c: {
        auto x = a(0);
        auto n = const_bits(op.args[1]);
        if (!x || !n) return top;
        unsigned amount = static_cast<unsigned>(std::min<uint64_t>(*n, 64));
        unsigned in_w = w;
        if (op.op.code == Opcode::shiftl_bv_c) return kb::truncate(kb::transfer_shl_const(*x, amount), w);
        if (op.op.code == Opcode::shiftr_bv_c) return kb::truncate(kb::transfer_lshr_const(*x, amount), w);
        return kb::truncate(kb::transfer_ashr_const(kb::sign_extend(*x, in_w), amount), w);
      }
      case Opcode::sign_extend_bv_c:
        if (auto x = a(0))
          return kb::truncate(kb::sign_extend(*x, static_cast<unsigned>(op.op.ints[0])), w);
        return top;
      case Opcode::zero_extend_bv_c:
        if (auto x = a(0)) return *x;
        return top;
      case Opcode::vector_subrange_bv_c:
        if (auto x = a(0))
          return kb::truncate(kb::transfer_lshr_const(*x, static_cast<unsigned>(op.op.ints[2])), w);
        return top;
      case Opcode::bitvector_concat_bv_c: {
        auto x = a(0), y = a(1);
        if (!x || !y) return top;
        unsigned low = w - out_width(op.args[0]);
        return kb::truncate(kb::transfer_or(kb::transfer_shl_const(*x, low), *y), w);
      }
      case Opcode::eq_bits_bv_c: {
        auto x = a(0), y = a(1);
        if (!x || !y) return Tnum::top(1);
        return bool_of(kb::known_equal(*x, *y));
      }
      case Opcode::not_bool:
        if (auto x = a(0); x && x->is_const()) return Tnum::constant(x->value ^ 1);
        return top;
      default: return top;
    }
  }

  unsigned out_width(Ref r) const {
    if (r < 0) {
      if (auto b = cval(r).get_if<rt::Bits>()) return b->width;
      return 0;
    }
    return out_[r].width;
  }

  // Record that `r` is known to lie in `fact`, and push the fact backward
  // through masks and constant offsets.
  void refine(Ref r, Tnum fact, int depth = 0) {
    if (r < 0 || depth > 8) return;
    TraceOp& d = out_[r];
    if (d.width == 0 || d.width > 64) return;
    Tnum cur = d.tnum.value_or(Tnum::top(d.width));
    Tnum next = kb::meet(cur, kb::truncate(fact, d.width));
    if (next == cur) return;
    d.tnum = next;
    if (next.is_const() && subst_[r] == kNoRef && mir::is_removable(d.op))
      subst_[r] = const_for(d, next.value);
    if (d.kind != TraceOpKind::op || d.args.size() != 2) return;
    auto mask = [&](Tnum v, uint64_t m) {
      // Bits selected by m that v knows.
      uint64_t known = m & ~v.mask;
      return Tnum{v.value & known, ~known};
    };
    switch (d.op.code) {
      case Opcode::and_bits_bv_c:
        for (int i = 0; i < 2; ++i)
          if (auto m = const_bits(d.args[1 - i])) refine(d.args[i], mask(next, *m), depth + 1);
        break;
      case Opcode::add_bits_bv_c:
        for (int i = 0; i < 2; ++i)
          if (auto c = const_bits(d.args[1 - i]))
            refine(d.args[i], kb::truncate(kb::transfer_sub(next, Tnum::constant(*c)), d.width),
                   depth + 1);
        break;
      case Opcode::sub_bits_bv_c:
        if (auto c = const_bits(d.args[1]))
          refine(d.args[0], kb::truncate(kb::transfer_add(next, Tnum::constant(*c)), d.width),
                 depth + 1);
        break;
      default: break;
    }
  }

  void learn_condition(Ref c, bool holds) {
    if (c < 0) return;
    TraceOp& d = out_[c];
    if (d.is_bool) {
      d.tnum = Tnum::constant(holds ? 1 : 0);
      subst_[c] = pool_.intern(rt::Value(holds));
    }
    if (!o_.use_knownbits || d.kind != TraceOpKind::op) return;
    if (d.op.code == Opcode::eq_bits_bv_c && holds) {
      auto x = tnum_of(d.args[0]), y = tnum_of(d.args[1]);
      if (y) refine(d.args[0], *y);
      if (x) refine(d.args[1], *x);
    } else if (d.op.code == Opcode::not_bool) {
      learn_condition(d.args[0], !holds);
    }
  }

  // Folds or simplifies an op whose args are already mapped. Returns the
  // replacement ref, or kNoRef to emit it.
  Ref simplify(const TraceOp& op) {
    mir::Effect e = mir::effect_of(op.op.code);
    if (e != mir::Effect::pure && e != mir::Effect::checked) return kNoRef;
    bool all_const = true;
    for (Ref a : op.args) all_const &= is_const_ref(a);
    if (all_const) {
      std::vector<const rt::Value*> argv;
      for (Ref a : op.args) argv.push_back(&cval(a));
      try {
        return pool_.intern(mir::eval_pure(op.op, argv.data(), argv.size(), scratch_));
      } catch (const rt::ModelTrap&) {
        return kNoRef;  // stays in the trace and traps at run time
      }
    }
    if (op.args.size() == 2) {
      auto c0 = const_bits(op.args[0]), c1 = const_bits(op.args[1]);
      uint64_t ones = op.width ? kb::Tnum::low_mask(op.width) : 0;
      switch (op.op.code) {
        case Opcode::add_bits_bv_c:
        case Opcode::or_bits_bv_c:
        case Opcode::xor_bits_bv_c:
          if (c1 == 0u) return op.args[0];
          if (c0 == 0u) return op.args[1];
          break;
        case Opcode::sub_bits_bv_c:
          if (c1 == 0u) return op.args[0];
          break;
        case Opcode::and_bits_bv_c:
          if (c1 == ones) return op.args[0];
          if (c0 == ones) return op.args[1];
          if (c0 == 0u || c1 == 0u) return pool_.intern(rt::Value(rt::Bits::make(op.width, 0)));
          break;
        case Opcode::add_int_i64:
        case Opcode::sub_int_i64:
          if (c1 == 0u) return op.args[0];
          if (c0 == 0u && op.op.code == Opcode::add_int_i64) return op.args[1];
          break;
        default: break;
      }
    }
    return kNoRef;
  }

  void visit(size_t i) {
    TraceOp op = t_.raw[i];
    for (Ref& a : op.args) a = map(a);
    op.tnum.reset();
    switch (op.kind) {
      case TraceOpKind::op: {
        if (Ref r = simplify(op); r != kNoRef) {
          remap_[i] = r;
          return;
        }
        if (o_.use_knownbits) {
          op.tnum = transfer(op);
          if (op.tnum && op.tnum->is_const() && mir::is_removable(op.op)) {
            remap_[i] = const_for(op, op.tnum->value);
            return;
          }
        }
        remap_[i] = emit(std::move(op));
        return;
      }
      case TraceOpKind::read_state: {
        auto it = regs_.find(op.reg);
        if (it != regs_.end()) {
          remap_[i] = resolve(it->second);
          return;
        }
        if (o_.use_knownbits && op.width && op.width <= 64) op.tnum = Tnum::top(op.width);
        Ref r = emit(std::move(op));
        regs_[out_[r].reg] = r;
        remap_[i] = r;
        return;
      }
      case TraceOpKind::write_state:
        regs_[op.reg] = op.args[0];
        remap_[i] = emit(std::move(op));
        return;
      case TraceOpKind::fetch: {
        if (o_.fold_fetches && mem_.tracking() && is_const_ref(op.args[0])) {
          uint64_t addr = cval(op.args[0]).as<rt::Bits>().bits;
          if (mem_.status_of(sim::word_of(addr)) == sim::WordStatus::status_immutable &&
              mem_.status_of(sim::word_of(addr + 3)) == sim::WordStatus::status_immutable) {
            folded_.insert(sim::word_of(addr));
            folded_.insert(sim::word_of(addr + 3));
            remap_[i] = pool_.intern(rt::Value(rt::Bits::make(32, mem_.read(addr, 4))));
            return;
          }
        }
        remap_[i] = emit(std::move(op));
        return;
      }
      case TraceOpKind::mem_read:
        if (o_.use_knownbits && op.width && op.width <= 64) op.tnum = Tnum::top(op.width);
        remap_[i] = emit(std::move(op));
        return;
      case TraceOpKind::mem_write:
        remap_[i] = emit(std::move(op));
        return;
      case TraceOpKind::insn_end:
        for (uint32_t r : o_.tick_clobbers) regs_.erase(r);
        remap_[i] = emit(std::move(op));
        return;
      case TraceOpKind::guard_true:
      case TraceOpKind::guard_false: {
        bool expect = op.kind == TraceOpKind::guard_true;
        Ref c = op.args[0];
        if (is_const_ref(c)) {
          if (cval(c).as<bool>() == expect) return;
        } else if (o_.use_knownbits) {
          if (auto tn = tnum_of(c); tn && tn->is_const() && (tn->value != 0) == expect) return;
        }
        if (!seen_.insert({op.kind, c, 0}).second) return;
        emit(std::move(op));
        learn_condition(c, expect);
        return;
      }
      case TraceOpKind::guard_value_eq:
      case TraceOpKind::guard_pc_eq: {
        Ref x = op.args[0];
        if (is_const_ref(x)) {
          if (cval(x) == op.value) return;
        } else if (o_.use_knownbits) {
          auto tn = tnum_of(x);
          auto b = op.value.get_if<rt::Bits>();
          if (tn && b && tn->is_const() && tn->value == b->bits) return;
        }
        Ref expected = pool_.intern(op.value);
        if (!seen_.insert({op.kind, x, expected}).second) return;
        emit(std::move(op));
        if (x >= 0 && subst_[x] == kNoRef) subst_[x] = expected;
        return;
      }
    }
  }

  void dce() {
    std::vector<char> live(out_.size(), 0);
    for (size_t i = out_.size(); i-- > 0;) {
      const TraceOp& op = out_[i];
      bool root = op.kind != TraceOpKind::op && op.kind != TraceOpKind::read_state;
      if (op.kind == TraceOpKind::op && !mir::is_removable(op.op)) root = true;
      if (!root && !live[i]) continue;
      live[i] = 1;
      for (Ref a : op.args)
        if (a >= 0) live[a] = 1;
    }
    std::vector<Ref> idx(out_.size(), kNoRef);
    std::vector<TraceOp> kept;
    for (size_t i = 0; i < out_.size(); ++i) {
      if (!live[i]) continue;
      TraceOp op = std::move(out_[i]);
      for (Ref& a : op.args)
        if (a >= 0) a = idx[a];
      idx[i] = static_cast<Ref>(kept.size());
      kept.push_back(std::move(op));
    }
    out_ = std::move(kept);
  }

  Trace& t_;
  const sim::SimMemory& mem_;
  const OptimizeOptions& o_;
  ConstantPool pool_;
  rt::Context scratch_;
  std::vector<Ref> remap_;
  std::vector<TraceOp> out_;
  std::vector<Ref> subst_;
  std::unordered_map<uint32_t, Ref> regs_;
  std::set<std::tuple<TraceOpKind, Ref, Ref>> seen_;

 public:
  std::set<uint64_t> folded_;
};

}  // namespace

void optimize(Trace& trace, const sim::SimMemory& memory, const mir::Program& p,
              const OptimizeOptions& options) {
  (void)p;
  Optimizer o(trace, memory, options);
  o.run();
  trace.dependencies.assign(o.folded_.begin(), o.folded_.end());
}

bool is_alignment_guard(const std::vector<TraceOp>& ops, const Trace& t, size_t index) {
  const TraceOp& g = ops[index];
  if (g.kind != TraceOpKind::guard_true || g.args.empty() || g.args[0] < 0) return false;
  const TraceOp& eq = ops[g.args[0]];
  if (eq.kind != TraceOpKind::op || eq.op.code != Opcode::eq_bits_bv_c) return false;
  auto const_of = [&](Ref r) -> std::optional<uint64_t> {
    if (!is_const_ref(r)) return std::nullopt;
    if (auto b = t.constants[const_index(r)].get_if<rt::Bits>()) return b->bits;
    return std::nullopt;
  };
  for (int side = 0; side < 2; ++side) {
    Ref x = eq.args[side];
    if (const_of(eq.args[1 - side]) != 0u || x < 0) continue;
    const TraceOp& a = ops[x];
    if (a.kind != TraceOpKind::op || a.op.code != Opcode::and_bits_bv_c) continue;
    for (int k = 0; k < 2; ++k) {
      auto m = const_of(a.args[k]);
      if (m && *m != 0 && ((*m + 1) & *m) == 0) return true;
    }
  }
  return false;
}

size_t count_alignment_guards(const std::vector<TraceOp>& ops, const Trace& t) {
  size_t n = 0;
  for (size_t i = 0; i < ops.size(); ++i) n += is_alignment_guard(ops, t, i);
  return n;
}

}  // namespace isskit::trace
