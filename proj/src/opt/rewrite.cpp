// Peephole rules that move generic bitvector and integer operations onto
// their fixed-width and machine-integer forms.
//
//   cast_bv_from_generic<w>(cast_bv_to_generic<w>(x))   -> x
//   cast_int_to_i64(cast_i64_to_int(x))                  -> x
//   op(cast<w>(x), cast<w>(y))                           -> cast<w>(op_bv_c<w>(x, y))
//       for add, sub, and, or, xor, not; eq_bits yields the bool directly
//   shift(cast<w>(x), n)                                 -> cast<w>(shift_bv_c<w>(x, n64))
//   sign/zero_extend(cast<w>(x), N), w <= N <= 64        -> cast<N>(ext_bv_c<w,N>(x))
//   vector_subrange(cast<w>(x), H, L)                    -> cast<H-L+1>(vector_subrange_bv_c<w,H,L>(x))
//   bitvector_concat(cast<a>(x), cast<b>(y)), a+b <= 64  -> cast<a+b>(bitvector_concat_bv_c<a,b>(x, y))
//   bitvector_length(cast<w>(x))                         -> w
//   signed(cast<w>(x)) / unsigned (w <= 63)              -> cast_i64_to_int(signed_bv_c<w>(x))
//   int_to_bits(n, W)                                    -> cast<W>(int_to_bits_i64<W>(n64))
//   mem_read(a, N)                                       -> cast<8N>(mem_read_bv_c<N>(a))
//   mem_write(a, N, cast<8N>(x))                         -> mem_write_bv_c<N>(a, x)
//   integer comparison on machine-integer operands       -> the _i64 comparison
//
// "cast<w>" is cast_bv_to_generic<w>; literals of known width match it too.
// n64 is an operand available as %i64: cast_i64_to_int(x) or a small literal.

#include "isskit/mir/catalog.hpp"
#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

namespace {

struct Fixed {
  Operand value;
  unsigned width;
};

class Rewriter {
 public:
  Rewriter(Function& f) : f_(f), defs_(f) {}

  size_t run() {
    for (auto& b : f_.blocks) {
      std::vector<Statement> out;
      // Each statement expands to at most three, so pointers into `out`
      // held by the def map stay valid.
      out.reserve(b.stmts.size() * 3 + 1);
      out_ = &out;
      for (auto& s : b.stmts) {
        for (auto& a : s.args) a = sub_.resolve(a);
        if (!rewrite(s)) keep(std::move(s));
      }
      b.stmts = std::move(out);
    }
    sub_.apply(f_);
    return changes_;
  }

 private:
  void keep(Statement s) {
    out_->push_back(std::move(s));
    defs_.set(out_->back().result, &out_->back());
  }

  ValueId add(const std::string& base, Type type, OpKind op, std::vector<Operand> args) {
    ValueId v = emit(f_, *out_, base, std::move(type), std::move(op), std::move(args));
    defs_.set(v, &out_->back());
    return v;
  }

  // `result = kind(arg)`, reusing the original result value.
  void define(ValueId result, OpKind op, std::vector<Operand> args, const SourceSpan& span) {
    Statement s;
    s.result = result;
    s.op = std::move(op);
    s.args = std::move(args);
    s.span = span;
    keep(std::move(s));
  }

  std::optional<Fixed> fixed(const Operand& o) const {
    if (o.is_literal()) {
      if (auto g = o.literal.get_if<rt::GenericBits>(); g && g->width >= 1 && g->width <= 64)
        return Fixed{Operand::lit(rt::Bits::make(g->width, static_cast<uint64_t>(g->bits))), g->width};
      return std::nullopt;
    }
    if (auto d = defs_.def_if(o, Opcode::cast_bv_to_generic))
      return Fixed{d->args[0], static_cast<unsigned>(d->op.ints[0])};
    return std::nullopt;
  }

  std::optional<Operand> machine(const Operand& o) const {
    if (o.is_literal()) {
      if (auto n = o.literal.get_if<rt::GenericInt>())
        if (auto v = n->as_i64()) return Operand::lit(rt::I64{*v});
      return std::nullopt;
    }
    if (auto d = defs_.def_if(o, Opcode::cast_i64_to_int)) return d->args[0];
    return std::nullopt;
  }

  static std::optional<int64_t> small_literal(const Operand& o) {
    if (o.is_literal()) {
      if (auto n = o.literal.get_if<rt::GenericInt>()) return n->as_i64();
      if (auto i = o.literal.get_if<rt::I64>()) return i->v;
    }
    return std::nullopt;
  }

  std::string base(const Statement& s) const { return f_.values[s.result].name; }

  // Emit `t = op(args)` of width w and redefine the result as cast<w>(t).
  void via_fixed(const Statement& s, OpKind op, std::vector<Operand> args, unsigned w) {
    ValueId t = add(base(s) + ".w", Type::bv(w), std::move(op), std::move(args));
    define(s.result, make_op(Opcode::cast_bv_to_generic, {w}), {Operand::value(t)}, s.span);
  }

  void via_machine(const Statement& s, OpKind op, std::vector<Operand> args) {
    ValueId t = add(base(s) + ".m", Type::i64(), std::move(op), std::move(args));
    define(s.result, make_op(Opcode::cast_i64_to_int), {Operand::value(t)}, s.span);
  }

  void replace(const Statement& s, Operand with) { sub_.set(s.result, std::move(with)); }

  bool rewrite(Statement& s) {
    bool done = apply(s);
    if (done) ++changes_;
    return done;
  }

  bool apply(const Statement& s) {
    const auto& a = s.args;
    switch (s.op.code) {
      case Opcode::cast_bv_from_generic: {
        auto x = fixed(a[0]);
        if (!x || x->width != s.op.ints[0] || a[0].is_literal()) return false;
        replace(s, x->value);
        return true;
      }
      case Opcode::cast_int_to_i64: {
        if (a[0].is_literal()) return false;
        auto x = machine(a[0]);
        if (!x) return false;
        replace(s, *x);
        return true;
      }
      case Opcode::add_bits:
      case Opcode::sub_bits:
      case Opcode::and_bits:
      case Opcode::or_bits:
      case Opcode::xor_bits:
      case Opcode::eq_bits: {
        auto x = fixed(a[0]), y = fixed(a[1]);
        if (!x || !y || x->width != y->width) return false;
        Opcode op = specialized(s.op.code);
        if (s.op.code == Opcode::eq_bits) {
          define(s.result, make_op(op, {x->width}), {x->value, y->value}, s.span);
          return true;
        }
        via_fixed(s, make_op(op, {x->width}), {x->value, y->value}, x->width);
        return true;
      }
      case Opcode::not_bits: {
        auto x = fixed(a[0]);
        if (!x) return false;
        via_fixed(s, make_op(Opcode::not_bits_bv_c, {x->width}), {x->value}, x->width);
        return true;
      }
      case Opcode::shiftl:
      case Opcode::shiftr:
      case Opcode::arith_shiftr: {
        auto x = fixed(a[0]);
        auto n = machine(a[1]);
        if (!x || !n) return false;
        via_fixed(s, make_op(specialized(s.op.code), {x->width}), {x->value, *n}, x->width);
        return true;
      }
      case Opcode::sign_extend:
      case Opcode::zero_extend: {
        auto x = fixed(a[0]);
        auto to = small_literal(a[1]);
        if (!x || !to || *to < x->width || *to > 64) return false;
        unsigned w = static_cast<unsigned>(*to);
        via_fixed(s, make_op(specialized(s.op.code), {x->width, w}), {x->value}, w);
        return true;
      }
      case Opcode::vector_subrange: {
        auto x = fixed(a[0]);
        auto hi = small_literal(a[1]), lo = small_literal(a[2]);
        if (!x || !hi || !lo || *lo < 0 || *lo > *hi || *hi >= x->width) return false;
        via_fixed(s, make_op(Opcode::vector_subrange_bv_c, {x->width, *hi, *lo}), {x->value},
                  static_cast<unsigned>(*hi - *lo + 1));
        return true;
      }
      case Opcode::bitvector_concat: {
        auto x = fixed(a[0]), y = fixed(a[1]);
        if (!x || !y || x->width + y->width > 64) return false;
        via_fixed(s, make_op(Opcode::bitvector_concat_bv_c, {x->width, y->width}), {x->value, y->value},
                  x->width + y->width);
        return true;
      }
      case Opcode::bitvector_length: {
        auto x = fixed(a[0]);
        if (!x) return false;
        replace(s, Operand::lit(rt::GenericInt(int64_t{x->width})));
        return true;
      }
      case Opcode::signed_:
      case Opcode::unsigned_: {
        auto x = fixed(a[0]);
        if (!x || (s.op.code == Opcode::unsigned_ && x->width > 63)) return false;
        via_machine(s, make_op(specialized(s.op.code), {x->width}), {x->value});
        return true;
      }
      case Opcode::int_to_bits: {
        auto n = machine(a[0]);
        auto w = small_literal(a[1]);
        if (!n || !w || *w < 1 || *w > 64) return false;
        via_fixed(s, make_op(Opcode::int_to_bits_i64, {*w}), {*n}, static_cast<unsigned>(*w));
        return true;
      }
      case Opcode::mem_read: {
        auto n = small_literal(a[1]);
        if (!n || (*n != 1 && *n != 2 && *n != 4 && *n != 8)) return false;
        via_fixed(s, make_op(Opcode::mem_read_bv_c, {*n}), {a[0]}, static_cast<unsigned>(8 * *n));
        return true;
      }
      case Opcode::mem_write: {
        auto n = small_literal(a[1]);
        auto x = fixed(a[2]);
        if (!n || !x || (*n != 1 && *n != 2 && *n != 4 && *n != 8) || x->width != 8 * *n) return false;
        Statement w;
        w.op = make_op(Opcode::mem_write_bv_c, {*n});
        w.args = {a[0], x->value};
        w.span = s.span;
        keep(std::move(w));
        return true;
      }
      case Opcode::eq_int:
      case Opcode::lt_int:
      case Opcode::lteq_int:
      case Opcode::gt_int:
      case Opcode::gteq_int: {
        auto x = machine(a[0]), y = machine(a[1]);
        if (!x || !y) return false;
        define(s.result, make_op(specialized(s.op.code)), {*x, *y}, s.span);
        return true;
      }
      default:
        return false;
    }
  }

  static Opcode specialized(Opcode op) {
    switch (op) {
      case Opcode::add_bits: return Opcode::add_bits_bv_c;
      case Opcode::sub_bits: return Opcode::sub_bits_bv_c;
      case Opcode::and_bits: return Opcode::and_bits_bv_c;
      case Opcode::or_bits: return Opcode::or_bits_bv_c;
      case Opcode::xor_bits: return Opcode::xor_bits_bv_c;
      case Opcode::eq_bits: return Opcode::eq_bits_bv_c;
      case Opcode::shiftl: return Opcode::shiftl_bv_c;
      case Opcode::shiftr: return Opcode::shiftr_bv_c;
      case Opcode::arith_shiftr: return Opcode::arith_shiftr_bv_c;
      case Opcode::sign_extend: return Opcode::sign_extend_bv_c;
      case Opcode::zero_extend: return Opcode::zero_extend_bv_c;
      case Opcode::signed_: return Opcode::signed_bv_c;
      case Opcode::unsigned_: return Opcode::unsigned_bv_c;
      case Opcode::eq_int: return Opcode::eq_int_i64;
      case Opcode::lt_int: return Opcode::lt_int_i64;
      case Opcode::lteq_int: return Opcode::lteq_int_i64;
      case Opcode::gt_int: return Opcode::gt_int_i64;
      case Opcode::gteq_int: return Opcode::gteq_int_i64;
      default: return op;
    }
  }

  Function& f_;
  DefMap defs_;
  Substitution sub_;
  std::vector<Statement>* out_ = nullptr;
  size_t changes_ = 0;
};

}  // namespace

size_t rewrite_bv_int(Function& f, const Program& p) {
  (void)p;
  return Rewriter(f).run();
}

}  // namespace isskit::opt
