#include "isskit/analysis/range.hpp"

#include <fmt/format.h>

#include "isskit/mir/cfg.hpp"
#include "isskit/opt/edit.hpp"

namespace isskit::analysis {

using namespace mir;

namespace {

BigInt pow2(unsigned n) { return BigInt(1) << n; }

const BigInt& i64_min() {
  static const BigInt v = -pow2(63);
  return v;
}
const BigInt& i64_max() {
  static const BigInt v = pow2(63) - 1;
  return v;
}

bool is_int(const Type& t) { return t.kind == TypeKind::IntMachine || t.kind == TypeKind::IntGeneric; }

std::optional<BigInt> literal_int(const rt::Value& v) {
  if (auto i = v.get_if<rt::I64>()) return BigInt(i->v);
  if (auto n = v.get_if<rt::GenericInt>()) return n->to_big();
  return std::nullopt;
}

}  // namespace

IntRange IntRange::i64() { return {i64_min(), i64_max()}; }
IntRange IntRange::signed_bits(unsigned w) { return {-pow2(w - 1), pow2(w - 1) - 1}; }
IntRange IntRange::unsigned_bits(unsigned w) { return {BigInt(0), pow2(w) - 1}; }

bool IntRange::fits_i64() const { return lo && hi && *lo >= i64_min() && *hi <= i64_max(); }

bool IntRange::contains(const BigInt& v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }

bool IntRange::contains(const IntRange& r) const {
  bool lo_ok = !lo || (r.lo && *lo <= *r.lo);
  bool hi_ok = !hi || (r.hi && *r.hi <= *hi);
  return lo_ok && hi_ok;
}

IntRange hull(const IntRange& a, const IntRange& b) {
  IntRange r;
  if (a.lo && b.lo) r.lo = std::min(*a.lo, *b.lo);
  if (a.hi && b.hi) r.hi = std::max(*a.hi, *b.hi);
  return r;
}

IntRange meet(const IntRange& a, const IntRange& b) {
  IntRange r = a;
  if (b.lo && (!r.lo || *b.lo > *r.lo)) r.lo = b.lo;
  if (b.hi && (!r.hi || *b.hi < *r.hi)) r.hi = b.hi;
  // An empty meet only arises on paths that trap; keep the bounds ordered.
  if (r.lo && r.hi && *r.lo > *r.hi) r.hi = r.lo;
  return r;
}

IntRange add(const IntRange& a, const IntRange& b) {
  IntRange r;
  if (a.lo && b.lo) r.lo = *a.lo + *b.lo;
  if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
  return r;
}

IntRange neg(const IntRange& a) {
  IntRange r;
  if (a.hi) r.lo = -*a.hi;
  if (a.lo) r.hi = -*a.lo;
  return r;
}

IntRange sub(const IntRange& a, const IntRange& b) { return add(a, neg(b)); }

IntRange mul(const IntRange& a, const IntRange& b) {
  auto zero = [](const IntRange& r) { return r.lo && r.hi && *r.lo == 0 && *r.hi == 0; };
  if (zero(a) || zero(b)) return IntRange::exact(0);
  if (!a.lo || !a.hi || !b.lo || !b.hi) return IntRange::top();
  BigInt c[] = {*a.lo * *b.lo, *a.lo * *b.hi, *a.hi * *b.lo, *a.hi * *b.hi};
  return {*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c))};
}

std::string to_string(const IntRange& r) {
  return fmt::format("{}..{}", r.lo ? r.lo->str() : "-inf", r.hi ? r.hi->str() : "+inf");
}

std::optional<IntRange> operand_range(const RangeMap& m, const Operand& o) {
  if (o.is_literal()) {
    if (auto v = literal_int(o.literal)) return IntRange::exact(*v);
    return std::nullopt;
  }
  return o.id < m.ranges.size() ? m.ranges[o.id] : std::nullopt;
}

namespace {

class Analyzer {
 public:
  Analyzer(const Function& f) : f_(f), defs_(f), cfg_(f) {
    out_.ranges.assign(f.values.size(), std::nullopt);
    joins_.assign(f.values.size(), 0);
  }

  RangeMap run() {
    for (ValueId v : f_.params)
      if (is_int(f_.type_of(v))) out_.ranges[v] = top_for(v);
    for (bool changed = true; changed;) {
      changed = false;
      for (BlockId b : cfg_.rpo) changed |= visit(f_.blocks[b]);
    }
    return std::move(out_);
  }

 private:
  IntRange top_for(ValueId v) const {
    return f_.type_of(v).kind == TypeKind::IntMachine ? IntRange::i64() : IntRange::top();
  }

  std::optional<IntRange> range(const Operand& o) const { return operand_range(out_, o); }

  // Width of a generic bitvector operand when it is a cast from a fixed one.
  std::optional<unsigned> known_width(const Operand& o) const {
    if (o.is_literal()) {
      if (auto g = o.literal.get_if<rt::GenericBits>()) return g->width;
      return std::nullopt;
    }
    if (auto d = defs_.def_if(o, Opcode::cast_bv_to_generic)) return static_cast<unsigned>(d->op.ints[0]);
    return std::nullopt;
  }

  std::optional<IntRange> transfer(const Statement& s) const {
    const auto& a = s.args;
    auto binary = [&](IntRange (*fn)(const IntRange&, const IntRange&)) -> std::optional<IntRange> {
      auto x = range(a[0]), y = range(a[1]);
      if (!x || !y) return std::nullopt;
      return fn(*x, *y);
    };
    auto unary = [&](IntRange (*fn)(const IntRange&)) -> std::optional<IntRange> {
      auto x = range(a[0]);
      if (!x) return std::nullopt;
      return fn(*x);
    };
    auto machine = [&](std::optional<IntRange> r) -> std::optional<IntRange> {
      if (!r) return r;
      return meet(*r, IntRange::i64());
    };
    switch (s.op.code) {
      case Opcode::add_int: return binary(add);
      case Opcode::sub_int: return binary(sub);
      case Opcode::mul_int: return binary(mul);
      case Opcode::neg_int: return unary(neg);
      case Opcode::add_int_i64: return machine(binary(add));
      case Opcode::sub_int_i64: return machine(binary(sub));
      case Opcode::mul_int_i64: return machine(binary(mul));
      case Opcode::neg_int_i64: return machine(unary(neg));
      case Opcode::cast_i64_to_int: return range(a[0]);
      case Opcode::cast_int_to_i64: return machine(range(a[0]));
      case Opcode::signed_bv_c: return IntRange::signed_bits(static_cast<unsigned>(s.op.ints[0]));
      case Opcode::unsigned_bv_c: return IntRange::unsigned_bits(static_cast<unsigned>(s.op.ints[0]));
      case Opcode::bitvector_length_bv_c: return IntRange::exact(s.op.ints[0]);
      case Opcode::signed_:
        if (auto w = known_width(a[0])) return IntRange::signed_bits(*w);
        return IntRange::top();
      case Opcode::unsigned_:
        if (auto w = known_width(a[0])) return IntRange::unsigned_bits(*w);
        return IntRange{BigInt(0), std::nullopt};
      case Opcode::bitvector_length:
        if (auto w = known_width(a[0])) return IntRange::exact(*w);
        return IntRange{BigInt(1), std::nullopt};
      default:
        return top_for(s.result);
    }
  }

  bool visit(const Block& b) {
    bool changed = false;
    for (auto& s : b.stmts) {
      if (s.result == kNoValue || !is_int(f_.type_of(s.result))) continue;
      std::optional<IntRange> r = transfer(s);
      if (r != out_.ranges[s.result]) {
        out_.ranges[s.result] = std::move(r);
        changed = true;
      }
    }
    if (b.term.kind != Terminator::Kind::Goto) return changed;
    const Block& dst = f_.blocks[b.term.target];
    for (size_t i = 0; i < dst.params.size() && i < b.term.args.size(); ++i) {
      ValueId p = dst.params[i];
      if (!is_int(f_.type_of(p))) continue;
      std::optional<IntRange> in = range(b.term.args[i]);
      if (!in) continue;
      auto& cur = out_.ranges[p];
      if (!cur) {
        cur = std::move(in);
        changed = true;
        continue;
      }
      IntRange h = hull(*cur, *in);
      if (h == *cur) continue;
      ++out_.join_updates;
      cur = ++joins_[p] > kWidenAfter ? top_for(p) : h;
      changed = true;
    }
    return changed;
  }

  const Function& f_;
  opt::DefMap defs_;
  Cfg cfg_;
  RangeMap out_;
  std::vector<unsigned> joins_;
};

}  // namespace

RangeMap analyze(const Function& f, const Program& p) {
  (void)p;
  return Analyzer(f).run();
}

namespace {

std::optional<Opcode> machine_form(Opcode op) {
  switch (op) {
    case Opcode::add_int: return Opcode::add_int_i64;
    case Opcode::sub_int: return Opcode::sub_int_i64;
    case Opcode::mul_int: return Opcode::mul_int_i64;
    case Opcode::neg_int: return Opcode::neg_int_i64;
    default: return std::nullopt;
  }
}

// The operand as a machine integer without a new statement, if possible.
std::optional<Operand> as_machine(const opt::DefMap& defs, const Operand& o) {
  if (o.is_literal()) {
    if (auto n = o.literal.get_if<rt::GenericInt>())
      if (auto v = n->as_i64()) return Operand::lit(rt::I64{*v});
    return std::nullopt;
  }
  if (auto d = defs.def_if(o, Opcode::cast_i64_to_int)) return d->args[0];
  return std::nullopt;
}

}  // namespace

size_t narrow(Function& f, const Program& p, const RangeMap& ranges) {
  (void)p;
  opt::DefMap defs(f);
  size_t n = 0;
  for (auto& b : f.blocks) {
    std::vector<Statement> out;
    out.reserve(b.stmts.size() * 2 + 1);
    for (auto& s : b.stmts) {
      auto form = machine_form(s.op.code);
      const auto& r = s.result < ranges.ranges.size() ? ranges.ranges[s.result] : std::nullopt;
      std::vector<Operand> args;
      bool ok = form && r && r->fits_i64();
      for (size_t i = 0; ok && i < s.args.size(); ++i) {
        auto m = as_machine(defs, s.args[i]);
        if (!m) ok = false;
        else args.push_back(*m);
      }
      if (!ok) {
        out.push_back(std::move(s));
        defs.set(out.back().result, &out.back());
        continue;
      }
      ValueId t = opt::emit(f, out, f.values[s.result].name + ".m", Type::i64(), make_op(*form), std::move(args));
      defs.set(t, &out.back());
      Statement cast;
      cast.result = s.result;
      cast.op = make_op(Opcode::cast_i64_to_int);
      cast.args = {Operand::value(t)};
      cast.span = s.span;
      out.push_back(std::move(cast));
      defs.set(s.result, &out.back());
      ++n;
    }
    b.stmts = std::move(out);
  }
  return n;
}

std::string dump_ranges(const Function& f, const Program& p, const RangeMap& ranges) {
  (void)p;
  std::string out;
  auto line = [&](const Block& b, ValueId v) {
    if (v < ranges.ranges.size() && ranges.ranges[v])
      out += fmt::format("{}:{}:{} {}\n", f.name, b.label, f.values[v].name, to_string(*ranges.ranges[v]));
  };
  for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
    const Block& b = f.blocks[bi];
    if (bi == 0)
      for (ValueId v : f.params) line(b, v);
    for (ValueId v : b.params) line(b, v);
    for (auto& s : b.stmts)
      if (s.result != kNoValue) line(b, s.result);
  }
  return out;
}

std::string dump_ranges(const Program& p) {
  std::string out;
  for (auto& f : p.functions) out += dump_ranges(f, p, analyze(f, p));
  return out;
}

}  // namespace isskit::analysis
