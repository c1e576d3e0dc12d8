#include "random_mir.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "isskit/mir/parser.hpp"
#include "isskit/mir/verify.hpp"

namespace isskit::testing {

namespace {

enum class K { Bv, Gbv, I64, Int, Bool, Color, Shape, Pair, Unit };

// For Bv, the width; for Gbv, the known width or 0 when only the runtime
// value knows it. For Shape, the variant when known.
struct Var {
  std::string text;
  K kind;
  unsigned w = 0;
  int variant = -1;
};

struct Sig {
  std::string name;
  std::vector<Var> params;
  Var ret;
};

struct Definition {
  K kind;
  unsigned w;
  std::string expr;
  int variant;
};

constexpr unsigned kWidths[] = {1, 4, 8, 12, 16, 32, 64};
constexpr const char* kColors[] = {"RED", "GREEN", "BLUE"};
constexpr const char* kVariants[] = {"SQ", "NUM", "NONE"};

const char* kDecls = R"(enum color { RED, GREEN, BLUE }
union shape { SQ(%bv8, %bv16), NUM(%i64), NONE() }
record pair { lo: %bv32, n: %i }
register r0: %bv64
register r1: %bv64
register r2: %bv64
register flag: %bool
register mode: %enum color
register last: %union shape
)";

std::string type_text(K k, unsigned w) {
  switch (k) {
    case K::Bv: return fmt::format("%bv{}", w);
    case K::Gbv: return "%bv";
    case K::I64: return "%i64";
    case K::Int: return "%i";
    case K::Bool: return "%bool";
    case K::Color: return "%enum color";
    case K::Shape: return "%union shape";
    case K::Pair: return "%record pair";
    case K::Unit: return "%unit";
  }
  return "%unit";
}

uint64_t mask(unsigned w) { return w >= 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1; }

uint64_t interesting_bits(unsigned w, std::mt19937_64& rng) {
  switch (rng() % 7) {
    case 0: return 0;
    case 1: return 1;
    case 2: return mask(w);
    case 3: return uint64_t{1} << (w - 1);
    case 4: return mask(w) >> 1;
    default: return rng() & mask(w);
  }
}

int64_t interesting_i64(std::mt19937_64& rng) {
  switch (rng() % 8) {
    case 0: return 0;
    case 1: return static_cast<int64_t>(rng() % 7) - 3;
    case 2: return INT64_MIN;
    case 3: return INT64_MAX;
    case 4: return static_cast<int64_t>(rng() % 2001) - 1000;
    case 5: return static_cast<int64_t>(rng() % 64);
    default: return static_cast<int64_t>(rng() >> (rng() % 64));
  }
}

std::string bits_text(unsigned w, uint64_t v) {
  std::string s = "0b";
  for (unsigned i = w; i-- > 0;) s += (v >> i) & 1 ? '1' : '0';
  return s;
}

class Generator {
 public:
  Generator(uint64_t seed, const RandomMirOptions& o) : rng_(seed), o_(o) {}

  std::string program() {
    std::string out = kDecls;
    for (unsigned i = 0; i < o_.functions; ++i) out += "\n" + function(i);
    return out;
  }

 private:
  unsigned pick(size_t n) { return static_cast<unsigned>(rng_() % n); }
  bool chance(unsigned pct) { return pick(100) < pct; }
  unsigned width() { return kWidths[pick(std::size(kWidths))]; }
  unsigned width_upto(unsigned w) {
    unsigned v;
    do v = width();
    while (v > w);
    return v;
  }
  unsigned width_from(unsigned w) {
    unsigned v;
    do v = width();
    while (v < w);
    return v;
  }

  void line(const std::string& s) { body_ += "  " + s + "\n"; }
  void open(const std::string& l) { body_ += l + ":\n"; }
  std::string label() { return fmt::format("b{}", ++labels_); }

  Var random_kind() {
    switch (pick(9)) {
      case 0:
      case 1: return {"", K::Bv, width()};
      case 2: return {"", K::Gbv, width()};
      case 3: return {"", K::I64};
      case 4: return {"", K::Int};
      case 5: return {"", K::Bool};
      case 6: return {"", K::Color};
      case 7: return {"", K::Shape};
      default: return {"", K::Pair};
    }
  }

  // ---- functions ----

  std::string function(unsigned index) {
    body_.clear();
    pool_.clear();
    again_.clear();
    next_ = labels_ = 0;
    Sig sig;
    sig.name = fmt::format("f{}", index);
    unsigned np = 1 + pick(3);
    std::string head = "fn " + sig.name + "(";
    for (unsigned k = 0; k < np; ++k) {
      Var v = random_kind();
      if (v.kind == K::Gbv) v.w = 0;
      v.text = fmt::format("p{}", k);
      head += (k ? ", " : "") + v.text + ": " + type_text(v.kind, v.w);
      sig.params.push_back(v);
      pool_.push_back(v);
    }
    sig.ret = chance(15) ? Var{"", K::Unit} : random_kind();
    if (sig.ret.kind == K::Gbv) sig.ret.w = 0;
    head += ") -> " + type_text(sig.ret.kind, sig.ret.w) + " {\n";

    open("entry");
    for (unsigned s = 0; s < o_.segments; ++s) segment(o_.depth);
    if (sig.ret.kind == K::Unit) line("return ()");
    else line("return " + operand(sig.ret.kind, sig.ret.w).text);
    sigs_.push_back(sig);
    return head + body_ + "}\n";
  }

  // ---- control ----

  struct Scope {
    size_t pool, again;
  };
  Scope enter() const { return {pool_.size(), again_.size()}; }
  void leave(Scope s) {
    pool_.resize(s.pool);
    again_.resize(s.again);
  }

  void segment(unsigned depth) {
    unsigned r = pick(100);
    if (depth && r < 20) return diamond(depth);
    if (depth && r < 32) return loop(depth);
    if (o_.effects && r < 40) return guard();
    if (o_.effects && r < 42) return halt_exit();
    unsigned n = 1 + pick(4);
    for (unsigned i = 0; i < n; ++i) step();
  }

  void step() {
    unsigned r = pick(100);
    if (o_.effects && r < 20) return action();
    if (r < 30 && !again_.empty()) {
      // Recompute an earlier expression for common subexpression elimination.
      const Definition d = again_[pick(again_.size())];
      define(d.kind, d.w, d.expr, d.variant);
      return;
    }
    Var k = random_kind();
    produce(k.kind, k.w);
  }

  void diamond(unsigned depth) {
    Var c = chance(80) ? produce(K::Bool, 0) : operand(K::Bool, 0);
    Var t = random_kind();
    while (t.kind > K::Bool) t = random_kind();
    std::string join = fmt::format("j{}", next_++);
    std::string yes = label(), no = label(), done = label();
    line("branch " + c.text + " " + yes + " " + no);
    for (const std::string& arm : {yes, no}) {
      open(arm);
      Scope s = enter();
      unsigned n = pick(3);
      for (unsigned i = 0; i < n; ++i) segment(depth - 1);
      Var v = operand(t.kind, t.w);
      line(join + ": " + type_text(t.kind, t.w) + " = " + copy_expr(v));
      leave(s);
      line("goto " + done);
    }
    open(done);
    pool_.push_back({join, t.kind, t.w, -1});
  }

  // A bounded counting loop that also carries a bitvector accumulator and
  // an unbounded-looking generic counter.
  void loop(unsigned depth) {
    std::string k = fmt::format("k{}", next_), acc = fmt::format("acc{}", next_),
                g = fmt::format("g{}", next_), c = fmt::format("c{}", next_);
    ++next_;
    line(k + ": %i64 = add_int_i64(0, 0)");
    line(acc + ": %bv64 = " + copy_expr(operand(K::Bv, 64)));
    line(g + ": %i = add_int(0, 0)");
    std::string head = label(), body = label(), exit = label();
    line("goto " + head);
    open(head);
    line(fmt::format("{}: %bool = lt_int_i64({}, {})", c, k, 1 + pick(6)));
    line("branch " + c + " " + body + " " + exit);
    open(body);
    Scope s = enter();
    pool_.push_back({k, K::I64});
    pool_.push_back({acc, K::Bv, 64});
    pool_.push_back({g, K::Int});
    unsigned n = 1 + pick(2);
    for (unsigned i = 0; i < n; ++i) segment(depth - 1);
    Var x = operand(K::Bv, 64);
    static const char* kMix[] = {"add_bits_bv_c<64>", "xor_bits_bv_c<64>", "or_bits_bv_c<64>"};
    line(fmt::format("{}: %bv64 = {}({}, {})", acc, kMix[pick(3)], acc, x.text));
    line(fmt::format("{}: %i = add_int({}, 1)", g, g));
    line(fmt::format("{}: %i64 = add_int_i64({}, 1)", k, k));
    leave(s);
    line("goto " + head);
    open(exit);
    pool_.push_back({k, K::I64});
    pool_.push_back({acc, K::Bv, 64});
    pool_.push_back({g, K::Int});
  }

  // Conditions compare against one literal so that most runs get past.
  Var rare_condition() {
    Var x = operand(K::Bv, 8);
    return define(K::Bool, 0, fmt::format("eq_bits_bv_c<8>({}, {})", x.text, bits_text(8, 2 + pick(250))));
  }

  void guard() {
    Var c = rare_condition();
    std::string bad = label(), ok = label();
    line("branch " + c.text + " " + bad + " " + ok);
    open(bad);
    line(fmt::format("raise \"check {} failed\"", labels_));
    open(ok);
  }

  void halt_exit() {
    Var c = rare_condition();
    std::string stop = label(), ok = label();
    line("branch " + c.text + " " + stop + " " + ok);
    open(stop);
    line("halt");
    open(ok);
  }

  // ---- values ----

  Var define(K k, unsigned w, const std::string& expr, int variant = -1) {
    Var v{fmt::format("v{}", next_++), k, w, variant};
    line(v.text + ": " + type_text(k, w) + " = " + expr);
    pool_.push_back(v);
    again_.push_back({k, w, expr, variant});
    return v;
  }

  // An expression that evaluates to `v` unchanged, for assignments.
  std::string copy_expr(const Var& v) {
    switch (v.kind) {
      case K::Bv: return fmt::format("or_bits_bv_c<{}>({}, {})", v.w, v.text, bits_text(v.w, 0));
      case K::Gbv: return fmt::format("or_bits({}, {})", v.text, v.text);
      case K::I64: return fmt::format("add_int_i64({}, 0)", v.text);
      case K::Int: return fmt::format("add_int({}, 0)", v.text);
      case K::Bool: return fmt::format("and_bool({}, true)", v.text);
      default: throw std::logic_error("no copy form");
    }
  }

  std::string literal(K k, unsigned w) {
    switch (k) {
      case K::Bv: return bits_text(w, interesting_bits(w, rng_));
      case K::Gbv: {
        unsigned gw = w ? w : width();
        return bits_text(gw, interesting_bits(gw, rng_));
      }
      case K::I64: return std::to_string(interesting_i64(rng_));
      case K::Int:
        if (chance(15)) return (chance(50) ? "-" : "") + std::string("1237940039285380274899124224");
        return std::to_string(interesting_i64(rng_) % 100000);
      case K::Bool: return chance(50) ? "true" : "false";
      case K::Color: return std::string("color::") + kColors[pick(3)];
      default: throw std::logic_error("no literal form");
    }
  }

  bool has_literal(K k) const { return k != K::Shape && k != K::Pair && k != K::Unit; }

  Var operand(K k, unsigned w) {
    std::vector<size_t> match;
    for (size_t i = 0; i < pool_.size(); ++i)
      if (pool_[i].kind == k && (k != K::Bv || pool_[i].w == w) && (k != K::Gbv || w == 0 || pool_[i].w == w))
        match.push_back(i);
    if (!match.empty() && chance(65)) return pool_[match[pick(match.size())]];
    if (has_literal(k) && chance(12)) {
      Var v{literal(k, w), k, w};
      if (k == K::Gbv && !w) v.w = static_cast<unsigned>(v.text.size() - 2);
      return v;
    }
    return produce(k, w);
  }

  Var produce(K k, unsigned w) {
    if (budget_ == 0) return leaf(k, w);
    --budget_;
    Var v = produce_in(k, w);
    ++budget_;
    return v;
  }

  // Values read from machine state, so that they are unknown to the
  // optimizer.
  Var leaf(K k, unsigned w) {
    std::string reg = fmt::format("read_reg<r{}>()", pick(3));
    switch (k) {
      case K::Bv: {
        if (w == 64) return define(K::Bv, 64, reg);
        Var r = define(K::Bv, 64, reg);
        return define(K::Bv, w, fmt::format("vector_subrange_bv_c<64,{},0>({})", w - 1, r.text));
      }
      case K::Gbv: {
        unsigned gw = w ? w : width();
        Var x = leaf(K::Bv, gw);
        return define(K::Gbv, gw, fmt::format("cast_bv_to_generic<{}>({})", gw, x.text));
      }
      case K::I64: {
        Var x = leaf(K::Bv, 16);
        return define(K::I64, 0, fmt::format("signed_bv_c<16>({})", x.text));
      }
      case K::Int: {
        Var x = leaf(K::I64, 0);
        return define(K::Int, 0, fmt::format("cast_i64_to_int({})", x.text));
      }
      case K::Bool: return define(K::Bool, 0, "read_reg<flag>()");
      case K::Color: return define(K::Color, 0, "read_reg<mode>()");
      case K::Shape: return define(K::Shape, 0, "read_reg<last>()");
      case K::Pair: {
        Var x = leaf(K::Bv, 32);
        return define(K::Pair, 0, fmt::format("record_make<pair>({}, 0)", x.text));
      }
      case K::Unit: break;
    }
    return {"()", K::Unit};
  }

  std::optional<Var> call(K k, unsigned w) {
    std::vector<size_t> c;
    for (size_t i = 0; i < sigs_.size(); ++i)
      if (sigs_[i].ret.kind == k && sigs_[i].ret.w == w) c.push_back(i);
    if (c.empty()) return std::nullopt;
    const Sig& s = sigs_[c[pick(c.size())]];
    std::string args;
    for (size_t i = 0; i < s.params.size(); ++i) {
      const Var& p = s.params[i];
      Var a = p.kind == K::Gbv ? operand(K::Gbv, chance(60) ? width() : 0) : operand(p.kind, p.w);
      args += (i ? ", " : "") + a.text;
    }
    std::string expr = s.name + "(" + args + ")";
    if (k == K::Unit) {
      line(expr);
      return Var{"()", K::Unit};
    }
    return define(k, w, expr);
  }

  Var address() {
    Var base = operand(K::Bv, 64);
    Var a = define(K::Bv, 64, fmt::format("and_bits_bv_c<64>({}, {})", base.text, bits_text(64, 0x1F8)));
    return define(K::Bv, 64, fmt::format("or_bits_bv_c<64>({}, {})", a.text, bits_text(64, 0x2000)));
  }

  void action() {
    switch (pick(8)) {
      case 0:
      case 1: line(fmt::format("write_reg<r{}>({})", pick(3), operand(K::Bv, 64).text)); return;
      case 2: line("write_reg<flag>(" + operand(K::Bool, 0).text + ")"); return;
      case 3:
        if (chance(50)) line("write_reg<mode>(" + operand(K::Color, 0).text + ")");
        else line("write_reg<last>(" + operand(K::Shape, 0).text + ")");
        return;
      case 4: {
        unsigned n = 1u << pick(4);
        Var a = address();
        line(fmt::format("mem_write_bv_c<{}>({}, {})", n, a.text, operand(K::Bv, 8 * n).text));
        return;
      }
      case 5: {
        unsigned n = 1u << pick(4);
        Var a = address();
        line(fmt::format("mem_write({}, {}, {})", a.text, n, operand(K::Gbv, 8 * n).text));
        return;
      }
      default:
        call(K::Unit, 0);
        return;
    }
  }

  Var produce_in(K k, unsigned w) {
    if (chance(10))
      if (auto v = call(k, w)) return *v;
    switch (k) {
      case K::Bv: return bv(w);
      case K::Gbv: return gbv(w ? w : width());
      case K::I64: return i64();
      case K::Int: return integer();
      case K::Bool: return boolean();
      case K::Color: return define(K::Color, 0, "read_reg<mode>()");
      case K::Shape: return shape();
      case K::Pair: return pair();
      case K::Unit: return {"()", K::Unit};
    }
    return {"()", K::Unit};
  }

  Var bv(unsigned w) {
    static const char* kBin[] = {"add_bits_bv_c", "sub_bits_bv_c", "and_bits_bv_c", "or_bits_bv_c",
                                 "xor_bits_bv_c"};
    static const char* kShift[] = {"shiftl_bv_c", "shiftr_bv_c", "arith_shiftr_bv_c"};
    for (;;) {
      switch (pick(14)) {
        case 0:
          return define(K::Bv, w, fmt::format("{}<{}>({}, {})", kBin[pick(5)], w, operand(K::Bv, w).text,
                                              operand(K::Bv, w).text));
        case 1: return define(K::Bv, w, fmt::format("not_bits_bv_c<{}>({})", w, operand(K::Bv, w).text));
        case 2: {
          std::string amount = chance(95) ? std::to_string(pick(w + 2)) : operand(K::I64, 0).text;
          return define(K::Bv, w, fmt::format("{}<{}>({}, {})", kShift[pick(3)], w, operand(K::Bv, w).text, amount));
        }
        case 3: {
          if (w == 1) break;
          unsigned v;
          do v = width_upto(w);
          while (v == w);
          return define(K::Bv, w, fmt::format("{}<{},{}>({})", chance(50) ? "sign_extend_bv_c" : "zero_extend_bv_c",
                                              v, w, operand(K::Bv, v).text));
        }
        case 4: {
          unsigned v = width_from(w);
          unsigned lo = pick(v - w + 1);
          return define(K::Bv, w, fmt::format("vector_subrange_bv_c<{},{},{}>({})", v, lo + w - 1, lo,
                                              operand(K::Bv, v).text));
        }
        case 5: {
          std::vector<unsigned> splits;
          for (unsigned a : kWidths)
            for (unsigned b : kWidths)
              if (a + b == w) splits.push_back(a);
          if (splits.empty()) break;
          unsigned a = splits[pick(splits.size())];
          return define(K::Bv, w, fmt::format("bitvector_concat_bv_c<{},{}>({}, {})", a, w - a,
                                              operand(K::Bv, a).text, operand(K::Bv, w - a).text));
        }
        case 6:
        case 7: return define(K::Bv, w, fmt::format("cast_bv_from_generic<{}>({})", w, operand(K::Gbv, w).text));
        case 8: return define(K::Bv, w, fmt::format("int_to_bits_i64<{}>({})", w, operand(K::I64, 0).text));
        case 9:
          if (w != 64) break;
          return define(K::Bv, w, fmt::format("read_reg<r{}>()", pick(3)));
        case 10: {
          if (w != 8 && w != 16 && w != 32 && w != 64) break;
          Var a = address();
          return define(K::Bv, w, fmt::format("mem_read_bv_c<{}>({})", w / 8, a.text));
        }
        case 11: {
          if (w != 8 && w != 16) break;
          Var u = operand(K::Shape, 0);
          if (u.variant != 0 && chance(95)) break;
          return define(K::Bv, w, fmt::format("union_field<SQ,{}>({})", w == 8 ? 0 : 1, u.text));
        }
        case 12:
          if (w != 32) break;
          return define(K::Bv, w, fmt::format("record_get<lo>({})", operand(K::Pair, 0).text));
        default: return define(K::Bv, w, copy_expr(operand(K::Bv, w)));
      }
    }
  }

  Var gbv(unsigned w) {
    static const char* kBin[] = {"add_bits", "sub_bits", "and_bits", "or_bits", "xor_bits"};
    static const char* kShift[] = {"shiftl", "shiftr", "arith_shiftr"};
    for (;;) {
      switch (pick(12)) {
        case 0:
        case 1: return define(K::Gbv, w, fmt::format("cast_bv_to_generic<{}>({})", w, operand(K::Bv, w).text));
        case 2: {
          // Occasionally mismatched widths, which trap.
          unsigned w2 = chance(3) ? width() : w;
          return define(K::Gbv, w, fmt::format("{}({}, {})", kBin[pick(5)], operand(K::Gbv, w).text,
                                               operand(K::Gbv, w2).text));
        }
        case 3: {
          return define(K::Gbv, w, fmt::format("not_bits({})", operand(K::Gbv, w).text));
        }
        case 4: {
          std::string amount = chance(95) ? std::to_string(pick(w + 2)) : operand(K::Int, 0).text;
          return define(K::Gbv, w, fmt::format("{}({}, {})", kShift[pick(3)], operand(K::Gbv, w).text, amount));
        }
        case 5: {
          unsigned v = width_upto(w);
          return define(K::Gbv, w, fmt::format("{}({}, {})", chance(50) ? "sign_extend" : "zero_extend",
                                               operand(K::Gbv, v).text, w));
        }
        case 6: {
          unsigned v = width_from(w);
          unsigned lo = pick(v - w + 1);
          return define(K::Gbv, w,
                        fmt::format("vector_subrange({}, {}, {})", operand(K::Gbv, v).text, lo + w - 1, lo));
        }
        case 7: {
          if (w < 2) break;
          unsigned a = 1 + pick(w - 1);
          return define(K::Gbv, w, fmt::format("bitvector_concat({}, {})", operand(K::Gbv, a).text,
                                               operand(K::Gbv, w - a).text));
        }
        case 8: return define(K::Gbv, w, fmt::format("int_to_bits({}, {})", operand(K::Int, 0).text, w));
        case 9: {
          if (w != 8 && w != 16 && w != 32 && w != 64) break;
          Var a = address();
          return define(K::Gbv, w, fmt::format("mem_read({}, {})", a.text, w / 8));
        }
        default: return define(K::Gbv, w, copy_expr(operand(K::Gbv, w)));
      }
    }
  }

  Var i64() {
    static const char* kBin[] = {"add_int_i64", "sub_int_i64", "mul_int_i64"};
    for (;;) {
      switch (pick(9)) {
        case 0: {
          unsigned w = width();
          return define(K::I64, 0, fmt::format("signed_bv_c<{}>({})", w, operand(K::Bv, w).text));
        }
        case 1: {
          unsigned w = width_upto(32);
          return define(K::I64, 0, fmt::format("unsigned_bv_c<{}>({})", w, operand(K::Bv, w).text));
        }
        case 2:
        case 3:
          return define(K::I64, 0, fmt::format("{}({}, {})", kBin[pick(3)], operand(K::I64, 0).text,
                                               operand(K::I64, 0).text));
        case 4: return define(K::I64, 0, fmt::format("neg_int_i64({})", operand(K::I64, 0).text));
        case 5: return define(K::I64, 0, fmt::format("cast_int_to_i64({})", operand(K::Int, 0).text));
        case 6: {
          unsigned w = width();
          return define(K::I64, 0, fmt::format("bitvector_length_bv_c<{}>({})", w, operand(K::Bv, w).text));
        }
        case 7: {
          Var u = operand(K::Shape, 0);
          if (u.variant != 1 && chance(95)) break;
          return define(K::I64, 0, fmt::format("union_field<NUM,0>({})", u.text));
        }
        default: return define(K::I64, 0, copy_expr(operand(K::I64, 0)));
      }
    }
  }

  Var integer() {
    static const char* kBin[] = {"add_int", "sub_int", "mul_int"};
    switch (pick(8)) {
      case 0: return define(K::Int, 0, fmt::format("cast_i64_to_int({})", operand(K::I64, 0).text));
      case 1: {
        Var x = operand(K::Gbv, chance(70) ? width() : 0);
        return define(K::Int, 0, fmt::format("{}({})", chance(50) ? "signed" : "unsigned", x.text));
      }
      case 2:
      case 3:
        return define(K::Int, 0,
                      fmt::format("{}({}, {})", kBin[pick(3)], operand(K::Int, 0).text, operand(K::Int, 0).text));
      case 4: return define(K::Int, 0, fmt::format("neg_int({})", operand(K::Int, 0).text));
      case 5: return define(K::Int, 0, fmt::format("bitvector_length({})", operand(K::Gbv, 0).text));
      case 6: return define(K::Int, 0, fmt::format("record_get<n>({})", operand(K::Pair, 0).text));
      default: return define(K::Int, 0, copy_expr(operand(K::Int, 0)));
    }
  }

  Var boolean() {
    static const char* kCmp[] = {"eq_int", "lt_int", "lteq_int", "gt_int", "gteq_int"};
    switch (pick(11)) {
      case 0: {
        unsigned w = width();
        return define(K::Bool, 0, fmt::format("{}<{}>({}, {})", chance(50) ? "eq_bits_bv_c" : "ult_bits_bv_c", w,
                                               operand(K::Bv, w).text, operand(K::Bv, w).text));
      }
      case 1: {
        unsigned w = width();
        return define(K::Bool, 0, fmt::format("eq_bits({}, {})", operand(K::Gbv, w).text, operand(K::Gbv, w).text));
      }
      case 2:
        return define(K::Bool, 0, fmt::format("{}({}, {})", kCmp[pick(5)], operand(K::Int, 0).text,
                                               operand(K::Int, 0).text));
      case 3:
        return define(K::Bool, 0, fmt::format("{}_i64({}, {})", kCmp[pick(5)], operand(K::I64, 0).text,
                                               operand(K::I64, 0).text));
      case 4:
        return define(K::Bool, 0,
                      fmt::format("eq_enum({}, {})", operand(K::Color, 0).text, operand(K::Color, 0).text));
      case 5: {
        Var u = operand(K::Shape, 0);
        Var t{fmt::format("v{}", next_++), K::Unit};
        line(t.text + ": %enum shape = union_tag(" + u.text + ")");
        return define(K::Bool, 0, fmt::format("eq_enum({}, shape::{})", t.text, kVariants[pick(3)]));
      }
      case 6: return define(K::Bool, 0, fmt::format("not_bool({})", operand(K::Bool, 0).text));
      case 7: {
        static const char* kOps[] = {"and_bool", "or_bool", "eq_bool"};
        return define(K::Bool, 0,
                      fmt::format("{}({}, {})", kOps[pick(3)], operand(K::Bool, 0).text, operand(K::Bool, 0).text));
      }
      case 8: return define(K::Bool, 0, "read_reg<flag>()");
      default: {
        unsigned w = width();
        return define(K::Bool, 0,
                      fmt::format("eq_bits_bv_c<{}>({}, {})", w, operand(K::Bv, w).text, literal(K::Bv, w)));
      }
    }
  }

  Var shape() {
    switch (pick(5)) {
      case 0:
      case 1:
        return define(K::Shape, 0,
                      fmt::format("make_union<SQ>({}, {})", operand(K::Bv, 8).text, operand(K::Bv, 16).text), 0);
      case 2: return define(K::Shape, 0, fmt::format("make_union<NUM>({})", operand(K::I64, 0).text), 1);
      case 3: return define(K::Shape, 0, "make_union<NONE>()", 2);
      default: return define(K::Shape, 0, "read_reg<last>()");
    }
  }

  Var pair() {
    switch (pick(3)) {
      case 0:
        return define(K::Pair, 0,
                      fmt::format("record_make<pair>({}, {})", operand(K::Bv, 32).text, operand(K::Int, 0).text));
      case 1:
        return define(K::Pair, 0,
                      fmt::format("record_set<lo>({}, {})", operand(K::Pair, 0).text, operand(K::Bv, 32).text));
      default:
        return define(K::Pair, 0,
                      fmt::format("record_set<n>({}, {})", operand(K::Pair, 0).text, operand(K::Int, 0).text));
    }
  }

  std::mt19937_64 rng_;
  RandomMirOptions o_;
  std::vector<Sig> sigs_;
  std::string body_;
  std::vector<Var> pool_;
  std::vector<Definition> again_;
  unsigned next_ = 0, labels_ = 0;
  unsigned budget_ = 3;
};

}  // namespace

std::string random_mir_text(uint64_t seed, const RandomMirOptions& options) {
  return Generator(seed, options).program();
}

mir::Program random_program(uint64_t seed, const RandomMirOptions& options) {
  std::string text = random_mir_text(seed, options);
  mir::Program p = mir::parse_program(text, fmt::format("random-{}.mir", seed));
  mir::to_ssa(p);
  auto diags = mir::verify(p);
  if (!diags.empty()) {
    std::string msg = fmt::format("random program {} does not verify:", seed);
    for (auto& d : diags) msg += "\n  " + mir::to_string(d);
    throw std::runtime_error(msg + "\n" + text);
  }
  return p;
}

rt::Value random_value(const mir::Type& t, const mir::Program& p, std::mt19937_64& rng) {
  using mir::TypeKind;
  switch (t.kind) {
    case TypeKind::BvFixed: return rt::Bits::make(t.width, interesting_bits(t.width, rng));
    case TypeKind::BvGeneric: {
      unsigned w = kWidths[rng() % std::size(kWidths)];
      return rt::GenericBits{w, rt::BigInt(interesting_bits(w, rng))};
    }
    case TypeKind::IntMachine: return rt::I64{interesting_i64(rng)};
    case TypeKind::IntGeneric:
      if (rng() % 8 == 0) return rt::GenericInt(rt::BigInt(interesting_i64(rng)) * rt::BigInt(rng() | 1));
      return rt::GenericInt(interesting_i64(rng) % 100000);
    case TypeKind::Bool: return rng() % 2 == 0;
    case TypeKind::Unit: return rt::Unit{};
    case TypeKind::Enum: {
      uint32_t e = p.enum_index.at(t.name);
      return rt::EnumVal{e, static_cast<uint32_t>(rng() % p.enums[e].members.size())};
    }
    case TypeKind::Union: {
      uint32_t u = p.union_index.at(t.name);
      uint32_t v = static_cast<uint32_t>(rng() % p.unions[u].variants.size());
      auto fields = std::make_shared<std::vector<rt::Value>>();
      for (auto& ft : p.unions[u].variants[v].fields) fields->push_back(random_value(ft, p, rng));
      return rt::UnionVal{u, v, std::move(fields)};
    }
    case TypeKind::Record: {
      uint32_t r = p.record_index.at(t.name);
      auto fields = std::make_shared<std::vector<rt::Value>>();
      for (auto& f : p.records[r].fields) fields->push_back(random_value(f.type, p, rng));
      return rt::RecordVal{r, std::move(fields)};
    }
  }
  return rt::Unit{};
}

std::vector<rt::Value> random_args(const mir::Function& f, const mir::Program& p, std::mt19937_64& rng) {
  std::vector<rt::Value> out;
  for (mir::ValueId v : f.params) out.push_back(random_value(f.values[v].type, p, rng));
  return out;
}

}  // namespace isskit::testing
