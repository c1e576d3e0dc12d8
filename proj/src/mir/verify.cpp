#include "isskit/mir/verify.hpp"

#include <fmt/format.h>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/cfg.hpp"

namespace isskit::mir {

std::string to_string(const Diagnostic& d) {
  std::string where = d.function;
  if (!d.block.empty()) where += ":" + d.block;
  if (d.statement >= 0) where += fmt::format(":{}", d.statement);
  std::string s = where + ": " + d.message;
  if (d.span.valid()) s = to_string(d.span) + ": " + s;
  return s;
}

namespace {

class Checker {
 public:
  Checker(const Program& p, std::vector<Diagnostic>& out) : p_(p), out_(out) {}

  void type_ok(const Type& t, const std::string& fn, const std::string& what) {
    bool ok = true;
    switch (t.kind) {
      case TypeKind::BvFixed: ok = t.width >= 1 && t.width <= 64; break;
      case TypeKind::Enum: ok = p_.find_enum(t.name) != nullptr; break;
      case TypeKind::Union: ok = p_.find_union(t.name) != nullptr; break;
      case TypeKind::Record: ok = p_.find_record(t.name) != nullptr; break;
      default: break;
    }
    if (!ok) out_.push_back({fn, {}, -1, fmt::format("{}: invalid type {}", what, to_string(t)), {}});
  }

  void decls() {
    for (auto& u : p_.unions)
      for (auto& v : u.variants)
        for (auto& t : v.fields) type_ok(t, "", "union " + u.name);
    for (auto& r : p_.records)
      for (auto& f : r.fields) type_ok(f.type, "", "record " + r.name);
    for (auto& r : p_.registers) type_ok(r.type, "", "register " + r.name);
    auto need_fn = [&](const std::string& name, const char* role) {
      if (name.empty()) return;
      const Function* f = p_.find_function(name);
      if (!f)
        out_.push_back({"", {}, -1, fmt::format("{} function '{}' not found", role, name), {}});
      else if (!f->params.empty())
        out_.push_back({name, {}, -1, fmt::format("{} function takes no parameters", role), {}});
    };
    need_fn(p_.loop_fn, "loop");
    need_fn(p_.tick_fn, "tick");
    if (!p_.pc_reg.empty()) {
      auto r = p_.find_register(p_.pc_reg);
      if (!r || p_.registers[*r].type != Type::bv(64))
        out_.push_back({"", {}, -1, "pc register must be a declared %bv64", {}});
    }
  }

  void function(const Function& f, bool ssa) {
    auto diag = [&](const Block* b, int stmt, std::string msg, const SourceSpan& span) {
      out_.push_back({f.name, b ? b->label : std::string(), stmt, std::move(msg), span});
    };
    for (auto& v : f.values) type_ok(v.type, f.name, "value " + v.name);
    type_ok(f.ret, f.name, "return type");
    if (f.blocks.empty()) {
      diag(nullptr, -1, "function has no blocks", f.span);
      return;
    }
    if (!f.blocks[0].params.empty()) diag(&f.blocks[0], -1, "entry block cannot take parameters", f.blocks[0].span);

    auto check_operand = [&](const Block& b, int idx, const Operand& o, const SourceSpan& span) {
      if (o.is_value() && o.id >= f.values.size()) {
        diag(&b, idx, "operand refers to an unknown value", span);
        return false;
      }
      return true;
    };

    for (auto& b : f.blocks) {
      for (size_t i = 0; i < b.stmts.size(); ++i) {
        const Statement& s = b.stmts[i];
        int idx = static_cast<int>(i);
        bool operands_ok = true;
        for (auto& a : s.args) operands_ok &= check_operand(b, idx, a, s.span);
        if (!operands_ok) continue;
        Type first;
        if (!s.args.empty()) first = operand_type(f, s.args[0], p_);
        auto sig = signature(s.op, p_, s.args.empty() ? nullptr : &first);
        if (auto err = std::get_if<std::string>(&sig)) {
          diag(&b, idx, *err, s.span);
          continue;
        }
        const Signature& g = std::get<Signature>(sig);
        if (g.params.size() != s.args.size()) {
          diag(&b, idx,
               fmt::format("{} expects {} operands, got {}", to_string(s.op), g.params.size(),
                           s.args.size()),
               s.span);
          continue;
        }
        for (size_t k = 0; k < s.args.size(); ++k) {
          Type t = operand_type(f, s.args[k], p_);
          if (t != g.params[k])
            diag(&b, idx,
                 fmt::format("{} operand {} has type {}, expected {}", to_string(s.op), k,
                             to_string(t), to_string(g.params[k])),
                 s.span);
        }
        if (s.result != kNoValue) {
          if (s.result >= f.values.size()) {
            diag(&b, idx, "result refers to an unknown value", s.span);
          } else if (f.values[s.result].type != g.result) {
            diag(&b, idx,
                 fmt::format("{} produces {}, but result {} is declared {}", to_string(s.op),
                             to_string(g.result), f.values[s.result].name,
                             to_string(f.values[s.result].type)),
                 s.span);
          }
        }
      }
      const Terminator& t = b.term;
      auto target_ok = [&](BlockId id) {
        if (id >= f.blocks.size()) {
          diag(&b, -1, "terminator targets an unknown block", t.span);
          return false;
        }
        return true;
      };
      switch (t.kind) {
        case Terminator::Kind::None:
          diag(&b, -1, "block has no terminator", b.span);
          break;
        case Terminator::Kind::Goto: {
          if (!target_ok(t.target)) break;
          const Block& dst = f.blocks[t.target];
          if (dst.params.size() != t.args.size()) {
            diag(&b, -1,
                 fmt::format("goto {} passes {} arguments, block takes {}", dst.label, t.args.size(),
                             dst.params.size()),
                 t.span);
            break;
          }
          for (size_t k = 0; k < t.args.size(); ++k) {
            if (!check_operand(b, -1, t.args[k], t.span)) continue;
            Type at = operand_type(f, t.args[k], p_);
            if (at != f.values[dst.params[k]].type)
              diag(&b, -1,
                   fmt::format("goto {} argument {} has type {}, expected {}", dst.label, k,
                               to_string(at), to_string(f.values[dst.params[k]].type)),
                   t.span);
          }
          break;
        }
        case Terminator::Kind::Branch:
          if (check_operand(b, -1, t.value, t.span) &&
              operand_type(f, t.value, p_).kind != TypeKind::Bool)
            diag(&b, -1, "branch condition is not %bool", t.span);
          if (target_ok(t.target) && !f.blocks[t.target].params.empty())
            diag(&b, -1, "branch target takes parameters", t.span);
          if (target_ok(t.other) && !f.blocks[t.other].params.empty())
            diag(&b, -1, "branch target takes parameters", t.span);
          break;
        case Terminator::Kind::Return:
          if (check_operand(b, -1, t.value, t.span) && operand_type(f, t.value, p_) != f.ret)
            diag(&b, -1,
                 fmt::format("return of {} from function returning {}",
                             to_string(operand_type(f, t.value, p_)), to_string(f.ret)),
                 t.span);
          break;
        case Terminator::Kind::Halt:
        case Terminator::Kind::Raise:
          break;
      }
    }
    if (ssa) ssa_checks(f);
  }

  void ssa_checks(const Function& f) {
    struct Def {
      int block = -1;
      int index = 0;  // -2 function parameter, -1 block parameter
      int count = 0;
    };
    std::vector<Def> defs(f.values.size());
    auto define = [&](ValueId v, int block, int index) {
      if (v >= defs.size()) return;
      if (defs[v].count++ == 0) defs[v] = {block, index, 1};
    };
    for (ValueId v : f.params) define(v, 0, -2);
    for (size_t b = 0; b < f.blocks.size(); ++b) {
      for (ValueId v : f.blocks[b].params) define(v, static_cast<int>(b), -1);
      for (size_t i = 0; i < f.blocks[b].stmts.size(); ++i)
        if (f.blocks[b].stmts[i].result != kNoValue)
          define(f.blocks[b].stmts[i].result, static_cast<int>(b), static_cast<int>(i));
    }
    for (size_t v = 0; v < defs.size(); ++v)
      if (defs[v].count > 1)
        out_.push_back({f.name, {}, -1,
                        fmt::format("value {} is defined {} times", f.values[v].name, defs[v].count),
                        {}});

    Cfg cfg(f);
    auto check_use = [&](const Block& b, BlockId bid, int idx, const Operand& o,
                         const SourceSpan& span) {
      if (!o.is_value() || o.id >= defs.size()) return;
      const Def& d = defs[o.id];
      const std::string& name = f.values[o.id].name;
      if (d.count == 0) {
        out_.push_back({f.name, b.label, idx, fmt::format("value {} is never defined", name), span});
        return;
      }
      if (!cfg.reachable(bid)) return;
      bool ok = d.block == static_cast<int>(bid)
                    ? (idx < 0 ? true : d.index < idx)
                    : cfg.dominates(static_cast<BlockId>(d.block), bid);
      if (!ok)
        out_.push_back(
            {f.name, b.label, idx, fmt::format("use of {} is not dominated by its definition", name),
             span});
    };
    for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
      const Block& b = f.blocks[bi];
      BlockId bid = static_cast<BlockId>(bi);
      for (size_t i = 0; i < b.stmts.size(); ++i)
        for (auto& a : b.stmts[i].args) check_use(b, bid, static_cast<int>(i), a, b.stmts[i].span);
      const Terminator& t = b.term;
      if (t.kind == Terminator::Kind::Branch || t.kind == Terminator::Kind::Return)
        check_use(b, bid, -1, t.value, t.span);
      for (auto& a : t.args) check_use(b, bid, -1, a, t.span);
    }
  }

 private:
  const Program& p_;
  std::vector<Diagnostic>& out_;
};

std::vector<Diagnostic> run(const Program& p, bool ssa) {
  std::vector<Diagnostic> out;
  Checker c(p, out);
  c.decls();
  for (auto& f : p.functions) c.function(f, ssa);
  return out;
}

}  // namespace

std::vector<Diagnostic> verify(const Program& p) { return run(p, true); }
std::vector<Diagnostic> verify_weak(const Program& p) { return run(p, false); }

std::vector<Diagnostic> verify_function(const Function& f, const Program& p) {
  std::vector<Diagnostic> out;
  Checker(p, out).function(f, true);
  return out;
}

}  // namespace isskit::mir
