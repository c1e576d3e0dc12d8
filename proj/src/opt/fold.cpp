#include <fmt/format.h>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/cfg.hpp"
#include "isskit/mir/eval.hpp"
#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

namespace {

// Aggregates have no literal syntax, so folding stops at scalars.
bool has_literal_form(const rt::Value& v) {
  return v.is<rt::Bits>() || v.is<rt::GenericBits>() || v.is<rt::I64>() || v.is<rt::GenericInt>() ||
         v.is<bool>() || v.is<rt::EnumVal>();
}

bool all_literal(const Statement& s) {
  for (auto& a : s.args)
    if (!a.is_literal()) return false;
  return true;
}

// Block parameters whose every reachable incoming argument is the same
// operand (ignoring the parameter itself) are replaced by that operand.
size_t fold_trivial_params(Function& f, Substitution& sub) {
  Cfg cfg(f);
  size_t n = 0;
  for (size_t bi = 1; bi < f.blocks.size(); ++bi) {
    Block& b = f.blocks[bi];
    if (b.params.empty() || !cfg.reachable(static_cast<BlockId>(bi))) continue;
    std::vector<Block*> preds;
    for (size_t pi = 0; pi < f.blocks.size(); ++pi) {
      Block& p = f.blocks[pi];
      if (p.term.kind == Terminator::Kind::Goto && p.term.target == bi) preds.push_back(&p);
    }
    for (size_t k = b.params.size(); k-- > 0;) {
      ValueId param = b.params[k];
      std::optional<Operand> same;
      bool trivial = true;
      for (size_t pi = 0; pi < f.blocks.size() && trivial; ++pi) {
        const Block& p = f.blocks[pi];
        if (p.term.kind != Terminator::Kind::Goto || p.term.target != bi) continue;
        if (!cfg.reachable(static_cast<BlockId>(pi))) continue;
        Operand a = sub.resolve(p.term.args[k]);
        if (a.is_value() && a.id == param) continue;
        if (!same) same = a;
        else if (!(*same == a)) trivial = false;
      }
      if (!trivial || !same) continue;
      sub.set(param, *same);
      b.params.erase(b.params.begin() + k);
      for (Block* p : preds) p->term.args.erase(p->term.args.begin() + k);
      ++n;
    }
  }
  return n;
}

}  // namespace

size_t constant_fold(Function& f, const Program& p, std::vector<std::string>* diagnostics) {
  (void)p;
  rt::Context ctx;
  Substitution sub;
  size_t n = 0;
  std::vector<const rt::Value*> argv;
  for (auto& b : f.blocks) {
    std::vector<Statement> out;
    out.reserve(b.stmts.size());
    for (size_t i = 0; i < b.stmts.size(); ++i) {
      Statement& s = b.stmts[i];
      for (auto& a : s.args) a = sub.resolve(a);
      if (s.result == kNoValue || !is_mergeable(s.op) || !all_literal(s)) {
        out.push_back(std::move(s));
        continue;
      }
      if (s.op.code == Opcode::cast_bv_from_generic) {
        const auto* g = s.args[0].literal.get_if<rt::GenericBits>();
        if (g && g->width != s.op.ints[0]) {
          if (diagnostics)
            diagnostics->push_back(fmt::format("{}:{}:{}: {} applied to a literal of width {}", f.name, b.label, i,
                                               to_string(s.op), g->width));
          out.push_back(std::move(s));
          continue;
        }
      }
      argv.clear();
      for (auto& a : s.args) argv.push_back(&a.literal);
      std::optional<rt::Value> v;
      try {
        v = eval_pure(s.op, argv.data(), argv.size(), ctx);
      } catch (const rt::ModelTrap&) {
      }
      if (!v || !has_literal_form(*v)) {
        out.push_back(std::move(s));
        continue;
      }
      sub.set(s.result, Operand::lit(std::move(*v)));
      ++n;
    }
    b.stmts = std::move(out);
    Terminator& t = b.term;
    if (t.kind == Terminator::Kind::Branch || t.kind == Terminator::Kind::Return) t.value = sub.resolve(t.value);
    for (auto& a : t.args) a = sub.resolve(a);
    if (t.kind == Terminator::Kind::Branch && t.value.is_literal() && t.value.literal.is<bool>()) {
      t = Terminator::go(t.value.literal.as<bool>() ? t.target : t.other);
      ++n;
    } else if (t.kind == Terminator::Kind::Branch && t.target == t.other) {
      t = Terminator::go(t.target);
      ++n;
    }
  }
  n += fold_trivial_params(f, sub);
  sub.apply(f);
  return n;
}

}  // namespace isskit::opt
