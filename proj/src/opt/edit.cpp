#include "isskit/opt/edit.hpp"

#include <fmt/format.h>

#include <unordered_set>

#include "isskit/mir/cfg.hpp"

namespace isskit::opt {

using namespace mir;

DefMap::DefMap(const Function& f) : defs_(f.values.size(), nullptr) {
  for (auto& b : f.blocks)
    for (auto& s : b.stmts)
      if (s.result != kNoValue && s.result < defs_.size()) defs_[s.result] = &s;
}

const Statement* DefMap::def_if(const Operand& o, Opcode code) const {
  const Statement* s = def(o);
  return s && s->op.code == code ? s : nullptr;
}

void DefMap::set(ValueId v, const Statement* s) {
  if (v == kNoValue) return;
  if (v >= defs_.size()) defs_.resize(v + 1, nullptr);
  defs_[v] = s;
}

Operand Substitution::resolve(const Operand& o) const {
  Operand cur = o;
  for (size_t guard = 0; cur.is_value() && guard <= map_.size(); ++guard) {
    auto it = map_.find(cur.id);
    if (it == map_.end()) break;
    cur = it->second;
  }
  return cur;
}

size_t Substitution::apply(Function& f) const {
  if (map_.empty()) return 0;
  size_t n = 0;
  auto fix = [&](Operand& o) {
    if (!o.is_value() || !map_.count(o.id)) return;
    o = resolve(o);
    ++n;
  };
  for (auto& b : f.blocks) {
    for (auto& s : b.stmts)
      for (auto& a : s.args) fix(a);
    if (b.term.kind == Terminator::Kind::Branch || b.term.kind == Terminator::Kind::Return) fix(b.term.value);
    for (auto& a : b.term.args) fix(a);
  }
  return n;
}

ValueId emit(Function& f, std::vector<Statement>& out, const std::string& name, Type type, OpKind op,
             std::vector<Operand> args) {
  ValueId v = kNoValue;
  if (type.kind != TypeKind::Unit) v = f.add_value(f.fresh_name(name), std::move(type));
  Statement s;
  s.result = v;
  s.op = std::move(op);
  s.args = std::move(args);
  out.push_back(std::move(s));
  return v;
}

std::string fresh_label(const Function& f, const std::string& base) {
  std::unordered_set<std::string_view> used;
  for (auto& b : f.blocks) used.insert(b.label);
  if (!used.count(base)) return base;
  for (unsigned i = 1;; ++i) {
    std::string c = fmt::format("{}.{}", base, i);
    if (!used.count(c)) return c;
  }
}

void compact_values(Function& f) {
  std::vector<char> live(f.values.size(), 0);
  for (ValueId v : f.params) live[v] = 1;
  for (auto& b : f.blocks) {
    for (ValueId v : b.params) live[v] = 1;
    for (auto& s : b.stmts)
      if (s.result != kNoValue) live[s.result] = 1;
  }
  std::vector<ValueId> remap(f.values.size(), kNoValue);
  std::vector<ValueInfo> values;
  for (size_t v = 0; v < f.values.size(); ++v)
    if (live[v]) {
      remap[v] = static_cast<ValueId>(values.size());
      values.push_back(std::move(f.values[v]));
    }
  if (values.size() == f.values.size()) {
    for (size_t v = 0; v < values.size(); ++v) f.values[v] = std::move(values[v]);
    return;
  }
  f.values = std::move(values);
  auto fix = [&](Operand& o) {
    if (o.is_value()) o.id = remap[o.id];
  };
  for (ValueId& v : f.params) v = remap[v];
  for (auto& b : f.blocks) {
    for (ValueId& v : b.params) v = remap[v];
    for (auto& s : b.stmts) {
      if (s.result != kNoValue) s.result = remap[s.result];
      for (auto& a : s.args) fix(a);
    }
    fix(b.term.value);
    for (auto& a : b.term.args) fix(a);
  }
}

size_t remove_unreachable_blocks(Function& f) {
  Cfg cfg(f);
  if (cfg.rpo.size() == f.blocks.size()) return 0;
  std::vector<BlockId> remap(f.blocks.size(), 0);
  std::vector<Block> kept;
  for (size_t b = 0; b < f.blocks.size(); ++b)
    if (cfg.reachable(static_cast<BlockId>(b))) {
      remap[b] = static_cast<BlockId>(kept.size());
      kept.push_back(std::move(f.blocks[b]));
    }
  size_t removed = f.blocks.size() - kept.size();
  f.blocks = std::move(kept);
  for (auto& b : f.blocks) {
    b.term.target = remap[b.term.target];
    b.term.other = remap[b.term.other];
  }
  return removed;
}

size_t merge_blocks(Function& f) {
  size_t merged = 0;
  Substitution sub;
  for (bool again = true; again;) {
    again = false;
    std::vector<unsigned> preds(f.blocks.size(), 0);
    for (auto& b : f.blocks) {
      if (b.term.kind == Terminator::Kind::Goto) ++preds[b.term.target];
      if (b.term.kind == Terminator::Kind::Branch) ++preds[b.term.target], ++preds[b.term.other];
    }
    for (size_t a = 0; a < f.blocks.size(); ++a) {
      Block& from = f.blocks[a];
      if (from.term.kind != Terminator::Kind::Goto) continue;
      BlockId t = from.term.target;
      if (t == 0 || t == a || preds[t] != 1) continue;
      Block& to = f.blocks[t];
      for (size_t k = 0; k < to.params.size(); ++k) sub.set(to.params[k], sub.resolve(from.term.args[k]));
      to.params.clear();
      from.stmts.insert(from.stmts.end(), std::make_move_iterator(to.stmts.begin()),
                        std::make_move_iterator(to.stmts.end()));
      to.stmts.clear();
      from.term = std::move(to.term);
      // `to` is now unreachable: nothing jumps to it any more.
      to.term = Terminator::go(t);
      ++merged;
      again = true;
      break;
    }
  }
  if (!merged) return 0;
  sub.apply(f);
  remove_unreachable_blocks(f);
  return merged;
}

}  // namespace isskit::opt
