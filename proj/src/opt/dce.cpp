#include "isskit/mir/catalog.hpp"
#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

namespace {

// Checked statements that provably cannot trap may go when unused.
bool removable(const Statement& s, const DefMap& defs) {
  if (is_removable(s.op)) return true;
  switch (s.op.code) {
    case Opcode::cast_bv_from_generic:
      if (auto d = defs.def_if(s.args[0], Opcode::cast_bv_to_generic)) return d->op.ints[0] == s.op.ints[0];
      return false;
    case Opcode::cast_int_to_i64:
      return defs.def_if(s.args[0], Opcode::cast_i64_to_int) != nullptr;
    case Opcode::shiftl_bv_c:
    case Opcode::shiftr_bv_c:
    case Opcode::arith_shiftr_bv_c:
      return s.args[1].is_literal() && s.args[1].literal.as<rt::I64>().v >= 0;
    default:
      return false;
  }
}

}  // namespace

size_t dead_code_elim(Function& f, const Program& p) {
  (void)p;
  size_t n = remove_unreachable_blocks(f);
  n += merge_blocks(f);
  DefMap defs(f);

  // Where each block parameter lives, to reach the matching goto arguments.
  std::vector<std::pair<BlockId, size_t>> param_of(f.values.size(), {~BlockId{0}, 0});
  for (size_t b = 0; b < f.blocks.size(); ++b)
    for (size_t k = 0; k < f.blocks[b].params.size(); ++k) param_of[f.blocks[b].params[k]] = {BlockId(b), k};
  std::vector<std::vector<BlockId>> gotos_into(f.blocks.size());
  for (size_t b = 0; b < f.blocks.size(); ++b)
    if (f.blocks[b].term.kind == Terminator::Kind::Goto) gotos_into[f.blocks[b].term.target].push_back(BlockId(b));

  std::vector<char> live(f.values.size(), 0);
  std::vector<ValueId> work;
  auto mark = [&](const Operand& o) {
    if (o.is_value() && o.id < live.size() && !live[o.id]) {
      live[o.id] = 1;
      work.push_back(o.id);
    }
  };
  for (auto& b : f.blocks) {
    for (auto& s : b.stmts)
      if (!removable(s, defs))
        for (auto& a : s.args) mark(a);
    if (b.term.kind == Terminator::Kind::Branch || b.term.kind == Terminator::Kind::Return) mark(b.term.value);
  }
  while (!work.empty()) {
    ValueId v = work.back();
    work.pop_back();
    if (const Statement* s = defs.def(v)) {
      for (auto& a : s->args) mark(a);
      continue;
    }
    auto [blk, k] = param_of[v];
    if (blk == ~BlockId{0}) continue;
    for (BlockId src : gotos_into[blk]) mark(f.blocks[src].term.args[k]);
  }

  std::vector<std::vector<char>> dead(f.blocks.size());
  for (size_t b = 0; b < f.blocks.size(); ++b)
    for (auto& s : f.blocks[b].stmts)
      dead[b].push_back(s.result != kNoValue && !live[s.result] && removable(s, defs));
  for (size_t b = 0; b < f.blocks.size(); ++b) {
    auto& stmts = f.blocks[b].stmts;
    size_t kept = 0;
    for (size_t i = 0; i < stmts.size(); ++i)
      if (!dead[b][i]) {
        if (kept != i) stmts[kept] = std::move(stmts[i]);
        ++kept;
      }
    n += stmts.size() - kept;
    stmts.resize(kept);
  }
  for (size_t bi = 1; bi < f.blocks.size(); ++bi) {
    Block& b = f.blocks[bi];
    for (size_t k = b.params.size(); k-- > 0;) {
      if (live[b.params[k]]) continue;
      b.params.erase(b.params.begin() + k);
      for (BlockId src : gotos_into[bi]) {
        auto& args = f.blocks[src].term.args;
        args.erase(args.begin() + k);
      }
      ++n;
    }
  }
  return n;
}

}  // namespace isskit::opt
