#include <set>

#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

size_t statement_count(const Function& f) {
  size_t n = 0;
  for (auto& b : f.blocks) n += b.stmts.size();
  return n;
}

namespace {

// Functions on a call-graph cycle, including direct self-recursion.
std::vector<char> recursive_functions(const Program& p) {
  size_t n = p.functions.size();
  std::vector<std::vector<uint32_t>> callees(n);
  for (size_t i = 0; i < n; ++i)
    for (auto& b : p.functions[i].blocks)
      for (auto& s : b.stmts)
        if (s.op.code == Opcode::call && s.op.sym < n) callees[i].push_back(s.op.sym);
  std::vector<char> out(n, 0);
  for (size_t root = 0; root < n; ++root) {
    std::vector<char> seen(n, 0);
    std::vector<uint32_t> work(callees[root].begin(), callees[root].end());
    while (!work.empty() && !out[root]) {
      uint32_t g = work.back();
      work.pop_back();
      if (g == root) out[root] = 1;
      if (seen[g]) continue;
      seen[g] = 1;
      work.insert(work.end(), callees[g].begin(), callees[g].end());
    }
  }
  return out;
}

// Replace statement `si` of block `bi` (a call to `callee`) by the callee's
// body. The block is split: the tail moves to a continuation block whose
// parameter is the call's result.
void inline_at(Function& caller, size_t bi, size_t si, const Function& callee) {
  Statement call = std::move(caller.blocks[bi].stmts[si]);
  Block cont;
  cont.label = fresh_label(caller, caller.blocks[bi].label + ".ret");
  cont.stmts.assign(std::make_move_iterator(caller.blocks[bi].stmts.begin() + si + 1),
                    std::make_move_iterator(caller.blocks[bi].stmts.end()));
  caller.blocks[bi].stmts.resize(si);
  cont.term = std::move(caller.blocks[bi].term);
  cont.span = caller.blocks[bi].span;
  if (call.result != kNoValue) cont.params.push_back(call.result);

  std::vector<Operand> vmap(callee.values.size());
  for (size_t k = 0; k < callee.params.size(); ++k) vmap[callee.params[k]] = call.args[k];
  std::vector<char> mapped(callee.values.size(), 0);
  for (ValueId v : callee.params) mapped[v] = 1;
  auto map = [&](ValueId v) -> Operand {
    if (!mapped[v]) {
      vmap[v] = Operand::value(caller.add_value(caller.fresh_name(callee.values[v].name), callee.values[v].type));
      mapped[v] = 1;
    }
    return vmap[v];
  };
  auto map_operand = [&](const Operand& o) { return o.is_value() ? map(o.id) : o; };

  BlockId base = static_cast<BlockId>(caller.blocks.size());
  BlockId cont_id = base + static_cast<BlockId>(callee.blocks.size());
  for (auto& cb : callee.blocks) {
    Block nb;
    nb.label = fresh_label(caller, callee.name + "." + cb.label);
    nb.span = cb.span;
    for (ValueId v : cb.params) nb.params.push_back(map(v).id);
    for (auto& s : cb.stmts) {
      Statement ns;
      ns.op = s.op;
      ns.span = s.span;
      for (auto& a : s.args) ns.args.push_back(map_operand(a));
      if (s.result != kNoValue) ns.result = map(s.result).id;
      nb.stmts.push_back(std::move(ns));
    }
    const Terminator& t = cb.term;
    switch (t.kind) {
      case Terminator::Kind::Return: {
        std::vector<Operand> args;
        if (call.result != kNoValue) args.push_back(map_operand(t.value));
        nb.term = Terminator::go(cont_id, std::move(args));
        break;
      }
      case Terminator::Kind::Goto: {
        std::vector<Operand> args;
        for (auto& a : t.args) args.push_back(map_operand(a));
        nb.term = Terminator::go(base + t.target, std::move(args));
        break;
      }
      case Terminator::Kind::Branch:
        nb.term = Terminator::branch(map_operand(t.value), base + t.target, base + t.other);
        break;
      default:
        nb.term = t;
        break;
    }
    nb.term.span = t.span;
    caller.blocks.push_back(std::move(nb));
  }
  caller.blocks[bi].term = Terminator::go(base);
  caller.blocks[bi].term.span = call.span;
  caller.blocks.push_back(std::move(cont));
}

}  // namespace

ChangeCounts inline_calls(Program& p, const PipelineConfig& config) {
  ChangeCounts changes;
  auto recursive = recursive_functions(p);
  auto fits = [&](const Function& g) {
    return statement_count(g) <= config.inline_max_ops && g.blocks.size() <= config.inline_max_blocks;
  };
  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    size_t n = 0;
    // Rejected sites stay rejected until the caller changes.
    std::set<std::pair<size_t, size_t>> rejected;
    for (bool again = true; again;) {
      again = false;
      Function& caller = p.functions[fi];
      size_t cost = count_generic_ops(caller);
      for (size_t bi = 0; bi < caller.blocks.size() && !again; ++bi) {
        for (size_t si = 0; si < caller.blocks[bi].stmts.size(); ++si) {
          const Statement& s = caller.blocks[bi].stmts[si];
          if (s.op.code != Opcode::call || s.op.sym >= p.functions.size() || s.op.sym == fi) continue;
          const Function& callee = p.functions[s.op.sym];
          if (recursive[s.op.sym] || !fits(callee) || rejected.count({bi, si})) continue;
          Function trial = caller;
          inline_at(trial, bi, si, callee);
          resolve_symbols(trial, p);
          local_fixpoint(trial, p, config);
          if (count_generic_ops(trial) > cost) {
            rejected.insert({bi, si});
            continue;
          }
          caller = std::move(trial);
          rejected.clear();
          ++n;
          again = true;
          break;
        }
      }
    }
    if (n) changes[p.functions[fi].name] += n;
  }
  return changes;
}

}  // namespace isskit::opt
