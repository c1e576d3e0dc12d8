#include <fmt/format.h>

#include <functional>
#include <set>
#include <unordered_set>

#include "isskit/mir/cfg.hpp"
#include "isskit/mir/verify.hpp"

namespace isskit::mir {

namespace {

// A local of the mutable form is a ValueId that may be assigned many times.
using Var = ValueId;

std::vector<std::set<BlockId>> dominance_frontiers(const Cfg& cfg, size_t n) {
  std::vector<std::set<BlockId>> df(n);
  for (BlockId b : cfg.rpo) {
    std::set<BlockId> distinct(cfg.preds[b].begin(), cfg.preds[b].end());
    if (distinct.size() < 2) continue;
    for (BlockId p : distinct) {
      if (!cfg.reachable(p)) continue;
      BlockId runner = p;
      while (runner != cfg.idom[b]) {
        df[runner].insert(b);
        if (runner == 0) break;
        runner = cfg.idom[runner];
      }
    }
  }
  return df;
}

Function drop_unreachable(const Function& in) {
  Cfg cfg(in);
  std::vector<int> remap(in.blocks.size(), -1);
  Function out = in;
  out.blocks.clear();
  for (size_t b = 0; b < in.blocks.size(); ++b)
    if (cfg.reachable(static_cast<BlockId>(b))) {
      remap[b] = static_cast<int>(out.blocks.size());
      out.blocks.push_back(in.blocks[b]);
    }
  for (auto& b : out.blocks) {
    if (b.term.kind == Terminator::Kind::Goto || b.term.kind == Terminator::Kind::Branch) {
      b.term.target = remap[b.term.target];
      if (b.term.kind == Terminator::Kind::Branch) b.term.other = remap[b.term.other];
    }
  }
  return out;
}

}  // namespace

Function to_ssa(const Function& input, const Program& p) {
  (void)p;
  Function f = drop_unreachable(input);
  size_t nvars = f.values.size();
  size_t nblocks = f.blocks.size();

  // Definitions and upward-exposed uses per block.
  std::vector<std::vector<char>> defs(nblocks, std::vector<char>(nvars, 0));
  std::vector<std::vector<char>> gen(nblocks, std::vector<char>(nvars, 0));
  for (size_t b = 0; b < nblocks; ++b) {
    auto& d = defs[b];
    auto use = [&](const Operand& o) {
      if (o.is_value() && !d[o.id]) gen[b][o.id] = 1;
    };
    if (b == 0)
      for (Var v : f.params) d[v] = 1;
    for (Var v : f.blocks[b].params) d[v] = 1;
    for (auto& s : f.blocks[b].stmts) {
      for (auto& a : s.args) use(a);
      if (s.result != kNoValue) d[s.result] = 1;
    }
    const Terminator& t = f.blocks[b].term;
    if (t.kind == Terminator::Kind::Branch || t.kind == Terminator::Kind::Return) use(t.value);
    for (auto& a : t.args) use(a);
  }

  // Live-in sets. Explicit block parameters are defined on entry.
  std::vector<std::vector<char>> live_in(nblocks, std::vector<char>(nvars, 0));
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t bi = nblocks; bi-- > 0;) {
      std::vector<char> out(nvars, 0);
      for (BlockId s : successors(f.blocks[bi]))
        for (size_t v = 0; v < nvars; ++v) out[v] |= live_in[s][v];
      for (size_t v = 0; v < nvars; ++v) {
        char in = gen[bi][v] || (out[v] && !defs[bi][v]);
        if (in && !live_in[bi][v]) {
          live_in[bi][v] = 1;
          changed = true;
        }
      }
    }
  }
  for (Var v = 0; v < nvars; ++v)
    if (nblocks > 0 && live_in[0][v] &&
        std::find(f.params.begin(), f.params.end(), v) == f.params.end())
      throw SsaError(fmt::format("{}: local '{}' may be read before it is assigned", f.name,
                                 f.values[v].name));

  // Pruned placement of new block parameters.
  Cfg cfg(f);
  auto df = dominance_frontiers(cfg, nblocks);
  std::vector<std::vector<Var>> placed(nblocks);
  for (Var v = 0; v < nvars; ++v) {
    std::vector<BlockId> work;
    std::vector<char> has(nblocks, 0), queued(nblocks, 0);
    for (size_t b = 0; b < nblocks; ++b)
      if (defs[b][v]) {
        work.push_back(static_cast<BlockId>(b));
        queued[b] = 1;
      }
    while (!work.empty()) {
      BlockId b = work.back();
      work.pop_back();
      for (BlockId d : df[b]) {
        if (has[d] || !live_in[d][v]) continue;
        // An explicit parameter for the same local already merges it.
        auto& bp = f.blocks[d].params;
        if (std::find(bp.begin(), bp.end(), v) != bp.end()) continue;
        has[d] = 1;
        placed[d].push_back(v);
        if (!queued[d]) {
          queued[d] = 1;
          work.push_back(d);
        }
      }
    }
  }

  // Branches cannot pass arguments: route edges into blocks that gained
  // parameters through a fresh forwarding block.
  std::unordered_set<std::string> labels;
  for (auto& b : f.blocks) labels.insert(b.label);
  auto fresh_label = [&](const std::string& base) {
    std::string l = base + ".edge";
    for (unsigned i = 1; labels.count(l); ++i) l = fmt::format("{}.edge{}", base, i);
    labels.insert(l);
    return l;
  };
  for (size_t b = 0; b < nblocks; ++b) {
    Terminator& t = f.blocks[b].term;
    if (t.kind != Terminator::Kind::Branch) continue;
    for (BlockId* target : {&t.target, &t.other}) {
      if (placed[*target].empty()) continue;
      Block fwd;
      fwd.label = fresh_label(f.blocks[*target].label);
      fwd.term = Terminator::go(*target);
      fwd.term.span = t.span;
      fwd.span = t.span;
      f.blocks.push_back(std::move(fwd));
      placed.emplace_back();
      *target = static_cast<BlockId>(f.blocks.size() - 1);
    }
  }

  // Rename along the dominator tree.
  Cfg cfg2(f);
  auto kids = cfg2.dom_children();
  Function out;
  out.name = f.name;
  out.ret = f.ret;
  out.span = f.span;
  out.blocks.resize(f.blocks.size());
  std::unordered_set<std::string> used_names;
  auto new_value = [&](Var v) {
    const std::string& base = f.values[v].name;
    std::string name = base;
    for (unsigned i = 1; used_names.count(name); ++i) name = fmt::format("{}.{}", base, i);
    used_names.insert(name);
    return out.add_value(name, f.values[v].type);
  };
  std::vector<std::vector<ValueId>> stacks(nvars);
  for (Var v : f.params) {
    ValueId nv = new_value(v);
    out.params.push_back(nv);
    stacks[v].push_back(nv);
  }
  // Parameters created for placed locals, per block, in placement order.
  std::vector<std::vector<ValueId>> placed_ids(f.blocks.size());

  auto lookup = [&](const Operand& o, const std::string& where) -> Operand {
    if (!o.is_value()) return o;
    if (stacks[o.id].empty())
      throw SsaError(fmt::format("{}: local '{}' may be read before it is assigned ({})", f.name,
                                 f.values[o.id].name, where));
    return Operand::value(stacks[o.id].back());
  };

  std::function<void(BlockId)> walk = [&](BlockId b) {
    const Block& src = f.blocks[b];
    Block& dst = out.blocks[b];
    dst.label = src.label;
    dst.span = src.span;
    std::vector<Var> pushed;
    for (Var v : src.params) {
      ValueId nv = new_value(v);
      dst.params.push_back(nv);
      stacks[v].push_back(nv);
      pushed.push_back(v);
    }
    for (Var v : placed[b]) {
      ValueId nv = new_value(v);
      dst.params.push_back(nv);
      placed_ids[b].push_back(nv);
      stacks[v].push_back(nv);
      pushed.push_back(v);
    }
    for (auto& s : src.stmts) {
      Statement ns;
      ns.op = s.op;
      ns.span = s.span;
      for (auto& a : s.args) ns.args.push_back(lookup(a, src.label));
      if (s.result != kNoValue) {
        ns.result = new_value(s.result);
        stacks[s.result].push_back(ns.result);
        pushed.push_back(s.result);
      }
      dst.stmts.push_back(std::move(ns));
    }
    Terminator t = src.term;
    if (t.kind == Terminator::Kind::Branch || t.kind == Terminator::Kind::Return)
      t.value = lookup(t.value, src.label);
    for (auto& a : t.args) a = lookup(a, src.label);
    if (t.kind == Terminator::Kind::Goto)
      for (Var v : placed[t.target]) {
        if (stacks[v].empty())
          throw SsaError(fmt::format("{}: local '{}' may be read before it is assigned ({})", f.name,
                                     f.values[v].name, src.label));
        t.args.push_back(Operand::value(stacks[v].back()));
      }
    dst.term = std::move(t);
    for (BlockId k : kids[b]) walk(k);
    for (auto it = pushed.rbegin(); it != pushed.rend(); ++it) stacks[*it].pop_back();
  };
  if (!f.blocks.empty()) walk(0);
  return out;
}

void to_ssa(Program& p) {
  for (auto& f : p.functions) f = to_ssa(f, p);
  resolve_symbols(p);
}

}  // namespace isskit::mir
