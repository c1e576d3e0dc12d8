#include "isskit/mir/cfg.hpp"

namespace isskit::mir {

std::vector<BlockId> successors(const Block& b) {
  switch (b.term.kind) {
    case Terminator::Kind::Goto: return {b.term.target};
    case Terminator::Kind::Branch: return {b.term.target, b.term.other};
    default: return {};
  }
}

Cfg::Cfg(const Function& f) {
  size_t n = f.blocks.size();
  preds.assign(n, {});
  rpo_index.assign(n, -1);
  idom.assign(n, 0);
  if (n == 0) return;
  for (size_t b = 0; b < n; ++b)
    for (BlockId s : successors(f.blocks[b]))
      if (s < n) preds[s].push_back(static_cast<BlockId>(b));

  // Iterative post-order DFS from the entry.
  std::vector<BlockId> post;
  std::vector<char> seen(n, 0);
  std::vector<std::pair<BlockId, size_t>> stack{{0, 0}};
  seen[0] = 1;
  while (!stack.empty()) {
    auto& [b, i] = stack.back();
    auto succ = successors(f.blocks[b]);
    if (i < succ.size()) {
      BlockId s = succ[i++];
      if (s < n && !seen[s]) {
        seen[s] = 1;
        stack.push_back({s, 0});
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  rpo.assign(post.rbegin(), post.rend());
  for (size_t i = 0; i < rpo.size(); ++i) rpo_index[rpo[i]] = static_cast<int>(i);

  // Cooper, Harvey & Kennedy.
  std::vector<int> doms(n, -1);
  doms[0] = 0;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo_index[a] > rpo_index[b]) a = doms[a];
      while (rpo_index[b] > rpo_index[a]) b = doms[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 1; i < rpo.size(); ++i) {
      BlockId b = rpo[i];
      int nd = -1;
      for (BlockId p : preds[b]) {
        if (!reachable(p) || doms[p] < 0) continue;
        nd = nd < 0 ? static_cast<int>(p) : intersect(static_cast<int>(p), nd);
      }
      if (nd != doms[b]) {
        doms[b] = nd;
        changed = true;
      }
    }
  }
  for (size_t b = 0; b < n; ++b) idom[b] = doms[b] < 0 ? static_cast<BlockId>(b) : doms[b];
}

bool Cfg::dominates(BlockId a, BlockId b) const {
  if (!reachable(a) || !reachable(b)) return false;
  while (true) {
    if (a == b) return true;
    if (b == 0) return false;
    b = idom[b];
  }
}

std::vector<std::vector<BlockId>> Cfg::dom_children() const {
  std::vector<std::vector<BlockId>> kids(preds.size());
  for (size_t i = 1; i < rpo.size(); ++i) kids[idom[rpo[i]]].push_back(rpo[i]);
  return kids;
}

}  // namespace isskit::mir
