// Control-flow graph queries over a function's blocks.
#pragma once

#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::mir {

std::vector<BlockId> successors(const Block& b);

struct Cfg {
  std::vector<std::vector<BlockId>> preds;  // with multiplicity per edge
  std::vector<BlockId> rpo;                 // reachable blocks only
  std::vector<int> rpo_index;               // -1 for unreachable
  std::vector<BlockId> idom;                // idom[entry] == entry

  explicit Cfg(const Function& f);

  bool reachable(BlockId b) const { return rpo_index[b] >= 0; }
  bool dominates(BlockId a, BlockId b) const;
  // Children in the dominator tree, in RPO order.
  std::vector<std::vector<BlockId>> dom_children() const;
};

}  // namespace isskit::mir
