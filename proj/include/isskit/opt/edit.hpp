// Small utilities shared by the MIR rewriting passes.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::opt {

// Defining statement per value; nullptr for parameters and unknown values.
// Pointers stay valid while the owning statement vectors are not
// reallocated, so passes that rebuild a block reserve its replacement first.
class DefMap {
 public:
  explicit DefMap(const mir::Function& f);

  const mir::Statement* def(mir::ValueId v) const {
    return v < defs_.size() ? defs_[v] : nullptr;
  }
  const mir::Statement* def(const mir::Operand& o) const {
    return o.is_value() ? def(o.id) : nullptr;
  }
  // The defining statement if it is `code`.
  const mir::Statement* def_if(const mir::Operand& o, mir::Opcode code) const;
  void set(mir::ValueId v, const mir::Statement* s);

 private:
  std::vector<const mir::Statement*> defs_;
};

// Pending value replacements. Chains resolve to their final operand.
class Substitution {
 public:
  void set(mir::ValueId from, mir::Operand to) { map_[from] = std::move(to); }
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  mir::Operand resolve(const mir::Operand& o) const;
  // Rewrite every operand of `f`. Returns the number of operands changed.
  size_t apply(mir::Function& f) const;

 private:
  std::unordered_map<mir::ValueId, mir::Operand> map_;
};

// Append a statement `name: type = op(args)` to `out`. Returns the new value.
mir::ValueId emit(mir::Function& f, std::vector<mir::Statement>& out, const std::string& name,
                  mir::Type type, mir::OpKind op, std::vector<mir::Operand> args);

std::string fresh_label(const mir::Function& f, const std::string& base);

// Drop value entries no longer defined anywhere and renumber the rest.
void compact_values(mir::Function& f);

// Remove unreachable blocks and renumber. Returns the number removed.
size_t remove_unreachable_blocks(mir::Function& f);

// Fold a block into its only predecessor when that predecessor ends in a
// goto to it. Returns the number of blocks merged.
size_t merge_blocks(mir::Function& f);

}  // namespace isskit::opt
