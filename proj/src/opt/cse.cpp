#include <unordered_map>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/cfg.hpp"
#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

namespace {

struct Key {
  OpKind op;
  std::vector<Operand> args;
  friend bool operator==(const Key& a, const Key& b) { return a.op == b.op && a.args == b.args; }
};

struct KeyHash {
  size_t operator()(const Key& k) const {
    size_t h = static_cast<size_t>(k.op.code) * 0x9E3779B97F4A7C15ull;
    auto mix = [&](size_t x) { h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2); };
    for (auto i : k.op.ints) mix(std::hash<int64_t>()(i));
    mix(std::hash<std::string>()(k.op.name));
    for (auto& a : k.args) mix(a.is_value() ? std::hash<ValueId>()(a.id) : rt::hash_value(a.literal));
    return h;
  }
};

}  // namespace

size_t cse(Function& f, const Program& p) {
  (void)p;
  Cfg cfg(f);
  auto children = cfg.dom_children();
  Substitution sub;
  std::unordered_map<Key, ValueId, KeyHash> table;
  std::vector<Key> scope;
  size_t n = 0;

  // Dominator-tree walk; the second field is the scope height on entry.
  std::vector<std::pair<BlockId, size_t>> stack{{0, SIZE_MAX}};
  while (!stack.empty()) {
    auto& [b, mark] = stack.back();
    if (mark == SIZE_MAX) {
      mark = scope.size();
      Block& blk = f.blocks[b];
      std::vector<Statement> out;
      out.reserve(blk.stmts.size());
      for (auto& s : blk.stmts) {
        for (auto& a : s.args) a = sub.resolve(a);
        if (s.result == kNoValue || !is_mergeable(s.op)) {
          out.push_back(std::move(s));
          continue;
        }
        Key k{s.op, s.args};
        auto [it, fresh] = table.try_emplace(std::move(k), s.result);
        if (fresh) {
          scope.push_back(it->first);
          out.push_back(std::move(s));
        } else {
          sub.set(s.result, Operand::value(it->second));
          ++n;
        }
      }
      blk.stmts = std::move(out);
      BlockId self = b;
      for (auto it = children[self].rbegin(); it != children[self].rend(); ++it) stack.push_back({*it, SIZE_MAX});
      continue;
    }
    while (scope.size() > mark) {
      table.erase(scope.back());
      scope.pop_back();
    }
    stack.pop_back();
  }
  sub.apply(f);
  return n;
}

}  // namespace isskit::opt
