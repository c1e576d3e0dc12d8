#include "isskit/analysis/range.hpp"
#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

size_t range_narrowing(Function& f, const Program& p) { return analysis::narrow(f, p, analysis::analyze(f, p)); }

// Projections of a union or record built in the same function read the
// construction's operands directly. Once nothing reads the aggregate, dead
// code elimination drops its construction, so only non-escaping aggregates
// disappear.
size_t scalar_replace(Function& f, const Program& p) {
  DefMap defs(f);
  Substitution sub;
  size_t n = 0;
  for (auto& b : f.blocks) {
    for (auto& s : b.stmts) {
      for (auto& a : s.args) a = sub.resolve(a);
      if (s.result == kNoValue || s.args.empty()) continue;
      const Statement* d = defs.def(s.args[0]);
      if (!d) continue;
      switch (s.op.code) {
        case Opcode::union_tag:
          if (d->op.code == Opcode::make_union && d->op.sym < p.unions.size()) {
            sub.set(s.result, Operand::lit(rt::EnumVal{p.unions[d->op.sym].tag_enum, d->op.sym2}));
            ++n;
          }
          break;
        case Opcode::union_field:
          if (d->op.code == Opcode::make_union && d->op.sym == s.op.sym && d->op.sym2 == s.op.sym2) {
            sub.set(s.result, d->args[s.op.ints[0]]);
            ++n;
          }
          break;
        case Opcode::record_get:
          if (d->op.code == Opcode::record_make && s.op.sym2 < d->args.size()) {
            sub.set(s.result, d->args[s.op.sym2]);
            ++n;
          } else if (d->op.code == Opcode::record_set) {
            if (d->op.sym2 == s.op.sym2) sub.set(s.result, d->args[1]);
            else s.args[0] = d->args[0];
            ++n;
          }
          break;
        default:
          break;
      }
    }
  }
  // Forwarded projections go now: a matching union_field cannot trap, but
  // dead code elimination would not know that.
  for (auto& b : f.blocks)
    std::erase_if(b.stmts, [&](const Statement& s) {
      return s.result != kNoValue && sub.resolve(Operand::value(s.result)).id != s.result;
    });
  sub.apply(f);
  return n;
}

}  // namespace isskit::opt
