#include <fmt/format.h>

#include "isskit/opt/edit.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::opt {

using namespace mir;

namespace {

// What a call site knows about one generic argument.
struct Narrowed {
  Type type;
  Operand value;
};

std::optional<Narrowed> narrow_argument(const Type& param, const Operand& arg, const DefMap& defs) {
  if (param.kind == TypeKind::BvGeneric) {
    if (arg.is_literal()) {
      if (auto g = arg.literal.get_if<rt::GenericBits>(); g && g->width >= 1 && g->width <= 64)
        return Narrowed{Type::bv(g->width), Operand::lit(rt::Bits::make(g->width, static_cast<uint64_t>(g->bits)))};
      return std::nullopt;
    }
    if (auto d = defs.def_if(arg, Opcode::cast_bv_to_generic))
      return Narrowed{Type::bv(static_cast<unsigned>(d->op.ints[0])), d->args[0]};
  } else if (param.kind == TypeKind::IntGeneric) {
    if (arg.is_literal()) {
      if (auto n = arg.literal.get_if<rt::GenericInt>())
        if (auto v = n->as_i64()) return Narrowed{Type::i64(), Operand::lit(rt::I64{*v})};
      return std::nullopt;
    }
    if (auto d = defs.def_if(arg, Opcode::cast_i64_to_int)) return Narrowed{Type::i64(), d->args[0]};
  }
  return std::nullopt;
}

std::string tag(const Type& t) {
  if (t.kind == TypeKind::BvFixed) return fmt::format("bv{}", t.width);
  if (t.kind == TypeKind::IntMachine) return "i64";
  return "_";
}

// The original callee a clone was made from: "f@bv13" -> "f".
std::string origin_of(const std::string& name) { return name.substr(0, name.find('@')); }

Function make_clone(const Function& callee, const std::string& name, const std::vector<std::optional<Narrowed>>& args) {
  Function g = callee;
  g.name = name;
  std::vector<Statement> prologue;
  for (size_t k = 0; k < args.size(); ++k) {
    if (!args[k]) continue;
    ValueId old = g.params[k];
    std::string orig = g.values[old].name;
    g.values[old].name = g.fresh_name(orig + ".g");
    ValueId np = g.add_value(orig, args[k]->type);
    g.params[k] = np;
    Statement s;
    s.result = old;
    if (args[k]->type.kind == TypeKind::BvFixed)
      s.op = make_op(Opcode::cast_bv_to_generic, {args[k]->type.width});
    else
      s.op = make_op(Opcode::cast_i64_to_int);
    s.args = {Operand::value(np)};
    prologue.push_back(std::move(s));
  }
  auto& entry = g.blocks[0].stmts;
  entry.insert(entry.begin(), std::make_move_iterator(prologue.begin()), std::make_move_iterator(prologue.end()));
  return g;
}

// A clone whose every return hands back a cast from one fixed type returns
// that type instead; its call sites re-cast the result.
size_t narrow_return(Program& p, size_t gi) {
  Function& g = p.functions[gi];
  if (!g.ret.is_generic()) return 0;
  DefMap defs(g);
  std::optional<Type> common;
  std::vector<Operand> inner;
  for (auto& b : g.blocks) {
    if (b.term.kind != Terminator::Kind::Return) continue;
    auto n = narrow_argument(g.ret, b.term.value, defs);
    if (!n || (common && *common != n->type)) return 0;
    common = n->type;
    inner.push_back(n->value);
  }
  if (!common) return 0;
  size_t k = 0;
  for (auto& b : g.blocks)
    if (b.term.kind == Terminator::Kind::Return) b.term.value = inner[k++];
  g.ret = *common;

  size_t n = 0;
  for (auto& f : p.functions)
    for (auto& b : f.blocks) {
      std::vector<Statement> out;
      for (auto& s : b.stmts) {
        if (s.op.code != Opcode::call || s.op.sym != gi || s.result == kNoValue) {
          out.push_back(std::move(s));
          continue;
        }
        ValueId r = s.result;
        s.result = f.add_value(f.fresh_name(f.values[r].name + ".n"), *common);
        ValueId narrowed = s.result;
        out.push_back(std::move(s));
        Statement cast;
        cast.result = r;
        cast.op = common->kind == TypeKind::BvFixed ? make_op(Opcode::cast_bv_to_generic, {common->width})
                                                    : make_op(Opcode::cast_i64_to_int);
        cast.args = {Operand::value(narrowed)};
        out.push_back(std::move(cast));
        ++n;
      }
      b.stmts = std::move(out);
    }
  return n + 1;
}

}  // namespace

ChangeCounts specialize_functions(Program& p, const PipelineConfig& config, SpecializationCache& cache) {
  ChangeCounts changes;
  // Clones already in the program count against the cap and are reused, so
  // a second pipeline run makes no new ones.
  for (auto& f : p.functions)
    if (f.name.find('@') != std::string::npos && !cache.clones.count(f.name)) {
      cache.clones[f.name] = f.name;
      ++cache.variants[origin_of(f.name)];
    }

  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    DefMap defs(p.functions[fi]);
    for (size_t bi = 0; bi < p.functions[fi].blocks.size(); ++bi) {
      for (size_t si = 0; si < p.functions[fi].blocks[bi].stmts.size(); ++si) {
        const Statement& s = p.functions[fi].blocks[bi].stmts[si];
        if (s.op.code != Opcode::call || s.op.sym >= p.functions.size()) continue;
        uint32_t ci = s.op.sym;
        std::vector<std::optional<Narrowed>> args;
        std::string sig;
        bool any = false;
        {
          const Function& callee = p.functions[ci];
          for (size_t k = 0; k < callee.params.size(); ++k) {
            args.push_back(narrow_argument(callee.values[callee.params[k]].type, s.args[k], defs));
            any |= args.back().has_value();
            sig += (k ? "." : "") + (args.back() ? tag(args.back()->type) : std::string("_"));
          }
        }
        if (!any) continue;
        std::string key = p.functions[ci].name + "@" + sig;
        std::string origin = origin_of(p.functions[ci].name);
        if (!cache.clones.count(key)) {
          if (cache.variants[origin] >= config.max_variants) continue;
          Function g = make_clone(p.functions[ci], key, args);
          p.functions.push_back(std::move(g));
          p.reindex();
          resolve_symbols(p.functions.back(), p);
          // A clone is only worth having with its body typed for its arguments,
          // whether or not the general rewrites are enabled.
          rewrite_bv_int(p.functions.back(), p);
          resolve_symbols(p.functions.back(), p);
          cache.clones[key] = key;
          ++cache.variants[origin];
        }
        uint32_t target = p.function_index.at(cache.clones[key]);
        Statement& call = p.functions[fi].blocks[bi].stmts[si];
        call.op.name = cache.clones[key];
        call.op.sym = target;
        for (size_t k = 0; k < args.size(); ++k)
          if (args[k]) call.args[k] = args[k]->value;
        ++changes[p.functions[fi].name];
      }
    }
  }

  for (size_t gi = 0; gi < p.functions.size(); ++gi)
    if (p.functions[gi].name.find('@') != std::string::npos)
      if (size_t n = narrow_return(p, gi)) changes[p.functions[gi].name] += n;
  return changes;
}

}  // namespace isskit::opt
