#include <gtest/gtest.h>

#include <fmt/format.h>

#include "isskit/mir/parser.hpp"
#include "isskit/mir/verify.hpp"
#include "isskit/opt/pipeline.hpp"
#include "support/differential.hpp"
#include "support/guest_fixture.hpp"

namespace isskit::opt {
namespace {

using mir::Opcode;

mir::Program ssa(const std::string& text) {
  mir::Program p = mir::parse_program(text);
  mir::to_ssa(p);
  auto d = mir::verify(p);
  EXPECT_TRUE(d.empty()) << (d.empty() ? "" : mir::to_string(d[0]));
  return p;
}

size_t count(const mir::Function& f, Opcode op) {
  size_t n = 0;
  for (auto& b : f.blocks)
    for (auto& s : b.stmts) n += s.op.code == op;
  return n;
}

size_t calls_to(const mir::Function& f, const std::string& callee) {
  size_t n = 0;
  for (auto& b : f.blocks)
    for (auto& s : b.stmts) n += s.op.code == Opcode::call && s.op.name == callee;
  return n;
}

void expect_same_behaviour(const mir::Program& before, const mir::Program& after) {
  auto d = testing::compare_programs(before, after, 200, 5);
  EXPECT_EQ(d.first_mismatch, "");
}

// ---- constant folding ----

TEST(ConstantFold, MachineAddition) {
  auto p = ssa("fn f() -> %i64 {\nentry:\n  x: %i64 = add_int_i64(2, 3)\n  return x\n}\n");
  mir::Function& f = p.functions[0];
  EXPECT_EQ(constant_fold(f, p), 1u);
  EXPECT_TRUE(f.blocks[0].stmts.empty());
  EXPECT_EQ(f.blocks[0].term.value.literal, rt::Value(rt::I64{5}));
}

TEST(ConstantFold, SignExtensionOfAllOnes) {
  auto p = ssa("fn f() -> %bv64 {\nentry:\n  x: %bv64 = sign_extend_bv_c<12,64>(0xFFF)\n  return x\n}\n");
  mir::Function& f = p.functions[0];
  constant_fold(f, p);
  EXPECT_EQ(f.blocks[0].term.value.literal, rt::Value(rt::Bits::make(64, ~uint64_t{0})));
}

TEST(ConstantFold, BranchOnLiteralBecomesGoto) {
  auto p = ssa(R"(
fn f(a: %bv8) -> %bv8 {
entry:
  branch true yes no
yes:
  return a
no:
  r: %bv8 = not_bits_bv_c<8>(a)
  return r
})");
  mir::Function& f = p.functions[0];
  EXPECT_GE(constant_fold(f, p), 1u);
  EXPECT_EQ(f.blocks[0].term.kind, mir::Terminator::Kind::Goto);
  EXPECT_EQ(f.blocks[f.blocks[0].term.target].label, "yes");
}

TEST(ConstantFold, TrappingFoldIsLeftInPlace) {
  auto p = ssa(R"(
fn f() -> %i64 {
entry:
  x: %i64 = add_int_i64(9223372036854775807, 1)
  return x
})");
  mir::Function& f = p.functions[0];
  EXPECT_EQ(constant_fold(f, p), 0u);
  EXPECT_EQ(count(f, Opcode::add_int_i64), 1u);
}

TEST(ConstantFold, CheckedCastOfWrongWidthLiteralIsADiagnostic) {
  auto p = ssa(R"(
fn f() -> %bv8 {
entry:
  x: %bv8 = cast_bv_from_generic<8>(0x0123)
  return x
})");
  mir::Function& f = p.functions[0];
  std::vector<std::string> diags;
  EXPECT_EQ(constant_fold(f, p, &diags), 0u);
  EXPECT_EQ(count(f, Opcode::cast_bv_from_generic), 1u);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].find("width"), std::string::npos) << diags[0];
}

// ---- dead code and common subexpressions ----

TEST(DeadCode, UnusedCastIsRemovedButRegisterReadsStay) {
  auto p = ssa(R"(
register x1: %bv64
fn f(a: %bv12) -> %unit {
entry:
  g: %bv = cast_bv_to_generic<12>(a)
  r: %bv64 = read_reg<x1>()
  return ()
})");
  mir::Function& f = p.functions[0];
  EXPECT_EQ(dead_code_elim(f, p), 1u);
  EXPECT_EQ(count(f, Opcode::cast_bv_to_generic), 0u);
  EXPECT_EQ(count(f, Opcode::read_reg), 1u);
}

TEST(DeadCode, UnreachableBlocksGo) {
  auto p = mir::parse_program(R"(
fn f(a: %bv8) -> %bv8 {
entry:
  return a
island:
  r: %bv8 = not_bits_bv_c<8>(a)
  return r
})");
  mir::Function& f = p.functions[0];
  EXPECT_GE(dead_code_elim(f, p), 1u);
  EXPECT_EQ(f.blocks.size(), 1u);
}

TEST(DeadCode, StraightLineBlocksMerge) {
  auto p = ssa(R"(
fn f(a: %bv8) -> %bv8 {
entry:
  x: %bv8 = not_bits_bv_c<8>(a)
  goto next(x)
next: (y: %bv8)
  z: %bv8 = add_bits_bv_c<8>(y, a)
  return z
})");
  mir::Function& f = p.functions[0];
  EXPECT_EQ(dead_code_elim(f, p), 1u);
  ASSERT_EQ(f.blocks.size(), 1u);
  EXPECT_EQ(f.blocks[0].stmts.size(), 2u);
  EXPECT_EQ(f.blocks[0].stmts[1].args[0], mir::Operand::value(f.blocks[0].stmts[0].result));
  EXPECT_TRUE(mir::verify(p).empty());
}

TEST(Cse, DuplicateSignedIsMerged) {
  auto p = ssa(R"(
fn f(x: %bv64) -> %i64 {
entry:
  a: %i64 = signed_bv_c<64>(x)
  b: %i64 = signed_bv_c<64>(x)
  s: %i64 = add_int_i64(a, b)
  return s
})");
  mir::Function& f = p.functions[0];
  EXPECT_EQ(cse(f, p), 1u);
  EXPECT_EQ(count(f, Opcode::signed_bv_c), 1u);
  const auto& add = f.blocks[0].stmts.back();
  EXPECT_EQ(add.args[0], add.args[1]);
}

TEST(Cse, RegisterReadsAroundAWriteAreBothKept) {
  const char* text = R"(
register x1: %bv64
fn f(v: %bv64) -> %bv64 {
entry:
  a: %bv64 = read_reg<x1>()
  write_reg<x1>(v)
  b: %bv64 = read_reg<x1>()
  s: %bv64 = xor_bits_bv_c<64>(a, b)
  return s
})";
  auto p = ssa(text);
  auto r = run_pipeline(p, PipelineConfig{});
  EXPECT_EQ(count(r.program.functions[0], Opcode::read_reg), 2u);
  expect_same_behaviour(p, r.program);
}

TEST(Cse, OnlyDominatingDuplicatesMerge) {
  auto p = ssa(R"(
fn f(c: %bool, x: %bv8) -> %bv8 {
entry:
  branch c yes no
yes:
  a: %bv8 = not_bits_bv_c<8>(x)
  goto join(a)
no:
  b: %bv8 = not_bits_bv_c<8>(x)
  goto join(b)
join: (r: %bv8)
  return r
})");
  EXPECT_EQ(cse(p.functions[0], p), 0u);
}

// ---- inlining ----

// A callee with `ops` statements spread over `blocks` blocks.
std::string sized_callee(unsigned ops, unsigned blocks) {
  std::string s = "fn callee(a: %bv64) -> %bv64 {\nentry:\n";
  unsigned per = ops / blocks, extra = ops % blocks;
  std::string last = "a";
  unsigned k = 0;
  for (unsigned b = 0; b < blocks; ++b) {
    if (b) s += fmt::format("b{}:\n", b);
    for (unsigned i = 0; i < per + (b < extra); ++i, ++k) {
      s += fmt::format("  t{}: %bv64 = add_bits_bv_c<64>({}, 0x0000000000000001)\n", k, last);
      last = fmt::format("t{}", k);
    }
    s += b + 1 < blocks ? fmt::format("  goto b{}\n", b + 1) : "  return " + last + "\n";
  }
  return s + "}\n";
}

mir::Program inline_fixture(unsigned ops, unsigned blocks) {
  return ssa(sized_callee(ops, blocks) +
             "fn caller(x: %bv64) -> %bv64 {\nentry:\n  r: %bv64 = callee(x)\n  return r\n}\n");
}

bool inlined(unsigned ops, unsigned blocks) {
  mir::Program p = inline_fixture(ops, blocks);
  EXPECT_EQ(statement_count(p.functions[0]), ops);
  EXPECT_EQ(p.functions[0].blocks.size(), blocks);
  PipelineConfig c = PipelineConfig::all_disabled();
  c.enable_inlining = true;
  auto r = run_pipeline(p, c);
  expect_same_behaviour(p, r.program);
  return calls_to(*r.program.find_function("caller"), "callee") == 0;
}

TEST(Inline, LimitIsSharp) {
  EXPECT_TRUE(inlined(25, 4));
  EXPECT_TRUE(inlined(25, 1));
  EXPECT_FALSE(inlined(26, 4));
  EXPECT_FALSE(inlined(26, 1));
  EXPECT_FALSE(inlined(20, 5));
}

TEST(Inline, RecursionIsNeverInlined) {
  auto p = ssa(R"(
fn down(n: %i64) -> %i64 {
entry:
  z: %bool = eq_int_i64(n, 0)
  branch z done more
done:
  return n
more:
  m: %i64 = sub_int_i64(n, 1)
  r: %i64 = down(m)
  return r
}
fn ping(n: %i64) -> %i64 {
entry:
  r: %i64 = pong(n)
  return r
}
fn pong(n: %i64) -> %i64 {
entry:
  z: %bool = eq_int_i64(n, 0)
  branch z done more
done:
  return n
more:
  m: %i64 = sub_int_i64(n, 1)
  r: %i64 = ping(m)
  return r
})");
  PipelineConfig c = PipelineConfig::all_disabled();
  c.enable_inlining = true;
  auto r = run_pipeline(p, c);
  EXPECT_EQ(r.report.total_changes(), 0u);
  std::string why;
  EXPECT_TRUE(mir::structurally_equal(p, r.program, &why)) << why;
}

TEST(Inline, LessThanHelperDisappearsFromSlti) {
  auto r = run_pipeline(testing::reference_model(), PipelineConfig{});
  const mir::Function* f = r.program.find_function("execute_ITYPE");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(calls_to(*f, "lt_s"), 0u);
  EXPECT_EQ(mir::count_generic_ops(*f), 0u);
  EXPECT_GE(count(*f, Opcode::lt_int_i64), 1u);
}

// ---- scalar replacement ----

TEST(ScalarReplace, UnionBuiltAndTakenApartInOneFunction) {
  auto p = ssa(R"(
union ast { ITYPE(%bv12, %bv5), HALT() }
fn f(imm: %bv12, rd: %bv5) -> %bv12 {
entry:
  u: %union ast = make_union<ITYPE>(imm, rd)
  t: %enum ast = union_tag(u)
  is_i: %bool = eq_enum(t, ast::ITYPE)
  branch is_i yes no
yes:
  v: %bv12 = union_field<ITYPE,0>(u)
  return v
no:
  return 0x000
})");
  auto r = run_pipeline(p, PipelineConfig{});
  const mir::Function& f = r.program.functions[0];
  EXPECT_EQ(count(f, Opcode::make_union), 0u);
  EXPECT_EQ(count(f, Opcode::union_field), 0u);
  EXPECT_EQ(f.blocks.size(), 1u);
  expect_same_behaviour(p, r.program);
}

TEST(ScalarReplace, EscapingAggregatesStay) {
  auto p = ssa(R"(
union ast { ITYPE(%bv12, %bv5), HALT() }
record pair { a: %bv8, b: %bv8 }
register last: %union ast
fn keep(r: %record pair) -> %bv8 {
entry:
  x: %bv8 = record_get<a>(r)
  y: %bv8 = record_get<b>(r)
  z: %bv8 = xor_bits_bv_c<8>(x, y)
  w: %bv8 = add_bits_bv_c<8>(z, x)
  v: %bv8 = add_bits_bv_c<8>(w, y)
  u: %bv8 = add_bits_bv_c<8>(v, z)
  t: %bv8 = add_bits_bv_c<8>(u, w)
  s: %bv8 = add_bits_bv_c<8>(t, v)
  return s
}
fn f(imm: %bv12, rd: %bv5, a: %bv8) -> %bv8 {
entry:
  u: %union ast = make_union<ITYPE>(imm, rd)
  write_reg<last>(u)
  r: %record pair = record_make<pair>(a, a)
  s: %bv8 = keep(r)
  return s
})");
  PipelineConfig c;
  c.enable_inlining = false;
  auto r = run_pipeline(p, c);
  const mir::Function& f = *r.program.find_function("f");
  EXPECT_EQ(count(f, Opcode::make_union), 1u);
  EXPECT_EQ(count(f, Opcode::record_make), 1u);
}

// ---- bitvector and integer rewrites ----

TEST(Rewrite, SignExtensionChainBecomesOneStatement) {
  auto p = ssa(R"(
fn f(imm: %bv12) -> %bv64 {
entry:
  a: %bv = cast_bv_to_generic<12>(imm)
  b: %bv = sign_extend(a, 64)
  c: %bv64 = cast_bv_from_generic<64>(b)
  return c
})");
  auto r = run_pipeline(p, PipelineConfig{});
  const mir::Function& f = r.program.functions[0];
  ASSERT_EQ(statement_count(f), 1u) << mir::pretty_print(r.program);
  EXPECT_EQ(to_string(f.blocks[0].stmts[0].op), "sign_extend_bv_c<12,64>");
  EXPECT_EQ(mir::count_generic_ops(f), 0u);
  expect_same_behaviour(p, r.program);
}

TEST(Rewrite, SignedComparisonMovesToMachineIntegers) {
  auto p = ssa(R"(
fn f(a: %bv64, b: %bv64) -> %bool {
entry:
  ga: %bv = cast_bv_to_generic<64>(a)
  gb: %bv = cast_bv_to_generic<64>(b)
  sa: %i = signed(ga)
  sb: %i = signed(gb)
  c: %bool = lt_int(sa, sb)
  return c
})");
  auto r = run_pipeline(p, PipelineConfig{});
  const mir::Function& f = r.program.functions[0];
  EXPECT_EQ(count(f, Opcode::lt_int_i64), 1u);
  EXPECT_EQ(count(f, Opcode::signed_bv_c), 2u);
  EXPECT_EQ(mir::count_generic_ops(f), 0u);
  expect_same_behaviour(p, r.program);
}

TEST(Rewrite, UnknownWidthsAreLeftAlone) {
  auto p = ssa(R"(
fn f(a: %bv, b: %bv) -> %bv {
entry:
  s: %bv = add_bits(a, b)
  return s
})");
  EXPECT_EQ(rewrite_bv_int(p.functions[0], p), 0u);
}

TEST(Rewrite, UnsignedOf64BitsStaysGeneric) {
  auto p = ssa(R"(
fn f(a: %bv64) -> %i {
entry:
  g: %bv = cast_bv_to_generic<64>(a)
  u: %i = unsigned(g)
  return u
})");
  EXPECT_EQ(rewrite_bv_int(p.functions[0], p), 0u);
  EXPECT_EQ(count(p.functions[0], Opcode::unsigned_), 1u);
}

// ---- specialization ----

const char* kGenericCallee = R"(
fn widen(x: %bv) -> %bv {
entry:
  n: %bv = not_bits(x)
  a: %bv = and_bits(n, x)
  o: %bv = or_bits(a, n)
  y: %bv = xor_bits(o, x)
  z: %bv = add_bits(y, n)
  q: %bv = sub_bits(z, a)
  n2: %bv = not_bits(q)
  a2: %bv = and_bits(n2, y)
  o2: %bv = or_bits(a2, z)
  y2: %bv = xor_bits(o2, q)
  z2: %bv = add_bits(y2, n2)
  q2: %bv = sub_bits(z2, a2)
  n3: %bv = not_bits(q2)
  a3: %bv = and_bits(n3, y2)
  o3: %bv = or_bits(a3, z2)
  y3: %bv = xor_bits(o3, q2)
  z3: %bv = add_bits(y3, n3)
  q3: %bv = sub_bits(z3, a3)
  n4: %bv = not_bits(q3)
  a4: %bv = and_bits(n4, y3)
  o4: %bv = or_bits(a4, z3)
  y4: %bv = xor_bits(o4, q3)
  z4: %bv = add_bits(y4, n4)
  q4: %bv = sub_bits(z4, a4)
  n5: %bv = not_bits(q4)
  a5: %bv = and_bits(n5, y4)
  return a5
}
)";

TEST(Specialize, CastArgumentGetsAClone) {
  auto p = ssa(std::string(kGenericCallee) + R"(
fn caller(v: %bv32) -> %bv32 {
entry:
  g: %bv = cast_bv_to_generic<32>(v)
  r: %bv = widen(g)
  out: %bv32 = cast_bv_from_generic<32>(r)
  return out
})");
  ASSERT_EQ(statement_count(p.functions[0]), 26u);
  auto r = run_pipeline(p, PipelineConfig{});
  const mir::Function* clone = r.program.find_function("widen@bv32");
  ASSERT_NE(clone, nullptr) << r.report.table();
  EXPECT_EQ(clone->values[clone->params[0]].type, mir::Type::bv(32));
  EXPECT_EQ(clone->ret, mir::Type::bv(32));
  EXPECT_EQ(mir::count_generic_ops(*clone), 0u);
  const mir::Function& caller = *r.program.find_function("caller");
  EXPECT_EQ(calls_to(caller, "widen@bv32"), 1u);
  EXPECT_EQ(mir::count_generic_ops(caller), 0u);
  EXPECT_TRUE(r.report.cost.at("widen@bv32").created);
  expect_same_behaviour(p, r.program);
}

TEST(Specialize, SpecificArgumentsNeedNoClone) {
  auto p = ssa(R"(
fn callee(x: %bv64, n: %i64) -> %bv64 {
entry:
  a: %bv64 = add_bits_bv_c<64>(x, x)
  b: %bv64 = shiftl_bv_c<64>(a, n)
  return b
}
fn caller(v: %bv64) -> %bv64 {
entry:
  r: %bv64 = callee(v, 3)
  return r
})");
  PipelineConfig c;
  c.enable_inlining = false;
  auto r = run_pipeline(p, c);
  EXPECT_EQ(r.program.functions.size(), 2u);
  EXPECT_EQ(r.report.changes("caller", "specialize"), 0u);
}

TEST(Specialize, NinthWidthStaysGeneric) {
  std::string text = kGenericCallee;
  text += "fn caller(";
  for (unsigned w = 1; w <= 9; ++w) text += fmt::format("{}v{}: %bv{}", w > 1 ? ", " : "", w, w);
  text += ") -> %unit {\nentry:\n";
  for (unsigned w = 1; w <= 9; ++w)
    text += fmt::format("  g{0}: %bv = cast_bv_to_generic<{0}>(v{0})\n  r{0}: %bv = widen(g{0})\n", w);
  text += "  return ()\n}\n";
  auto p = ssa(text);
  auto r = run_pipeline(p, PipelineConfig{});
  const mir::Function& caller = *r.program.find_function("caller");
  for (unsigned w = 1; w <= 8; ++w) {
    EXPECT_NE(r.program.find_function(fmt::format("widen@bv{}", w)), nullptr) << w;
    EXPECT_EQ(calls_to(caller, fmt::format("widen@bv{}", w)), 1u) << w;
  }
  EXPECT_EQ(r.program.find_function("widen@bv9"), nullptr);
  EXPECT_EQ(calls_to(caller, "widen"), 1u);
  expect_same_behaviour(p, r.program);
}

// ---- the whole pipeline on the corpus model ----

TEST(Pipeline, HotExecuteClausesLoseEveryGenericOp) {
  auto r = run_pipeline(testing::reference_model(), PipelineConfig{});
  EXPECT_TRUE(r.report.converged);
  for (const char* name : {"execute_ITYPE", "execute_RTYPE", "execute_BRANCH"}) {
    const mir::Function* f = r.program.find_function(name);
    ASSERT_NE(f, nullptr) << name;
    EXPECT_EQ(mir::count_generic_ops(*f), 0u) << mir::pretty_print(*f, r.program);
    EXPECT_GT(r.report.cost.at(name).before, 0u) << name;
  }
}

TEST(Pipeline, LoadClauseKeepsAGenericOp) {
  auto r = run_pipeline(testing::reference_model(), PipelineConfig{});
  EXPECT_GE(mir::count_generic_ops(*r.program.find_function("execute_LOAD")), 1u);
}

TEST(Pipeline, ReportTableHasOneLinePerFunctionPass) {
  auto r = run_pipeline(testing::reference_model(), PipelineConfig{});
  std::string t = r.report.table();
  EXPECT_EQ(t.rfind("# rounds ", 0), 0u);
  EXPECT_NE(t.find("converged"), std::string::npos);
  EXPECT_NE(t.find("function"), std::string::npos);
  EXPECT_NE(t.find("\nexecute_ITYPE "), std::string::npos);
  size_t rows = 0;
  for (char ch : t) rows += ch == '\n';
  EXPECT_GE(rows, r.report.passes.size() + 2);
}

TEST(Pipeline, RoundBudgetExhaustionIsADiagnostic) {
  PipelineConfig c;
  c.max_fixpoint_rounds = 1;
  auto r = run_pipeline(testing::reference_model(), c);
  EXPECT_FALSE(r.report.converged);
  ASSERT_FALSE(r.report.diagnostics.empty());
  EXPECT_NE(r.report.diagnostics.back().find("fixpoint"), std::string::npos);
}

TEST(Pipeline, VerifyingEveryPassFindsNothing) {
  PipelineConfig c;
  c.verify_each_pass = true;
  EXPECT_NO_THROW(run_pipeline(testing::reference_model(), c));
}

}  // namespace
}  // namespace isskit::opt
