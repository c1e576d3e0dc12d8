#include <gtest/gtest.h>

#include <random>

#include "isskit/opt/pipeline.hpp"
#include "support/decode_oracle.hpp"
#include "support/guest_fixture.hpp"

namespace isskit {
namespace {

using testing::reference_model;

const mir::Program& full_model() {
  static const mir::Program p = opt::run_pipeline(reference_model(), {}).program;
  return p;
}

constexpr uint64_t kData = 0x10'0000;

uint64_t sext(uint64_t v, unsigned bits) {
  uint64_t m = uint64_t{1} << (bits - 1);
  v &= (bits == 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1);
  return (v ^ m) - m;
}

struct Machine {
  uint64_t x[32] = {};
  uint64_t pc = guest::kOrigin;
  std::map<uint64_t, uint8_t> mem;
  bool trapped = false;
};

// Plain RV64 semantics for one instruction.
void reference_step(Machine& m, const guest::Instruction& in) {
  const std::string& op = in.mnemonic;
  uint64_t a = m.x[in.rs1], b = m.x[in.rs2], imm = static_cast<uint64_t>(in.imm), next = m.pc + 4, r = 0;
  bool writes = true;
  auto lt = [](uint64_t p, uint64_t q) { return int64_t(p) < int64_t(q); };
  if (op == "addi") r = a + imm;
  else if (op == "slti") r = lt(a, imm);
  else if (op == "sltiu") r = a < imm;
  else if (op == "xori") r = a ^ imm;
  else if (op == "ori") r = a | imm;
  else if (op == "andi") r = a & imm;
  else if (op == "add") r = a + b;
  else if (op == "sub") r = a - b;
  else if (op == "sll") r = a << (b & 63);
  else if (op == "slt") r = lt(a, b);
  else if (op == "sltu") r = a < b;
  else if (op == "xor") r = a ^ b;
  else if (op == "srl") r = a >> (b & 63);
  else if (op == "sra") r = uint64_t(int64_t(a) >> (b & 63));
  else if (op == "or") r = a | b;
  else if (op == "and") r = a & b;
  else if (op == "mulw") r = sext(uint64_t(int64_t(int32_t(a)) * int64_t(int32_t(b))), 32);
  else if (op == "lui") r = sext(imm << 12, 32);
  else if (op == "jal") r = next, next = m.pc + imm;
  else if (op[0] == 'l' || op[0] == 's') {
    unsigned size = 1u << (op[1] == 'b' ? 0 : op[1] == 'h' ? 1 : op[1] == 'w' ? 2 : 3);
    uint64_t addr = a + imm;
    if (addr % size) {
      m.trapped = true;
      return;
    }
    if (op[0] == 's') {
      for (unsigned k = 0; k < size; ++k) m.mem[addr + k] = uint8_t(b >> (8 * k));
      writes = false;
    } else {
      for (unsigned k = 0; k < size; ++k) r |= uint64_t(m.mem.count(addr + k) ? m.mem[addr + k] : 0) << (8 * k);
      if (op.back() != 'u') r = sext(r, 8 * size);
    }
  } else {
    bool taken = op == "beq"    ? a == b
                 : op == "bne"  ? a != b
                 : op == "blt"  ? lt(a, b)
                 : op == "bge"  ? !lt(a, b)
                 : op == "bltu" ? a < b
                                : a >= b;
    if (taken) next = m.pc + imm;
    writes = false;
  }
  if (next % 4) {
    m.trapped = true;
    return;
  }
  if (writes && in.rd) m.x[in.rd] = r;
  m.pc = next;
}

// Interesting register values: small, boundary and random.
uint64_t pick(std::mt19937_64& rng) {
  static const uint64_t edges[] = {0, 1, 2, 7, 8, 63, 64, 0x7FFFFFFF, 0x80000000, 0xFFFFFFFF,
                                   0x7FFFFFFFFFFFFFFF, 0x8000000000000000, ~uint64_t{0}, kData};
  if (rng() % 3 == 0) return edges[rng() % std::size(edges)];
  return rng() % 2 ? rng() : kData + (rng() % 256) * 8 + (rng() % 8);
}

class Semantics : public ::testing::TestWithParam<bool> {};

TEST_P(Semantics, EveryInstructionMatchesPlainRv64) {
  const mir::Program& p = GetParam() ? full_model() : reference_model();
  std::mt19937_64 rng(7);
  unsigned runs = 0, traps = 0;
  for (auto& mn : guest::mnemonics()) {
    if (mn == "ebreak") continue;
    for (uint64_t seed = 0; seed < 60; ++seed) {
      auto in = testing::random_instruction(mn, seed * 977 + 3);
      Machine want;
      for (unsigned r = 1; r < 32; ++r) want.x[r] = pick(rng);
      // Memory operands near the data area most of the time.
      bool load = mn[0] == 'l' && mn != "lui", store = mn[0] == 's' && mn.size() == 2;
      if (load || store) {
        in.imm = int64_t(rng() % 64) - 32;
        want.x[in.rs1] = in.rs1 ? kData + (rng() % 64) * 8 + (rng() % 4 == 0 ? rng() % 8 : 0) : 0;
      }
      for (unsigned k = 0; k < 64; ++k) want.mem[kData + k] = uint8_t(rng());
      in.word = guest::encode(in);

      interp::SimConfig cfg;
      cfg.budget = 1;
      interp::Simulator sim(p, cfg);
      sim.load(guest::kOrigin, std::vector<uint8_t>{uint8_t(in.word), uint8_t(in.word >> 8),
                                                    uint8_t(in.word >> 16), uint8_t(in.word >> 24)});
      for (auto& [addr, byte] : want.mem) sim.memory().write(addr, 1, byte);
      sim.set_pc(guest::kOrigin);
      for (unsigned r = 1; r < 32; ++r) sim.state().set_reg(p, "x" + std::to_string(r), rt::Bits::make(64, want.x[r]));
      if ((load || store) && in.rs1 == 0) continue;  // x0-relative addresses fall outside memory

      bool trapped = false;
      try {
        sim.run();
      } catch (const interp::Trap&) {
        trapped = true;
      }
      Machine start = want;
      reference_step(want, in);
      ++runs;
      traps += trapped;
      ASSERT_EQ(trapped, want.trapped) << mn << " seed " << seed;
      if (trapped) continue;
      for (unsigned r = 1; r < 32; ++r)
        ASSERT_EQ(sim.state().reg(p, "x" + std::to_string(r)).as<rt::Bits>().bits, want.x[r])
            << mn << " x" << r << " seed " << seed << " rs1=" << std::hex << start.x[in.rs1] << " rs2=" << start.x[in.rs2]
            << " imm=" << std::dec << in.imm;
      ASSERT_EQ(sim.state().pc(), want.pc) << mn << " seed " << seed;
      for (auto& [addr, byte] : want.mem) ASSERT_EQ(sim.memory().read(addr, 1), byte) << mn << " @" << std::hex << addr;
    }
  }
  EXPECT_GT(runs, 2000u);
  EXPECT_GT(traps, 0u);
}

INSTANTIATE_TEST_SUITE_P(Models, Semantics, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "Optimized" : "Reference"; });

TEST(Model, ZeroRegisterIgnoresWrites) {
  auto o = testing::run_guest(reference_model(), guest::assemble("addi x0, x0, 5\nadd x1, x0, x0\nhalt"), {});
  ASSERT_FALSE(o.trapped);
  EXPECT_EQ(o.state.reg(reference_model(), "x1").as<rt::Bits>().bits, 0u);
}

TEST(Model, IllegalInstructionTraps) {
  auto o = testing::run_guest(reference_model(), guest::assemble(".word 0xFFFFFFFF"), {});
  EXPECT_TRUE(o.trapped);
  EXPECT_EQ(o.trap.pc, guest::kOrigin);
}

TEST(Model, HotExecuteClausesLoseEveryGenericOp) {
  auto r = opt::run_pipeline(reference_model(), {});
  for (const char* f : {"execute_ITYPE", "execute_RTYPE", "execute_BRANCH"})
    EXPECT_EQ(r.report.cost.at(f).after, 0u) << f;
  EXPECT_GE(r.report.cost.at("execute_LOAD").after, 1u);
}

TEST(Model, AddiLoopAllocatesNothingWhenInterpreted) {
  interp::SimConfig cfg;
  cfg.budget = 1 + 2 * 10'000;
  auto o = testing::run_guest(full_model(), testing::guest_program("addi_loop"), cfg);
  EXPECT_EQ(o.stats.generic_allocations, 0u);
  EXPECT_EQ(o.stats.traces_compiled, 0u);
  auto raw = testing::run_guest(reference_model(), testing::guest_program("addi_loop"), cfg);
  EXPECT_GT(raw.stats.generic_allocations, 10'000u);
}

}  // namespace
}  // namespace isskit
