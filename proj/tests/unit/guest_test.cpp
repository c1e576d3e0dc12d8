#include <gtest/gtest.h>

#include "isskit/guest/generator.hpp"
#include "support/decode_oracle.hpp"
#include "support/guest_fixture.hpp"

namespace isskit {
namespace {

using guest::assemble;
using guest::AsmError;
using testing::reference_model;

uint32_t only_word(const std::string& text) {
  auto a = assemble(text);
  EXPECT_EQ(a.instructions.size(), 1u);
  return a.instructions.at(0).word;
}

uint32_t field(uint32_t w, unsigned hi, unsigned lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1); }

TEST(Assembler, AddiFieldLayout) {
  uint32_t w = only_word("addi x20, x20, 8");
  EXPECT_EQ(field(w, 6, 0), 0b0010011u);
  EXPECT_EQ(field(w, 14, 12), 0b000u);
  EXPECT_EQ(field(w, 11, 7), 20u);
  EXPECT_EQ(field(w, 19, 15), 20u);
  EXPECT_EQ(field(w, 31, 20), 8u);
}

TEST(Assembler, XoriFunct3) { EXPECT_EQ(field(only_word("xori x1, x2, 5"), 14, 12), 0b100u); }

TEST(Assembler, NegativeImmediateIsTwosComplement) {
  EXPECT_EQ(field(only_word("addi a0, a0, -1"), 31, 20), 0xFFFu);
}

TEST(Assembler, HaltIsEbreak) { EXPECT_EQ(only_word("halt"), guest::kHaltWord); }

TEST(Assembler, EmptyProgramIsEmpty) {
  auto a = assemble("");
  EXPECT_TRUE(a.bytes.empty());
  EXPECT_TRUE(a.instructions.empty());
  EXPECT_TRUE(assemble("  # only a comment\n\n").bytes.empty());
}

TEST(Assembler, WordsAreLittleEndian) {
  auto a = assemble("halt");
  ASSERT_EQ(a.bytes.size(), 4u);
  EXPECT_EQ(a.bytes[0], 0x73);
  EXPECT_EQ(a.bytes[2], 0x10);
}

TEST(Assembler, LabelsResolveBothWays) {
  auto a = assemble("top:\n  beq x0, x0, end\n  jal x0, top\nend:\n  halt\n");
  EXPECT_EQ(a.symbols.at("top"), guest::kOrigin);
  EXPECT_EQ(a.symbols.at("end"), guest::kOrigin + 8);
  EXPECT_EQ(a.instructions[0].imm, 8);
  EXPECT_EQ(a.instructions[1].imm, -4);
  EXPECT_EQ(guest::symbol_map(a), "top 0x80000000\nend 0x80000008\n");
}

TEST(Assembler, AbiRegisterNames) {
  EXPECT_EQ(guest::register_number("zero"), 0);
  EXPECT_EQ(guest::register_number("ra"), 1);
  EXPECT_EQ(guest::register_number("s4"), 20);
  EXPECT_EQ(guest::register_number("t6"), 31);
  EXPECT_EQ(guest::register_number("x32"), -1);
}

TEST(Assembler, LiExpandsOnlyWhenNeeded) {
  EXPECT_EQ(assemble("li a0, 100").instructions.size(), 1u);
  auto big = assemble("li a0, 0x12345678");
  ASSERT_EQ(big.instructions.size(), 2u);
  EXPECT_EQ(big.instructions[0].mnemonic, "lui");
}

struct BadSource {
  const char* text;
  const char* message;
};

class AssemblerErrors : public ::testing::TestWithParam<BadSource> {};

TEST_P(AssemblerErrors, Rejected) {
  try {
    assemble(GetParam().text);
    FAIL() << "accepted " << GetParam().text;
  } catch (const AsmError& e) {
    EXPECT_NE(std::string(e.what()).find(GetParam().message), std::string::npos) << e.what();
  }
}

INSTANTIATE_TEST_SUITE_P(Cases, AssemblerErrors,
                         ::testing::Values(BadSource{"frob x1, x2, x3", "unknown mnemonic"},
                                           BadSource{"addi x1, x2, 2048", "out of range"},
                                           BadSource{"beq x1, x2, nowhere", "nowhere"},
                                           BadSource{"a:\na:\nhalt", "a"},
                                           BadSource{"add x1, x2, q9", "q9"}));

TEST(DecodeRoundTrip, EveryMnemonicRandomOperands) {
  for (auto& m : guest::mnemonics())
    for (uint64_t seed = 0; seed < 200; ++seed) {
      auto in = testing::random_instruction(m, seed);
      uint32_t w = guest::encode(in);
      ASSERT_EQ(testing::decoded_ast(reference_model(), w), testing::expected_ast(in))
          << m << " seed " << seed << " word " << std::hex << w;
    }
}

TEST(DecodeRoundTrip, ImmediateExtremes) {
  for (const char* text : {"addi x1, x2, -2048", "addi x1, x2, 2047", "sd x3, -2048(x4)", "ld x5, 2047(x6)",
                           "lui x7, 0xFFFFF", "lui x7, 0"}) {
    auto in = assemble(text).instructions.at(0);
    EXPECT_EQ(testing::decoded_ast(reference_model(), in.word), testing::expected_ast(in)) << text;
  }
}

TEST(DecodeRoundTrip, GuestCorpusAndGeneratedPrograms) {
  std::vector<guest::Assembly> all;
  for (const char* g : {"addi_loop", "hello", "misaligned", "mixed", "smc", "straight", "two_loads"})
    all.push_back(testing::guest_program(g));
  for (uint64_t seed = 0; seed < 50; ++seed) all.push_back(assemble(guest::gen_random_program(seed)));
  size_t checked = 0;
  for (auto& a : all)
    for (auto& in : a.instructions) {
      EXPECT_EQ(testing::decoded_ast(reference_model(), in.word), testing::expected_ast(in)) << in.mnemonic;
      ++checked;
    }
  EXPECT_GT(checked, 5000u);
}

TEST(DecodeRoundTrip, UnknownWordIsIllegal) {
  auto ast = testing::decoded_ast(reference_model(), 0xFFFFFFFF);
  EXPECT_EQ(ast.variant, "ILLEGAL");
  EXPECT_EQ(ast.fields, (std::vector<uint64_t>{0xFFFFFFFF}));
}

TEST(Generator, SameSeedSameText) {
  EXPECT_EQ(guest::gen_random_program(42), guest::gen_random_program(42));
  EXPECT_NE(guest::gen_random_program(42), guest::gen_random_program(43));
}

TEST(Generator, LoopsMeanBackwardBranches) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto a = assemble(guest::gen_random_program(seed));
    bool backward = false;
    for (auto& in : a.instructions) backward |= in.mnemonic[0] == 'b' && in.imm < 0;
    EXPECT_TRUE(backward) << seed;
  }
}

TEST(Generator, ProgramsHaltWithinBudgetAndStoreOnlyToScratch) {
  interp::SimConfig cfg;
  cfg.budget = guest::kMaxDynamicInstructions + 1;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    auto a = assemble(guest::gen_random_program(seed));
    EXPECT_EQ(a.instructions.back().mnemonic, "ebreak");
    auto o = testing::run_guest(reference_model(), a, cfg);
    ASSERT_FALSE(o.trapped) << seed << ": " << o.trap.message;
    EXPECT_TRUE(o.state.halted) << seed;
    EXPECT_LE(o.stats.guest_instructions, guest::kMaxDynamicInstructions) << seed;
    sim::SimMemory image(cfg.memory);
    image.load(a.origin, a.bytes);
    std::string why;
    // Scratch is the only region a store may touch; everything else must
    // look like the freshly loaded image.
    for (uint64_t addr = guest::kScratchBase; addr < guest::kScratchBase + guest::kScratchBytes; addr += 8)
      image.write(addr, 8, o.memory.read(addr, 8));
    EXPECT_TRUE(image.same_contents(o.memory, &why)) << seed << ": " << why;
  }
}

}  // namespace
}  // namespace isskit
