// Mini-assembler for the RV64 subset the corpus model implements.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isskit::guest {

inline constexpr uint64_t kOrigin = 0x8000'0000;
inline constexpr uint32_t kHaltWord = 0x0010'0073;  // ebreak

class AsmError : public std::runtime_error {
 public:
  AsmError(unsigned line, const std::string& message);
  unsigned line() const { return line_; }

 private:
  unsigned line_;
};

// One machine instruction after pseudo-op expansion, with its operands as
// written (immediates already resolved to byte offsets or values).
struct Instruction {
  std::string mnemonic;
  unsigned rd = 0, rs1 = 0, rs2 = 0;
  int64_t imm = 0;
  uint64_t address = 0;
  uint32_t word = 0;
  bool raw = false;  // a .word directive
  unsigned line = 0;
};

struct Assembly {
  uint64_t origin = kOrigin;
  std::vector<uint8_t> bytes;
  std::vector<Instruction> instructions;
  std::map<std::string, uint64_t> symbols;

  uint64_t end() const { return origin + bytes.size(); }
};

Assembly assemble(std::string_view text, uint64_t origin = kOrigin);

// Register number for x0..x31 or an ABI name; -1 if unknown.
int register_number(std::string_view name);

// Encoding of a single instruction; throws AsmError on bad operands.
uint32_t encode(const Instruction& insn);

// `name 0xADDR` lines in address order, ties by name.
std::string symbol_map(const Assembly& a);

// Mnemonics the assembler accepts as machine instructions.
const std::vector<std::string>& mnemonics();

}  // namespace isskit::guest
