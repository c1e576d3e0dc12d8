#include "isskit/guest/assembler.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <optional>
#include <unordered_map>

namespace isskit::guest {

AsmError::AsmError(unsigned line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

enum class Format { R, I, Load, S, B, J, U, Sys };

struct OpInfo {
  Format format;
  uint32_t opcode, funct3, funct7;
};

const std::unordered_map<std::string, OpInfo>& op_table() {
  static const std::unordered_map<std::string, OpInfo> t = {
      {"addi", {Format::I, 0x13, 0, 0}},   {"slti", {Format::I, 0x13, 2, 0}},
      {"sltiu", {Format::I, 0x13, 3, 0}},  {"xori", {Format::I, 0x13, 4, 0}},
      {"ori", {Format::I, 0x13, 6, 0}},    {"andi", {Format::I, 0x13, 7, 0}},
      {"add", {Format::R, 0x33, 0, 0x00}}, {"sub", {Format::R, 0x33, 0, 0x20}},
      {"sll", {Format::R, 0x33, 1, 0x00}}, {"slt", {Format::R, 0x33, 2, 0x00}},
      {"sltu", {Format::R, 0x33, 3, 0x00}}, {"xor", {Format::R, 0x33, 4, 0x00}},
      {"srl", {Format::R, 0x33, 5, 0x00}}, {"sra", {Format::R, 0x33, 5, 0x20}},
      {"or", {Format::R, 0x33, 6, 0x00}},  {"and", {Format::R, 0x33, 7, 0x00}},
      {"mulw", {Format::R, 0x3b, 0, 0x01}},
      {"lb", {Format::Load, 0x03, 0, 0}},  {"lh", {Format::Load, 0x03, 1, 0}},
      {"lw", {Format::Load, 0x03, 2, 0}},  {"ld", {Format::Load, 0x03, 3, 0}},
      {"lbu", {Format::Load, 0x03, 4, 0}}, {"lhu", {Format::Load, 0x03, 5, 0}},
      {"lwu", {Format::Load, 0x03, 6, 0}},
      {"sb", {Format::S, 0x23, 0, 0}},     {"sh", {Format::S, 0x23, 1, 0}},
      {"sw", {Format::S, 0x23, 2, 0}},     {"sd", {Format::S, 0x23, 3, 0}},
      {"beq", {Format::B, 0x63, 0, 0}},    {"bne", {Format::B, 0x63, 1, 0}},
      {"blt", {Format::B, 0x63, 4, 0}},    {"bge", {Format::B, 0x63, 5, 0}},
      {"bltu", {Format::B, 0x63, 6, 0}},   {"bgeu", {Format::B, 0x63, 7, 0}},
      {"jal", {Format::J, 0x6f, 0, 0}},    {"lui", {Format::U, 0x37, 0, 0}},
      {"ebreak", {Format::Sys, 0x73, 0, 0}},
  };
  return t;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::optional<int64_t> parse_number(std::string_view s) {
  s = trim(s);
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  if (neg) return -static_cast<int64_t>(v);
  return static_cast<int64_t>(v);
}

bool is_ident(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_' || s[0] == '.'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

// A statement after the first pass: mnemonic, operands, where it lands.
struct Pending {
  std::string mnemonic;
  std::vector<std::string> operands;
  unsigned line;
  uint64_t address;
};

uint32_t bits(int64_t v, unsigned hi, unsigned lo) {
  return static_cast<uint32_t>((static_cast<uint64_t>(v) >> lo) & ((uint64_t{1} << (hi - lo + 1)) - 1));
}

void check_range(const Instruction& in, int64_t lo, int64_t hi, const char* what) {
  if (in.imm < lo || in.imm > hi)
    throw AsmError(in.line, fmt::format("{} {} out of range [{}, {}] for {}", what, in.imm, lo, hi,
                                        in.mnemonic));
}

}  // namespace

int register_number(std::string_view name) {
  static const std::unordered_map<std::string_view, int> abi = {
      {"zero", 0}, {"ra", 1},  {"sp", 2},   {"gp", 3},   {"tp", 4},  {"t0", 5},  {"t1", 6},
      {"t2", 7},   {"s0", 8},  {"fp", 8},   {"s1", 9},   {"a0", 10}, {"a1", 11}, {"a2", 12},
      {"a3", 13},  {"a4", 14}, {"a5", 15},  {"a6", 16},  {"a7", 17}, {"s2", 18}, {"s3", 19},
      {"s4", 20},  {"s5", 21}, {"s6", 22},  {"s7", 23},  {"s8", 24}, {"s9", 25}, {"s10", 26},
      {"s11", 27}, {"t3", 28}, {"t4", 29},  {"t5", 30},  {"t6", 31},
  };
  if (name.size() >= 2 && name[0] == 'x') {
    int v = 0;
    auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    if (ec == std::errc() && p == name.data() + name.size() && v >= 0 && v < 32 &&
        (name.size() == 2 || name[1] != '0'))
      return v;
    return -1;
  }
  auto it = abi.find(name);
  return it == abi.end() ? -1 : it->second;
}

const std::vector<std::string>& mnemonics() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto& [k, _] : op_table()) v.push_back(k);
    std::sort(v.begin(), v.end());
    return v;
  }();
  return names;
}

uint32_t encode(const Instruction& in) {
  if (in.raw) return in.word;
  auto it = op_table().find(in.mnemonic);
  if (it == op_table().end()) throw AsmError(in.line, "unknown mnemonic '" + in.mnemonic + "'");
  const OpInfo& op = it->second;
  uint32_t rd = in.rd, rs1 = in.rs1, rs2 = in.rs2;
  switch (op.format) {
    case Format::R:
      return op.funct7 << 25 | rs2 << 20 | rs1 << 15 | op.funct3 << 12 | rd << 7 | op.opcode;
    case Format::I:
    case Format::Load:
      check_range(in, -2048, 2047, "immediate");
      return bits(in.imm, 11, 0) << 20 | rs1 << 15 | op.funct3 << 12 | rd << 7 | op.opcode;
    case Format::S:
      check_range(in, -2048, 2047, "offset");
      return bits(in.imm, 11, 5) << 25 | rs2 << 20 | rs1 << 15 | op.funct3 << 12 |
             bits(in.imm, 4, 0) << 7 | op.opcode;
    case Format::B:
      check_range(in, -4096, 4094, "branch offset");
      if (in.imm & 1) throw AsmError(in.line, "branch offset must be even");
      return bits(in.imm, 12, 12) << 31 | bits(in.imm, 10, 5) << 25 | rs2 << 20 | rs1 << 15 |
             op.funct3 << 12 | bits(in.imm, 4, 1) << 8 | bits(in.imm, 11, 11) << 7 | op.opcode;
    case Format::J:
      check_range(in, -(1 << 20), (1 << 20) - 2, "jump offset");
      if (in.imm & 1) throw AsmError(in.line, "jump offset must be even");
      return bits(in.imm, 20, 20) << 31 | bits(in.imm, 10, 1) << 21 | bits(in.imm, 11, 11) << 20 |
             bits(in.imm, 19, 12) << 12 | rd << 7 | op.opcode;
    case Format::U:
      check_range(in, 0, 0xFFFFF, "upper immediate");
      return bits(in.imm, 19, 0) << 12 | rd << 7 | op.opcode;
    case Format::Sys:
      return kHaltWord;
  }
  return 0;
}

namespace {

class Assembler {
 public:
  explicit Assembler(uint64_t origin) { out_.origin = origin; }

  Assembly run(std::string_view text) {
    first_pass(text);
    for (auto& p : pending_) second_pass(p);
    for (auto& in : out_.instructions) {
      uint32_t w = in.raw ? in.word : encode(in);
      in.word = w;
      for (int k = 0; k < 4; ++k) out_.bytes.push_back(static_cast<uint8_t>(w >> (8 * k)));
    }
    return std::move(out_);
  }

 private:
  void first_pass(std::string_view text) {
    uint64_t pc = out_.origin;
    unsigned line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      for (char c : {'#', ';'})
        if (auto k = line.find(c); k != std::string_view::npos) line = line.substr(0, k);
      if (auto k = line.find("//"); k != std::string_view::npos) line = line.substr(0, k);
      line = trim(line);
      while (!line.empty()) {
        auto colon = line.find(':');
        if (colon == std::string_view::npos) break;
        std::string_view label = trim(line.substr(0, colon));
        if (!is_ident(label)) break;
        if (!out_.symbols.emplace(std::string(label), pc).second)
          throw AsmError(line_no, fmt::format("duplicate label '{}'", label));
        line = trim(line.substr(colon + 1));
      }
      if (line.empty()) continue;
      size_t sp = 0;
      while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
      std::string mnem(line.substr(0, sp));
      std::transform(mnem.begin(), mnem.end(), mnem.begin(), ::tolower);
      Pending p{mnem, {}, line_no, pc};
      for (auto o : split_operands(line.substr(sp))) p.operands.emplace_back(o);
      pc += 4 * size_of(p);
      pending_.push_back(std::move(p));
      if (pc - out_.origin > (uint64_t{1} << 30)) throw AsmError(line_no, "program too large");
    }
  }

  static bool li_fits_one(int64_t v) { return v >= -2048 && v <= 2047; }

  unsigned size_of(const Pending& p) {
    if (p.mnemonic == "li") {
      if (p.operands.size() == 2)
        if (auto v = parse_number(p.operands[1]); v && !li_fits_one(*v)) return 2;
      return 1;
    }
    return 1;
  }

  void need(const Pending& p, size_t n) {
    if (p.operands.size() != n)
      throw AsmError(p.line, fmt::format("{} takes {} operands, got {}", p.mnemonic, n,
                                         p.operands.size()));
  }

  unsigned reg(const Pending& p, const std::string& s) {
    int r = register_number(s);
    if (r < 0) throw AsmError(p.line, fmt::format("unknown register '{}'", s));
    return static_cast<unsigned>(r);
  }

  int64_t number(const Pending& p, const std::string& s) {
    auto v = parse_number(s);
    if (!v) throw AsmError(p.line, fmt::format("expected a number, found '{}'", s));
    return *v;
  }

  // Branch and jump targets: a label or a literal byte offset.
  int64_t target(const Pending& p, const std::string& s, uint64_t at) {
    if (auto v = parse_number(s)) return *v;
    auto it = out_.symbols.find(s);
    if (it == out_.symbols.end()) throw AsmError(p.line, fmt::format("unresolved label '{}'", s));
    return static_cast<int64_t>(it->second - at);
  }

  void emit(const Pending& p, std::string mnem, unsigned rd, unsigned rs1, unsigned rs2, int64_t imm,
            uint64_t at) {
    Instruction in;
    in.mnemonic = std::move(mnem);
    in.rd = rd;
    in.rs1 = rs1;
    in.rs2 = rs2;
    in.imm = imm;
    in.address = at;
    in.line = p.line;
    encode(in);  // validate now so errors carry the source line
    out_.instructions.push_back(std::move(in));
  }

  void second_pass(const Pending& p) {
    const std::string& m = p.mnemonic;
    const auto& o = p.operands;
    uint64_t at = p.address;
    if (m == ".word") {
      need(p, 1);
      int64_t v = number(p, o[0]);
      if (v < INT32_MIN || v > static_cast<int64_t>(UINT32_MAX))
        throw AsmError(p.line, ".word value out of range");
      Instruction in;
      in.mnemonic = ".word";
      in.raw = true;
      in.word = static_cast<uint32_t>(v);
      in.address = at;
      in.line = p.line;
      out_.instructions.push_back(in);
      return;
    }
    if (m == "nop") {
      need(p, 0);
      return emit(p, "addi", 0, 0, 0, 0, at);
    }
    if (m == "halt") {
      need(p, 0);
      return emit(p, "ebreak", 0, 0, 0, 0, at);
    }
    if (m == "mv") {
      need(p, 2);
      return emit(p, "addi", reg(p, o[0]), reg(p, o[1]), 0, 0, at);
    }
    if (m == "j") {
      need(p, 1);
      return emit(p, "jal", 0, 0, 0, target(p, o[0], at), at);
    }
    if (m == "li") {
      need(p, 2);
      unsigned rd = reg(p, o[0]);
      int64_t v = number(p, o[1]);
      if (li_fits_one(v)) return emit(p, "addi", rd, 0, 0, v, at);
      int64_t hi = ((v + 0x800) >> 12) & 0xFFFFF;
      int64_t upper = static_cast<int32_t>(static_cast<uint32_t>(hi << 12));
      int64_t lo = v - upper;
      if (lo < -2048 || lo > 2047)
        throw AsmError(p.line, fmt::format("li immediate {} not reachable with lui+addi", v));
      emit(p, "lui", rd, 0, 0, hi, at);
      return emit(p, "addi", rd, rd, 0, lo, at + 4);
    }
    auto it = op_table().find(m);
    if (it == op_table().end()) throw AsmError(p.line, fmt::format("unknown mnemonic '{}'", m));
    switch (it->second.format) {
      case Format::R:
        need(p, 3);
        return emit(p, m, reg(p, o[0]), reg(p, o[1]), reg(p, o[2]), 0, at);
      case Format::I:
        need(p, 3);
        return emit(p, m, reg(p, o[0]), reg(p, o[1]), 0, number(p, o[2]), at);
      case Format::Load:
      case Format::S: {
        need(p, 2);
        const std::string& mem = o[1];
        auto lp = mem.find('('), rp = mem.rfind(')');
        if (lp == std::string::npos || rp != mem.size() - 1)
          throw AsmError(p.line, fmt::format("expected offset(register), found '{}'", mem));
        std::string off(trim(std::string_view(mem).substr(0, lp)));
        int64_t imm = off.empty() ? 0 : number(p, off);
        unsigned base = reg(p, std::string(trim(std::string_view(mem).substr(lp + 1, rp - lp - 1))));
        if (it->second.format == Format::Load) return emit(p, m, reg(p, o[0]), base, 0, imm, at);
        return emit(p, m, 0, base, reg(p, o[0]), imm, at);
      }
      case Format::B:
        need(p, 3);
        return emit(p, m, 0, reg(p, o[0]), reg(p, o[1]), target(p, o[2], at), at);
      case Format::J:
        if (o.size() == 1) return emit(p, m, 1, 0, 0, target(p, o[0], at), at);
        need(p, 2);
        return emit(p, m, reg(p, o[0]), 0, 0, target(p, o[1], at), at);
      case Format::U:
        need(p, 2);
        return emit(p, m, reg(p, o[0]), 0, 0, number(p, o[1]), at);
      case Format::Sys:
        need(p, 0);
        return emit(p, m, 0, 0, 0, 0, at);
    }
  }

  Assembly out_;
  std::vector<Pending> pending_;
};

}  // namespace

Assembly assemble(std::string_view text, uint64_t origin) { return Assembler(origin).run(text); }

std::string symbol_map(const Assembly& a) {
  std::vector<std::pair<uint64_t, std::string>> v;
  for (auto& [name, addr] : a.symbols) v.emplace_back(addr, name);
  std::sort(v.begin(), v.end());
  std::string out;
  for (auto& [addr, name] : v) out += fmt::format("{} 0x{:X}\n", name, addr);
  return out;
}

}  // namespace isskit::guest
