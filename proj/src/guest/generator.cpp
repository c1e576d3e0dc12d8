#include "isskit/guest/generator.hpp"

#include <fmt/format.h>

#include <random>
#include <vector>

namespace isskit::guest {

namespace {

// x30 counts loop iterations and x31 holds the scratch base; everything
// else is fair game, including x0 as a destination.
constexpr unsigned kCounter = 30;
constexpr unsigned kBase = 31;

class Generator {
 public:
  Generator(uint64_t seed, const GeneratorOptions& o) : rng_(seed), opts_(o) {}

  std::string run() {
    line(fmt::format("# generated program, seed-derived"));
    line(fmt::format("  lui x{}, 0x{:X}", kBase, kScratchBase >> 12));
    for (unsigned r = 1; r < kCounter; ++r)
      if (coin(2)) line(fmt::format("  li x{}, {}", r, small_or_wide()));
    uint64_t dynamic = static_ + 1;
    unsigned target = std::max(opts_.length, 4u);
    while (static_ < target) {
      unsigned left = target - static_;
      if (opts_.loops && left > 6 && coin(4)) {
        unsigned body = 2 + pick(std::min(left - 4, 12u));
        unsigned id = labels_++;
        std::string before = std::move(text_);
        text_.clear();
        uint64_t per = 0;
        straight(body, per);
        std::string body_text = std::move(text_);
        text_ = std::move(before);
        per += 2;  // counter update and back branch
        // Iterations bounded so the whole run stays within the budget.
        uint64_t room = kMaxDynamicInstructions - 64 > dynamic ? kMaxDynamicInstructions - 64 - dynamic : 0;
        uint64_t most = std::min<uint64_t>(200, room / per);
        if (most < 2) {
          // Not enough budget left for a loop: keep the body straight.
          text_ += body_text;
          dynamic += per;
          continue;
        }
        unsigned iters = 2 + pick(static_cast<unsigned>(most - 1));
        line(fmt::format("  li x{}, {}", kCounter, iters));
        line(fmt::format("loop{}:", id));
        text_ += body_text;
        line(fmt::format("  addi x{0}, x{0}, -1", kCounter));
        line(fmt::format("  bne x{}, x0, loop{}", kCounter, id));
        dynamic += 1 + iters * per;
      } else {
        straight(1 + pick(std::min(left, 6u)), dynamic);
      }
    }
    line("  ebreak");
    return text_;
  }

 private:
  unsigned pick(unsigned n) { return n == 0 ? 0 : static_cast<unsigned>(rng_() % n); }
  bool coin(unsigned one_in) { return pick(one_in) == 0; }
  unsigned any_reg() { return pick(kCounter); }            // x0..x29
  unsigned dest_reg() { return coin(16) ? 0 : 1 + pick(kCounter - 1); }

  int64_t imm12() { return static_cast<int64_t>(pick(4096)) - 2048; }
  int64_t small_or_wide() {
    if (coin(3)) return imm12();
    return static_cast<int64_t>(pick(1u << 30)) - (1 << 29);
  }

  void line(const std::string& s) {
    text_ += s;
    text_ += '\n';
    if (!s.empty() && s[0] == ' ') ++static_;
  }

  // `n` instructions without backward control flow; `dynamic` grows by the
  // number that execute at most.
  void straight(unsigned n, uint64_t& dynamic) {
    for (unsigned i = 0; i < n; ++i) {
      unsigned kind = pick(20);
      dynamic += 1;
      if (kind < 5) {
        static const char* ops[] = {"addi", "slti", "sltiu", "xori", "ori", "andi"};
        line(fmt::format("  {} x{}, x{}, {}", ops[pick(6)], dest_reg(), any_reg(), imm12()));
      } else if (kind < 11) {
        static const char* ops[] = {"add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and"};
        line(fmt::format("  {} x{}, x{}, x{}", ops[pick(10)], dest_reg(), any_reg(), any_reg()));
      } else if (kind < 12) {
        line(fmt::format("  mulw x{}, x{}, x{}", dest_reg(), any_reg(), any_reg()));
      } else if (kind < 13) {
        line(fmt::format("  lui x{}, 0x{:X}", dest_reg(), pick(1u << 20)));
      } else if (kind < 15) {
        static const char* ops[] = {"lb", "lh", "lw", "ld", "lbu", "lhu", "lwu"};
        static const unsigned size[] = {1, 2, 4, 8, 1, 2, 4};
        unsigned k = pick(7);
        line(fmt::format("  {} x{}, {}(x{})", ops[k], dest_reg(), aligned_offset(size[k]), kBase));
      } else if (kind < 17) {
        static const char* ops[] = {"sb", "sh", "sw", "sd"};
        unsigned k = pick(4);
        line(fmt::format("  {} x{}, {}(x{})", ops[k], any_reg(), aligned_offset(1u << k), kBase));
      } else if (kind < 19 && i + 1 < n) {
        // Forward branch over the next one or two instructions.
        static const char* ops[] = {"beq", "bne", "blt", "bge", "bltu", "bgeu"};
        unsigned id = labels_++;
        line(fmt::format("  {} x{}, x{}, skip{}", ops[pick(6)], any_reg(), any_reg(), id));
        unsigned inner = std::min(1 + pick(2), n - i - 1);
        uint64_t d = 0;
        straight(inner, d);
        dynamic += d;
        i += inner;
        line(fmt::format("skip{}:", id));
      } else {
        unsigned id = labels_++;
        line(fmt::format("  jal x{}, fwd{}", dest_reg(), id));
        line(fmt::format("  addi x{}, x{}, 1", dest_reg(), any_reg()));
        line(fmt::format("fwd{}:", id));
        dynamic += 1;
      }
    }
  }

  int64_t aligned_offset(unsigned size) {
    return static_cast<int64_t>(pick(static_cast<unsigned>(kScratchBytes / size))) * size;
  }

  std::mt19937_64 rng_;
  GeneratorOptions opts_;
  std::string text_;
  unsigned static_ = 0;
  unsigned labels_ = 0;
};

}  // namespace

std::string gen_random_program(uint64_t seed, const GeneratorOptions& options) {
  return Generator(seed, options).run();
}

}  // namespace isskit::guest
