// Random guest programs for differential testing.
#pragma once

#include <cstdint>
#include <string>

namespace isskit::guest {

inline constexpr uint64_t kScratchBase = 0x10'0000;  // x31 in generated programs
inline constexpr uint64_t kScratchBytes = 2048;
inline constexpr uint64_t kMaxDynamicInstructions = 10'000;

struct GeneratorOptions {
  unsigned length = 120;  // approximate static instruction count
  bool loops = true;
};

// Deterministic per (seed, options). The program halts after at most
// kMaxDynamicInstructions instructions and only stores to the scratch area.
std::string gen_random_program(uint64_t seed, const GeneratorOptions& options = {});

}  // namespace isskit::guest
