// Trace optimization: fetch folding, constant folding, known-bits guard
// elimination, duplicate-guard removal, dead-op removal.
#pragma once

#include <vector>

#include "isskit/sim/memory.hpp"
#include "isskit/trace/trace.hpp"

namespace isskit::trace {

struct OptimizeOptions {
  bool fold_fetches = true;  // needs memory status tracking
  bool use_knownbits = true;
  // Registers the tick function may write; their forwarded values are
  // dropped at every instruction boundary.
  std::vector<uint32_t> tick_clobbers;
};

// Fills trace.optimized from trace.raw.
void optimize(Trace& trace, const sim::SimMemory& memory, const mir::Program& p,
              const OptimizeOptions& options);

// True for the alignment-check shape eq(and(x, 2^k - 1), 0) feeding a guard.
bool is_alignment_guard(const std::vector<TraceOp>& ops, const Trace& t, size_t index);
size_t count_alignment_guards(const std::vector<TraceOp>& ops, const Trace& t);

}  // namespace isskit::trace
