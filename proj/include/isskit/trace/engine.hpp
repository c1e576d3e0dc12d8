// Hot-loop detection, the trace cache, invalidation and trace execution.
#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "isskit/interp/interpreter.hpp"
#include "isskit/sim/memory.hpp"
#include "isskit/trace/optimizer.hpp"
#include "isskit/trace/recorder.hpp"

namespace isskit::trace {

class HotCounter {
 public:
  explicit HotCounter(uint64_t threshold = 57) : threshold_(threshold) {}
  // Counts backward jumps per target; true exactly when a count reaches the
  // threshold.
  bool observe_jump(uint64_t from_pc, uint64_t to_pc);
  void reset(uint64_t pc) { counts_.erase(pc); }
  uint64_t count(uint64_t pc) const;
  uint64_t threshold() const { return threshold_; }

 private:
  uint64_t threshold_;
  std::unordered_map<uint64_t, uint64_t> counts_;
};

struct ExecLimits {
  uint64_t budget = ~uint64_t{0};
  uint64_t tick_interval = 100;
  const mir::Function* tick = nullptr;
};

struct ExecOutcome {
  enum class Kind { budget, guard_exit, trap_exit, invalidated } kind = Kind::guard_exit;
  uint64_t iterations = 0;
};

struct EngineStats {
  uint64_t compiled = 0;
  uint64_t invalidated = 0;
  uint64_t guard_exits = 0;
  uint64_t aborted = 0;
  uint64_t micro_ops = 0;
  uint64_t ticks = 0;
};

class TraceEngine {
 public:
  TraceEngine(const mir::Program& p, TraceConfig config, sim::SimMemory& memory);
  ~TraceEngine();
  TraceEngine(const TraceEngine&) = delete;
  TraceEngine& operator=(const TraceEngine&) = delete;

  HotCounter& hot() { return hot_; }
  const TraceConfig& config() const { return config_; }

  // A valid trace anchored at pc, if any.
  Trace* lookup(uint64_t pc);
  bool blacklisted(uint64_t pc) const;

  // Recording of one loop iteration, driven by the simulator.
  TraceRecorder* begin_recording(uint64_t anchor_pc);
  TraceRecorder* recording() { return recorder_.get(); }
  uint64_t recording_anchor() const { return recording_ ? recording_->anchor_pc : 0; }
  // Closes the current recording; compiles it unless it was aborted.
  Trace* finish_recording();
  void abort_recording(const std::string& reason);

  // Number of traces depending on the word that became invalid.
  size_t invalidate_on_write(uint64_t word_addr);

  ExecOutcome execute(Trace& t, interp::Interpreter& in, const ExecLimits& limits);

  const EngineStats& stats() const { return stats_; }
  const std::vector<std::unique_ptr<Trace>>& traces() const { return traces_; }

 private:
  const mir::Program& program_;
  TraceConfig config_;
  sim::SimMemory& memory_;
  HotCounter hot_;
  OptimizeOptions opt_options_;
  std::vector<std::unique_ptr<Trace>> traces_;
  std::unordered_map<uint64_t, Trace*> by_anchor_;
  std::unordered_multimap<uint64_t, Trace*> by_word_;
  std::unordered_map<uint64_t, unsigned> aborts_;
  std::unique_ptr<Trace> recording_;
  std::unique_ptr<TraceRecorder> recorder_;
  std::vector<rt::Value> slots_;
  EngineStats stats_;
};

// Registers the tick function (transitively) writes.
std::vector<uint32_t> registers_written(const mir::Program& p, const std::string& fn);

}  // namespace isskit::trace
