// Ablation variants and the benchmark harness. The metric is executed
// micro-ops per guest instruction; wall time is reported but never compared.
#pragma once

#include <string>
#include <vector>

#include "isskit/guest/assembler.hpp"
#include "isskit/interp/simulator.hpp"
#include "isskit/opt/pipeline.hpp"

namespace isskit::bench {

struct AblationVariant {
  std::string name;
  opt::PipelineConfig pipeline;
  bool tracing = true;
  bool memory_immutability = true;
  bool switchable_ints = true;

  // Simulator settings for this variant on top of `base`.
  interp::SimConfig sim_config(interp::SimConfig base = {}) const;
};

// full, no-mem-immutability, no-jit, no-bv-int-opts, no-spec, no-static-opt,
// no-opt-with-jit. Each of the first six also drops what the one before it
// dropped.
const std::vector<AblationVariant>& variants();
// Throws std::invalid_argument for an unknown name.
const AblationVariant& variant(const std::string& name);
std::vector<std::string> variant_names();

// Per-variant optimized models, built once per harness.
class ModelCache {
 public:
  explicit ModelCache(const mir::Program& model) : model_(model) {}
  const mir::Program& get(const AblationVariant& v);

 private:
  const mir::Program& model_;
  std::vector<std::pair<std::string, std::unique_ptr<mir::Program>>> built_;
};

struct BenchProgram {
  std::string name;
  guest::Assembly assembly;
  uint64_t budget = 20'000;
};

// The standard set: addi_loop, two_loads, mixed, smc.
std::vector<BenchProgram> standard_programs();
BenchProgram named_program(const std::string& name);

struct BenchRow {
  std::string program;
  std::string variant;
  interp::RunStats stats;
  bool trapped = false;
  double wall_ms = 0;

  double micro_ops_per_instruction() const { return stats.micro_ops_per_instruction(); }
};

struct BenchReport {
  std::vector<BenchRow> rows;

  const BenchRow* find(const std::string& program, const std::string& variant) const;
  // Summed over all programs.
  double micro_ops_per_instruction(const std::string& variant) const;
  std::string table() const;
  std::string csv() const;
};

struct BenchOptions {
  uint64_t tick_interval = 100;
  uint64_t hot_threshold = 57;
  // Zero keeps each program's own budget.
  uint64_t budget = 0;
};

BenchReport run_bench(const mir::Program& model, const std::vector<BenchProgram>& programs,
                      const std::vector<std::string>& variants, const BenchOptions& options = {});

}  // namespace isskit::bench
