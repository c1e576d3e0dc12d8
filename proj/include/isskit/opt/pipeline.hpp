// The ahead-of-time MIR optimization pipeline.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::opt {

struct PipelineConfig {
  bool enable_const_fold = true;
  bool enable_dce = true;
  bool enable_cse = true;
  bool enable_inlining = true;
  unsigned inline_max_ops = 25;
  unsigned inline_max_blocks = 4;
  bool enable_scalar_replacement = true;
  bool enable_bv_int_rewrites = true;
  bool enable_range_narrowing = true;
  bool enable_specialization = true;
  unsigned max_fixpoint_rounds = 50;
  unsigned max_variants = 8;
  // Run the verifier after every pass instead of once at the end.
  bool verify_each_pass = false;
  // Called after every pass with the pass name and the current program.
  std::function<void(const std::string&, const mir::Program&)> after_pass;

  static PipelineConfig all_disabled();
};

struct PassChanges {
  std::string function;
  std::string pass;
  size_t changes = 0;
};

struct FunctionCost {
  size_t before = 0;  // 0 for functions the pipeline created
  size_t after = 0;
  bool created = false;
};

struct PipelineReport {
  unsigned rounds = 0;
  bool converged = true;
  std::vector<PassChanges> passes;  // one entry per (function, pass) with changes
  std::map<std::string, FunctionCost> cost;
  std::vector<std::string> diagnostics;

  size_t total_changes() const;
  size_t changes(const std::string& function, const std::string& pass) const;
  // Line-oriented table: function, pass, changes, generic ops before/after.
  std::string table() const;
};

struct PipelineResult {
  mir::Program program;
  PipelineReport report;
};

// Throws std::runtime_error if the result fails verification.
PipelineResult run_pipeline(const mir::Program& p, const PipelineConfig& config);

// Single passes. Each returns the number of changes it made.
size_t constant_fold(mir::Function& f, const mir::Program& p, std::vector<std::string>* diagnostics = nullptr);
size_t dead_code_elim(mir::Function& f, const mir::Program& p);
size_t cse(mir::Function& f, const mir::Program& p);
size_t rewrite_bv_int(mir::Function& f, const mir::Program& p);
size_t range_narrowing(mir::Function& f, const mir::Program& p);
size_t scalar_replace(mir::Function& f, const mir::Program& p);

// Program passes report changes per caller.
using ChangeCounts = std::map<std::string, size_t>;
// A call site is inlined only if, after the enabled intraprocedural passes
// clean up the caller, it has no more generic ops than before.
ChangeCounts inline_calls(mir::Program& p, const PipelineConfig& config);

// Clones created so far, keyed by "callee(signature)". Persists across
// rounds so a signature is cloned once.
struct SpecializationCache {
  std::map<std::string, std::string> clones;
  std::map<std::string, unsigned> variants;  // per original callee
};
ChangeCounts specialize_functions(mir::Program& p, const PipelineConfig& config, SpecializationCache& cache);

// Statements and blocks as counted against the inlining limits.
size_t statement_count(const mir::Function& f);

// The enabled intraprocedural passes, repeated until none changes `f`.
size_t local_fixpoint(mir::Function& f, const mir::Program& p, const PipelineConfig& config);

}  // namespace isskit::opt
