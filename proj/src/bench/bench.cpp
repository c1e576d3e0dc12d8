#include "isskit/bench/bench.hpp"

#include <fmt/format.h>

#include <chrono>
#include <stdexcept>

#include "isskit/guest/loader.hpp"

namespace isskit::bench {

interp::SimConfig AblationVariant::sim_config(interp::SimConfig base) const {
  base.tracing = tracing;
  base.memory.track_status = memory_immutability;
  base.switchable_ints = switchable_ints;
  return base;
}

const std::vector<AblationVariant>& variants() {
  static const std::vector<AblationVariant> all = [] {
    std::vector<AblationVariant> v;
    AblationVariant cur{"full", {}};
    v.push_back(cur);
    cur.name = "no-mem-immutability";
    cur.memory_immutability = false;
    v.push_back(cur);
    cur.name = "no-jit";
    cur.tracing = false;
    v.push_back(cur);
    cur.name = "no-bv-int-opts";
    cur.pipeline.enable_bv_int_rewrites = false;
    cur.pipeline.enable_range_narrowing = false;
    v.push_back(cur);
    cur.name = "no-spec";
    cur.pipeline.enable_specialization = false;
    v.push_back(cur);
    cur.name = "no-static-opt";
    cur.pipeline = opt::PipelineConfig::all_disabled();
    cur.switchable_ints = false;
    v.push_back(cur);
    AblationVariant jit_only{"no-opt-with-jit", opt::PipelineConfig::all_disabled()};
    jit_only.switchable_ints = false;
    v.push_back(jit_only);
    return v;
  }();
  return all;
}

const AblationVariant& variant(const std::string& name) {
  for (auto& v : variants())
    if (v.name == name) return v;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

std::vector<std::string> variant_names() {
  std::vector<std::string> out;
  for (auto& v : variants()) out.push_back(v.name);
  return out;
}

const mir::Program& ModelCache::get(const AblationVariant& v) {
  for (auto& [name, p] : built_)
    if (name == v.name) return *p;
  auto p = std::make_unique<mir::Program>(opt::run_pipeline(model_, v.pipeline).program);
  built_.emplace_back(v.name, std::move(p));
  return *built_.back().second;
}

BenchProgram named_program(const std::string& name) {
  return {name, guest::assemble_file(std::string(ISSKIT_SOURCE_DIR) + "/guest/" + name + ".s")};
}

std::vector<BenchProgram> standard_programs() {
  std::vector<BenchProgram> out;
  for (const char* n : {"addi_loop", "two_loads", "mixed", "smc"}) out.push_back(named_program(n));
  return out;
}

const BenchRow* BenchReport::find(const std::string& program, const std::string& variant) const {
  for (auto& r : rows)
    if (r.program == program && r.variant == variant) return &r;
  return nullptr;
}

double BenchReport::micro_ops_per_instruction(const std::string& variant) const {
  uint64_t ops = 0, insns = 0;
  for (auto& r : rows)
    if (r.variant == variant) ops += r.stats.executed_micro_ops, insns += r.stats.guest_instructions;
  return insns ? double(ops) / double(insns) : 0.0;
}

std::string BenchReport::table() const {
  size_t wp = 7, wv = 7;
  for (auto& r : rows) wp = std::max(wp, r.program.size()), wv = std::max(wv, r.variant.size());
  std::string out = fmt::format("{:<{}}  {:<{}}  {:>12}  {:>14}  {:>10}  {:>8}  {:>6}  {:>6}  {:>9}\n", "program", wp,
                                "variant", wv, "instructions", "micro_ops", "ops/insn", "allocs", "traces", "exits",
                                "wall_ms");
  for (auto& r : rows)
    out += fmt::format("{:<{}}  {:<{}}  {:>12}  {:>14}  {:>10.3f}  {:>8}  {:>6}  {:>6}  {:>9.1f}{}\n", r.program, wp,
                       r.variant, wv, r.stats.guest_instructions, r.stats.executed_micro_ops,
                       r.micro_ops_per_instruction(), r.stats.generic_allocations, r.stats.traces_compiled,
                       r.stats.trace_guard_exits, r.wall_ms, r.trapped ? "  trap" : "");
  return out;
}

std::string BenchReport::csv() const {
  std::string out =
      "program,variant,guest_instructions,executed_micro_ops,micro_ops_per_instruction,generic_allocations,"
      "traces_compiled,traces_invalidated,trace_guard_exits,trapped,wall_ms\n";
  for (auto& r : rows)
    out += fmt::format("{},{},{},{},{:.6f},{},{},{},{},{},{:.3f}\n", r.program, r.variant, r.stats.guest_instructions,
                       r.stats.executed_micro_ops, r.micro_ops_per_instruction(), r.stats.generic_allocations,
                       r.stats.traces_compiled, r.stats.traces_invalidated, r.stats.trace_guard_exits,
                       r.trapped ? 1 : 0, r.wall_ms);
  return out;
}

BenchReport run_bench(const mir::Program& model, const std::vector<BenchProgram>& programs,
                      const std::vector<std::string>& names, const BenchOptions& options) {
  ModelCache models(model);
  BenchReport report;
  for (auto& prog : programs)
    for (auto& name : names) {
      const AblationVariant& v = variant(name);
      interp::SimConfig base;
      base.budget = options.budget ? options.budget : prog.budget;
      base.tick_interval = options.tick_interval;
      base.trace.hot_threshold = options.hot_threshold;
      interp::Simulator sim(models.get(v), v.sim_config(base));
      guest::load(sim, prog.assembly);
      BenchRow row;
      row.program = prog.name;
      row.variant = name;
      auto start = std::chrono::steady_clock::now();
      try {
        sim.run();
      } catch (const interp::Trap&) {
        row.trapped = true;
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      row.stats = sim.stats();
      report.rows.push_back(std::move(row));
    }
  return report;
}

}  // namespace isskit::bench
