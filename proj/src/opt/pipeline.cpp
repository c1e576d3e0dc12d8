#include "isskit/opt/pipeline.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "isskit/mir/verify.hpp"
#include "isskit/opt/edit.hpp"

namespace isskit::opt {

using namespace mir;

PipelineConfig PipelineConfig::all_disabled() {
  PipelineConfig c;
  c.enable_const_fold = c.enable_dce = c.enable_cse = c.enable_inlining = false;
  c.enable_scalar_replacement = c.enable_bv_int_rewrites = c.enable_range_narrowing = false;
  c.enable_specialization = false;
  return c;
}

size_t PipelineReport::total_changes() const {
  size_t n = 0;
  for (auto& p : passes) n += p.changes;
  return n;
}

size_t PipelineReport::changes(const std::string& function, const std::string& pass) const {
  size_t n = 0;
  for (auto& p : passes)
    if (p.function == function && p.pass == pass) n += p.changes;
  return n;
}

std::string PipelineReport::table() const {
  size_t wf = 8;
  for (auto& [name, c] : cost) wf = std::max(wf, name.size());
  std::string out = fmt::format("# rounds {} {}\n", rounds, converged ? "converged" : "NOT converged");
  out += fmt::format("{:<{}}  {:<16}  {:>7}  {:>6}  {:>5}\n", "function", wf, "pass", "changes", "before", "after");
  for (auto& [name, c] : cost) {
    std::string before = c.created ? "-" : std::to_string(c.before);
    bool any = false;
    for (auto& p : passes) {
      if (p.function != name) continue;
      out += fmt::format("{:<{}}  {:<16}  {:>7}  {:>6}  {:>5}\n", name, wf, p.pass, p.changes, before, c.after);
      any = true;
    }
    if (!any) out += fmt::format("{:<{}}  {:<16}  {:>7}  {:>6}  {:>5}\n", name, wf, "-", 0, before, c.after);
  }
  for (auto& d : diagnostics) out += "# " + d + "\n";
  return out;
}

size_t local_fixpoint(Function& f, const Program& p, const PipelineConfig& c) {
  size_t total = 0;
  for (unsigned round = 0; round < c.max_fixpoint_rounds; ++round) {
    size_t n = 0;
    if (c.enable_const_fold) n += constant_fold(f, p);
    if (c.enable_cse) n += cse(f, p);
    if (c.enable_bv_int_rewrites) n += rewrite_bv_int(f, p);
    if (c.enable_range_narrowing) n += range_narrowing(f, p);
    if (c.enable_scalar_replacement) n += scalar_replace(f, p);
    if (c.enable_dce) n += dead_code_elim(f, p);
    if (!n) break;
    resolve_symbols(f, p);
    total += n;
  }
  return total;
}

namespace {

class Driver {
 public:
  Driver(Program& p, const PipelineConfig& c, PipelineReport& r) : p_(p), c_(c), r_(r) {}

  void run() {
    bool any = c_.enable_const_fold || c_.enable_dce || c_.enable_cse || c_.enable_inlining ||
               c_.enable_scalar_replacement || c_.enable_bv_int_rewrites || c_.enable_range_narrowing ||
               c_.enable_specialization;
    if (!any) return;
    for (unsigned round = 1; round <= c_.max_fixpoint_rounds; ++round) {
      r_.rounds = round;
      size_t before = changes_;
      if (c_.enable_const_fold)
        per_function("const_fold", [&](Function& f) { return constant_fold(f, p_, &r_.diagnostics); });
      if (c_.enable_cse) per_function("cse", [&](Function& f) { return cse(f, p_); });
      if (c_.enable_bv_int_rewrites) per_function("rewrite_bv_int", [&](Function& f) { return rewrite_bv_int(f, p_); });
      if (c_.enable_range_narrowing)
        per_function("range_narrowing", [&](Function& f) { return range_narrowing(f, p_); });
      if (c_.enable_scalar_replacement)
        per_function("scalar_replace", [&](Function& f) { return scalar_replace(f, p_); });
      if (c_.enable_dce) per_function("dce", [&](Function& f) { return dead_code_elim(f, p_); });
      if (c_.enable_inlining) whole_program("inline", inline_calls(p_, c_));
      if (c_.enable_specialization) whole_program("specialize", specialize_functions(p_, c_, cache_));
      if (changes_ == before) return;
    }
    r_.converged = false;
    r_.diagnostics.push_back(fmt::format("fixpoint not reached within {} rounds", c_.max_fixpoint_rounds));
  }

 private:
  template <typename Pass>
  void per_function(const char* name, Pass pass) {
    for (size_t i = 0; i < p_.functions.size(); ++i) {
      Function& f = p_.functions[i];
      size_t n = pass(f);
      if (!n) continue;
      resolve_symbols(f, p_);
      record(f.name, name, n);
    }
    check(name);
  }

  void whole_program(const char* name, const ChangeCounts& counts) {
    p_.reindex();
    for (auto& [fn, n] : counts) {
      if (auto f = p_.find_function(fn)) resolve_symbols(*f, p_);
      record(fn, name, n);
    }
    check(name);
  }

  void record(const std::string& fn, const char* pass, size_t n) {
    changes_ += n;
    auto& slot = totals_[{fn, pass}];
    if (!slot) order_.push_back({fn, pass});
    slot += n;
  }

  void check(const char* pass) {
    if (c_.after_pass) c_.after_pass(pass, p_);
    if (!c_.verify_each_pass) return;
    auto diags = verify(p_);
    if (diags.empty()) return;
    std::string msg = fmt::format("verification failed after {}:", pass);
    for (auto& d : diags) msg += "\n  " + to_string(d);
    throw std::runtime_error(msg);
  }

 public:
  void finish() {
    for (auto& key : order_) r_.passes.push_back({key.first, key.second, totals_[key]});
  }

 private:
  Program& p_;
  const PipelineConfig& c_;
  PipelineReport& r_;
  SpecializationCache cache_;
  size_t changes_ = 0;
  std::map<std::pair<std::string, std::string>, size_t> totals_;
  std::vector<std::pair<std::string, std::string>> order_;
};

}  // namespace

PipelineResult run_pipeline(const Program& input, const PipelineConfig& config) {
  PipelineResult res;
  res.program = input;
  Program& p = res.program;
  resolve_symbols(p);
  for (auto& f : p.functions) res.report.cost[f.name].before = count_generic_ops(f);

  Driver d(p, config, res.report);
  d.run();
  d.finish();

  if (res.report.total_changes())
    for (auto& f : p.functions) compact_values(f);
  auto diags = verify(p);
  if (!diags.empty()) {
    std::string msg = "pipeline output failed verification:";
    for (auto& x : diags) msg += "\n  " + to_string(x);
    throw std::runtime_error(msg);
  }
  for (auto& f : p.functions) {
    auto it = res.report.cost.find(f.name);
    if (it == res.report.cost.end()) {
      res.report.cost[f.name] = {0, count_generic_ops(f), true};
    } else {
      it->second.after = count_generic_ops(f);
    }
  }
  return res;
}

}  // namespace isskit::opt
