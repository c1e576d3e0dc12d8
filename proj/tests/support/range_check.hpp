// Checks every integer a running interpreter produces against the range the
// static analysis reported for it.
#pragma once

#include <string>
#include <unordered_map>

#include "isskit/analysis/range.hpp"
#include "isskit/interp/interpreter.hpp"

namespace isskit::testing {

class RangeChecker : public interp::Recorder {
 public:
  explicit RangeChecker(const mir::Program& p) {
    for (const mir::Function& f : p.functions) {
      analysis::RangeMap m = analysis::analyze(f, p);
      for (const mir::Block& b : f.blocks)
        for (const mir::Statement& s : b.stmts)
          if (s.result != mir::kNoValue && m[s.result])
            ranges_.emplace(&s, Entry{&f, f.values[s.result].name, *m[s.result]});
    }
  }

  interp::Ref constant(const rt::Value&) override { return 0; }
  interp::Ref statement(const mir::Statement& s, const interp::Ref*, const rt::Value* const*,
                        const rt::Value& result, const sim::FetchResult*) override {
    auto it = ranges_.find(&s);
    if (it == ranges_.end()) return 0;
    rt::BigInt v;
    if (auto i = result.get_if<rt::I64>()) v = i->v;
    else if (auto g = result.get_if<rt::GenericInt>()) v = g->to_big();
    else return 0;
    ++checked_;
    if (!it->second.range.contains(v)) {
      ++violations_;
      if (first_.empty())
        first_ = it->second.fn->name + ":" + it->second.value + " = " + v.str() + " outside " +
                 analysis::to_string(it->second.range);
    }
    return 0;
  }
  void branch(interp::Ref, bool) override {}

  size_t checked() const { return checked_; }
  size_t violations() const { return violations_; }
  const std::string& first_violation() const { return first_; }

 private:
  struct Entry {
    const mir::Function* fn;
    std::string value;
    analysis::IntRange range;
  };
  std::unordered_map<const mir::Statement*, Entry> ranges_;
  size_t checked_ = 0, violations_ = 0;
  std::string first_;
};

}  // namespace isskit::testing
