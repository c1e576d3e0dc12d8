// Captures the interpreter's statements as raw trace ops.
#pragma once

#include <set>
#include <string>

#include "isskit/sim/memory.hpp"
#include "isskit/trace/trace.hpp"

namespace isskit::trace {

class TraceRecorder : public interp::Recorder {
 public:
  TraceRecorder(Trace& trace, const TraceConfig& config, bool memory_tracking);

  Ref constant(const rt::Value& v) override;
  Ref statement(const mir::Statement& s, const Ref* args, const rt::Value* const* argv,
                const rt::Value& result, const sim::FetchResult* fetched) override;
  void branch(Ref cond, bool taken) override;
  void insn_end();

  void abort(std::string reason);
  bool aborted() const { return !abort_reason_.empty(); }
  const std::string& abort_reason() const { return abort_reason_; }
  const std::set<uint64_t>& dependencies() const { return deps_; }

 private:
  Ref push(TraceOp op);

  Trace& trace_;
  const TraceConfig& config_;
  bool tracking_;
  ConstantPool pool_;
  std::set<uint64_t> deps_;
  std::string abort_reason_;
};

}  // namespace isskit::trace
