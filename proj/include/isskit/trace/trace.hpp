// Linear micro-op traces over one guest loop iteration.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "isskit/interp/interpreter.hpp"
#include "isskit/knownbits.hpp"
#include "isskit/mir/ir.hpp"

namespace isskit::trace {

using interp::kNoRef;
using interp::Ref;

struct TraceConfig {
  uint64_t hot_threshold = 57;
  size_t max_length = 20'000;
  unsigned max_aborts = 3;
  bool use_knownbits = true;
};

enum class TraceOpKind : uint8_t {
  op,              // pure or checked model operation
  read_state,      // read_reg
  write_state,     // write_reg
  mem_read,
  mem_write,
  fetch,
  guard_true,
  guard_false,
  guard_value_eq,  // args[0] == value
  guard_pc_eq,     // fetch address promoted to a constant
  insn_end,        // instruction boundary: count, tick check, exit check
};

std::string_view to_string(TraceOpKind k);

struct TraceOp {
  TraceOpKind kind = TraceOpKind::op;
  mir::OpKind op;           // op, mem_read, mem_write
  uint32_t reg = 0;         // read_state, write_state
  std::vector<Ref> args;
  rt::Value value;          // guard_value_eq, guard_pc_eq: expected value
  std::optional<kb::Tnum> tnum;
  bool has_result = false;
  // Shape of the result as seen while recording: a fixed bitvector of
  // `width` bits, a bool (width 1, is_bool), or neither (width 0).
  uint32_t width = 0;
  bool is_bool = false;

  bool is_guard() const {
    return kind == TraceOpKind::guard_true || kind == TraceOpKind::guard_false ||
           kind == TraceOpKind::guard_value_eq || kind == TraceOpKind::guard_pc_eq;
  }
};

inline bool is_const_ref(Ref r) { return r < 0 && r != kNoRef; }
inline size_t const_index(Ref r) { return static_cast<size_t>(-1 - r); }
inline Ref const_ref(size_t index) { return -1 - static_cast<Ref>(index); }

struct Trace {
  uint64_t id = 0;
  uint64_t anchor_pc = 0;
  std::vector<rt::Value> constants;
  std::vector<TraceOp> raw;
  std::vector<TraceOp> optimized;
  std::vector<uint64_t> dependencies;  // word addresses of folded fetches
  bool valid = true;

  size_t guard_count(bool optimized_ops = true) const;
};

// `id = op(args) [tnum <v,m>]` lines.
std::string dump(const std::vector<TraceOp>& ops, const Trace& t, const mir::Program& p);

// Constant-pool interning shared by recording and optimization.
class ConstantPool {
 public:
  explicit ConstantPool(std::vector<rt::Value>& values);
  Ref intern(const rt::Value& v);

 private:
  std::vector<rt::Value>& values_;
  std::unordered_multimap<size_t, size_t> index_;
};

}  // namespace isskit::trace
