// Signatures and effect classes of the builtin operations.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::mir {

enum class Effect : uint8_t {
  pure,     // no side effect, cannot trap
  checked,  // no side effect, may trap
  state,    // reads or writes machine state
  call,
};

Effect effect_of(Opcode op);

inline bool is_removable(const OpKind& op) { return effect_of(op.code) == Effect::pure; }
inline bool is_mergeable(const OpKind& op) {
  Effect e = effect_of(op.code);
  return e == Effect::pure || e == Effect::checked;
}

struct Signature {
  std::vector<Type> params;
  Type result;
};

// Signature of `op` in `program`. Operations whose signature depends on an
// operand (eq_enum, union_tag, record_get, record_set) take it from
// `first_operand`. Returns an error message for malformed type arguments.
std::variant<Signature, std::string> signature(const OpKind& op, const Program& program,
                                               const Type* first_operand = nullptr);

// The generic operation a specialized one restricts, if any.
std::optional<Opcode> generic_counterpart(Opcode op);

}  // namespace isskit::mir
