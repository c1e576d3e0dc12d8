// Evaluation of side-effect-free operations, shared by the interpreter, the
// constant folder and the trace executor.
#pragma once

#include "isskit/mir/ir.hpp"
#include "isskit/rt/value.hpp"

namespace isskit::mir {

// `op` must have resolved symbols when it touches aggregates. State and call
// operations are rejected with std::logic_error.
rt::Value eval_pure(const OpKind& op, const rt::Value* const* args, size_t nargs, rt::Context& ctx);

}  // namespace isskit::mir
