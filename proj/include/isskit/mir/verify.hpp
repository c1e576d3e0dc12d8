// Well-formedness checks and SSA construction.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "isskit/mir/ir.hpp"

namespace isskit::mir {

struct Diagnostic {
  std::string function;
  std::string block;
  int statement = -1;  // -1: block header or terminator
  std::string message;
  SourceSpan span;
};

std::string to_string(const Diagnostic& d);

// Full check: types, terminators and SSA dominance.
std::vector<Diagnostic> verify(const Program& p);
std::vector<Diagnostic> verify_function(const Function& f, const Program& p);

// The mutable-local form: types match and labels resolve; locals may be
// assigned more than once.
std::vector<Diagnostic> verify_weak(const Program& p);

class SsaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rebuild `f` in SSA form. Locals become block parameters at joins.
// Throws SsaError when a local may be read before it is assigned.
Function to_ssa(const Function& f, const Program& p);
void to_ssa(Program& p);

}  // namespace isskit::mir
