// Text form of MIR programs (.mir files).
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "isskit/mir/ir.hpp"

namespace isskit::mir {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

// Parse the mutable-local form. The result passes verify_weak.
Program parse_program(std::string_view text, const std::string& file_name = "<input>");

// Parse and concatenate several files into one program.
Program parse_files(const std::vector<std::string>& paths);

// Every *.mir file in a directory, in name order, parsed as one program,
// converted to SSA and verified. Throws on any error.
Program load_model(const std::string& dir_or_file);

std::string pretty_print(const Program& p);
std::string pretty_print(const Function& f, const Program& p);
std::string format_literal(const rt::Value& v, const Program& p);

// Equality up to source spans and value numbering: values compare by name.
bool structurally_equal(const Program& a, const Program& b, std::string* why = nullptr);
bool structurally_equal(const Function& a, const Function& b, const Program& pa,
                        const Program& pb, std::string* why = nullptr);

}  // namespace isskit::mir
