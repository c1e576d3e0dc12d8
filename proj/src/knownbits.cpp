#include "isskit/knownbits.hpp"

#include <fmt/format.h>

namespace isskit::kb {

std::string to_string(Tnum t) { return fmt::format("⟨{:#x}, {:#x}⟩", t.value, t.mask); }

}  // namespace isskit::kb
