// Guest images into a simulator.
#pragma once

#include <string>

#include "isskit/guest/assembler.hpp"
#include "isskit/interp/simulator.hpp"

namespace isskit::guest {

Assembly assemble_file(const std::string& path);

// Copies the image to its origin and points pc at it.
void load(interp::Simulator& sim, const Assembly& a);

// Loads a raw binary at `addr` and points pc at it.
void load_binary(interp::Simulator& sim, const std::string& path, uint64_t addr);

}  // namespace isskit::guest
