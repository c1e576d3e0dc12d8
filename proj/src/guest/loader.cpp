#include "isskit/guest/loader.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

namespace isskit::guest {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

Assembly assemble_file(const std::string& path) {
  return assemble(slurp(path));
}

void load(interp::Simulator& sim, const Assembly& a) {
  sim.load(a.origin, a.bytes);
  sim.set_pc(a.origin);
}

void load_binary(interp::Simulator& sim, const std::string& path, uint64_t addr) {
  std::string bytes = slurp(path);
  sim.load(addr, {reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()});
  sim.set_pc(addr);
}

}  // namespace isskit::guest
