#include "isskit/bench/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "isskit/analysis/range.hpp"
#include "isskit/bench/bench.hpp"
#include "isskit/guest/generator.hpp"
#include "isskit/guest/loader.hpp"
#include "isskit/mir/parser.hpp"

namespace isskit::bench {

namespace {

struct Common {
  std::string model = std::string(ISSKIT_SOURCE_DIR) + "/models/rv64mini";
  std::string variant = "full";
};

struct Guest {
  std::string program;  // .s path or shipped guest name
  std::string load;     // FILE@ADDR
  int64_t seed = -1;
  uint64_t budget = 0;
  uint64_t tick_interval = 100;
  uint64_t hot_threshold = 57;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--model", c.model, "model directory or .mir file");
  app->add_option("--variant", c.variant, "ablation variant")->check(CLI::IsMember(variant_names()));
}

void add_guest(CLI::App* app, Guest& g) {
  app->add_option("program", g.program, "assembly file or shipped guest name");
  app->add_option("--load", g.load, "raw binary image as FILE@ADDR; pc starts at ADDR");
  app->add_option("--seed", g.seed, "run the generated program for this seed");
  app->add_option("--budget", g.budget, "instruction budget (0 = unlimited)");
  app->add_option("--tick-interval", g.tick_interval, "instructions between tick calls");
  app->add_option("--hot-threshold", g.hot_threshold, "backward jumps before a loop is traced");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

guest::Assembly program_assembly(const std::string& program) {
  if (std::filesystem::exists(program)) return guest::assemble_file(program);
  std::string shipped = std::string(ISSKIT_SOURCE_DIR) + "/guest/" + program + ".s";
  if (std::filesystem::exists(shipped)) return guest::assemble_file(shipped);
  throw std::runtime_error("no such program '" + program + "'");
}

uint64_t parse_address(const std::string& s) {
  size_t used = 0;
  uint64_t v = std::stoull(s, &used, 0);
  if (used != s.size()) throw std::runtime_error("bad address '" + s + "'");
  return v;
}

// Loads whichever guest the options name into `sim`.
void load_guest(interp::Simulator& sim, const Guest& g) {
  int sources = !g.program.empty() + !g.load.empty() + (g.seed >= 0);
  if (sources != 1) throw std::runtime_error("give exactly one of PROGRAM, --load or --seed");
  if (!g.load.empty()) {
    auto at = g.load.rfind('@');
    if (at == std::string::npos) throw std::runtime_error("--load expects FILE@ADDR");
    guest::load_binary(sim, g.load.substr(0, at), parse_address(g.load.substr(at + 1)));
  } else if (g.seed >= 0) {
    guest::load(sim, guest::assemble(guest::gen_random_program(static_cast<uint64_t>(g.seed))));
  } else {
    guest::load(sim, program_assembly(g.program));
  }
}

interp::SimConfig sim_config(const AblationVariant& v, const Guest& g) {
  interp::SimConfig base;
  if (g.budget) base.budget = g.budget;
  base.tick_interval = g.tick_interval;
  base.trace.hot_threshold = g.hot_threshold;
  return v.sim_config(base);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_compile(const Common& c, const std::string& output, const std::string& report, bool dump_ranges,
                std::ostream& out) {
  auto model = mir::load_model(c.model);
  auto res = opt::run_pipeline(model, variant(c.variant).pipeline);
  std::string text = mir::pretty_print(res.program);
  if (!output.empty())
    write_file(output, text);
  else if (report.empty() && !dump_ranges)
    out << text;
  if (report == "-")
    out << res.report.table();
  else if (!report.empty())
    write_file(report, res.report.table());
  if (dump_ranges) out << analysis::dump_ranges(res.program);
  return 0;
}

int cmd_run(const Common& c, const Guest& g, bool stats, std::ostream& out, std::ostream& err) {
  auto model = mir::load_model(c.model);
  const AblationVariant& v = variant(c.variant);
  auto program = opt::run_pipeline(model, v.pipeline).program;
  interp::Simulator sim(program, sim_config(v, g));
  load_guest(sim, g);
  int code = 0;
  try {
    sim.run();
  } catch (const interp::Trap& t) {
    err << fmt::format("trap: {} (in {}:{}) at pc 0x{:X}\n", t.message(), t.function(), t.block(), t.pc());
    code = 2;
  }
  out << interp::register_dump(sim.state(), program);
  if (!sim.memory().console().empty()) err << sim.memory().console();
  if (stats) out << interp::to_string(sim.stats());
  return code;
}

int cmd_trace_dump(const Common& c, const Guest& g, const std::string& anchor, std::ostream& out, std::ostream& err) {
  auto model = mir::load_model(c.model);
  const AblationVariant& v = variant(c.variant);
  if (!v.tracing) throw std::runtime_error("variant '" + v.name + "' does not trace");
  auto program = opt::run_pipeline(model, v.pipeline).program;
  interp::Simulator sim(program, sim_config(v, g));
  load_guest(sim, g);
  try {
    sim.run();
  } catch (const interp::Trap& t) {
    err << fmt::format("trap: {} at pc 0x{:X}\n", t.message(), t.pc());
  }
  std::optional<uint64_t> only;
  if (!anchor.empty()) only = parse_address(anchor);
  size_t shown = 0;
  for (auto& t : sim.engine()->traces()) {
    if (only && t->anchor_pc != *only) continue;
    out << fmt::format("# trace {} anchor 0x{:X}{}\n", t->id, t->anchor_pc, t->valid ? "" : " (invalidated)");
    out << fmt::format("# raw: {} ops, {} guards\n", t->raw.size(), t->guard_count(false));
    out << trace::dump(t->raw, *t, program);
    out << fmt::format("# optimized: {} ops, {} guards\n", t->optimized.size(), t->guard_count(true));
    out << trace::dump(t->optimized, *t, program);
    ++shown;
  }
  if (!shown) {
    err << "no traces recorded\n";
    return 1;
  }
  return 0;
}

int cmd_bench(const Common& c, const std::string& programs, const std::string& variants_list, int64_t seed,
              const Guest& g, const std::string& report, std::ostream& out) {
  auto model = mir::load_model(c.model);
  std::vector<BenchProgram> set;
  if (programs.empty() && seed < 0) set = standard_programs();
  for (auto& name : split(programs)) set.push_back({name, program_assembly(name)});
  if (seed >= 0)
    set.push_back({fmt::format("gen:{}", seed), guest::assemble(guest::gen_random_program(uint64_t(seed))),
                   guest::kMaxDynamicInstructions});
  auto names = variants_list.empty() ? variant_names() : split(variants_list);
  for (auto& n : names) variant(n);
  BenchOptions o;
  o.budget = g.budget;
  o.tick_interval = g.tick_interval;
  o.hot_threshold = g.hot_threshold;
  auto r = run_bench(model, set, names, o);
  out << r.table();
  if (report == "-")
    out << r.csv();
  else if (!report.empty())
    write_file(report, r.csv());
  for (auto& row : r.rows)
    if (row.trapped) throw std::runtime_error(row.program + " trapped under " + row.variant);
  return 0;
}

int cmd_assemble(const std::string& input, const std::string& output, const std::string& symbols, std::ostream& out) {
  auto a = guest::assemble_file(input);
  std::string bytes(a.bytes.begin(), a.bytes.end());
  write_file(output, bytes);
  if (symbols == "-")
    out << guest::symbol_map(a);
  else if (!symbols.empty())
    write_file(symbols, guest::symbol_map(a));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Instruction set simulator toolkit over a MIR processor model", "isskit"};
  app.require_subcommand(1);

  Common common;
  Guest guest_opts;

  auto* compile = app.add_subcommand("compile", "optimize the model and print it");
  add_common(compile, common);
  std::string output, report;
  bool dump_ranges = false;
  compile->add_option("-o,--output", output, "write the optimized model here");
  compile->add_option("--report", report, "write the pass report here ('-' for stdout)");
  compile->add_flag("--dump-ranges", dump_ranges, "print integer ranges as fn:block:value lo..hi");

  auto* run = app.add_subcommand("run", "run a guest program and print its registers");
  add_common(run, common);
  add_guest(run, guest_opts);
  bool stats = false;
  run->add_flag("--stats", stats, "also print run statistics");

  auto* tdump = app.add_subcommand("trace-dump", "run a guest program and print its traces");
  add_common(tdump, common);
  add_guest(tdump, guest_opts);
  std::string anchor;
  tdump->add_option("--anchor", anchor, "only the trace anchored at this pc");

  auto* bench = app.add_subcommand("bench", "micro-op metrics per program and variant");
  bench->add_option("--model", common.model, "model directory or .mir file");
  std::string programs, variants_list, bench_report;
  int64_t bench_seed = -1;
  bench->add_option("--programs", programs, "comma-separated guest names or .s files");
  bench->add_option("--variants", variants_list, "comma-separated variant names (default: all)");
  bench->add_option("--seed", bench_seed, "add the generated program for this seed");
  bench->add_option("--budget", guest_opts.budget, "instruction budget override");
  bench->add_option("--tick-interval", guest_opts.tick_interval, "instructions between tick calls");
  bench->add_option("--hot-threshold", guest_opts.hot_threshold, "backward jumps before a loop is traced");
  bench->add_option("--report", bench_report, "write the CSV report here ('-' for stdout)");

  auto* assemble = app.add_subcommand("assemble", "assemble a .s file into a flat binary");
  std::string asm_in, asm_out, symbols;
  assemble->add_option("input", asm_in, "assembly source")->required();
  assemble->add_option("-o,--output", asm_out, "binary output")->required();
  assemble->add_option("--symbols", symbols, "write the symbol map here ('-' for stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() ? e.get_exit_code() : 1;
  }

  try {
    if (*compile) return cmd_compile(common, output, report, dump_ranges, out);
    if (*run) return cmd_run(common, guest_opts, stats, out, err);
    if (*tdump) return cmd_trace_dump(common, guest_opts, anchor, out, err);
    if (*bench) return cmd_bench(common, programs, variants_list, bench_seed, guest_opts, bench_report, out);
    if (*assemble) return cmd_assemble(asm_in, asm_out, symbols, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace isskit::bench
