// abc: command-line front end.
//   exit 0 success / equivalent / reachable
//   exit 1 negative verdict
//   exit 2 inconclusive or truncated
//   exit 3 usage or parse error

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "abc/bpi.hpp"
#include "abc/equivalence.hpp"
#include "abc/explorer.hpp"
#include "abc/parser.hpp"
#include "abc/printer.hpp"

namespace {

enum Exit { kOk = 0, kNegative = 1, kInconclusive = 2, kUsage = 3 };

struct RunConfig {
  std::uint64_t seed = 0;
  int repl_bound = 2;
  std::size_t max_states = 100'000;
  int max_depth = 50;
  std::uint64_t budget = 1'000'000;
  std::vector<std::string> extra_values;
  std::string format = "text";

  abc::Bounds bounds() const {
    abc::Bounds b;
    b.max_states = max_states;
    b.max_depth = max_depth;
    b.repl_bound = repl_bound;
    return b;
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

abc::Program load(const std::string& path) {
  try {
    return abc::parse_program(slurp(path));
  } catch (const abc::ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const abc::ResolveError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Bare identifiers on the command line are names.
abc::Value cli_value(const std::string& text) {
  try {
    return abc::parse_value(text);
  } catch (const abc::ParseError&) {
    return abc::Value::name(text);
  }
}

std::vector<abc::Value> extra(const RunConfig& cfg) {
  std::vector<abc::Value> out;
  for (const auto& v : cfg.extra_values) out.push_back(cli_value(v));
  return out;
}

abc::Universe universe(const abc::Program& p, const RunConfig& cfg) {
  return abc::make_universe(p, extra(cfg), cfg.budget);
}

void header(const RunConfig& cfg) { std::cout << "# seed " << cfg.seed << "\n"; }

int cmd_parse(const std::string& file) {
  std::cout << abc::pretty(load(file)) << "\n";
  return kOk;
}

int cmd_step(const std::string& file, const RunConfig& cfg, bool interactive, int steps) {
  const abc::Program p = load(file);
  const abc::Universe u = universe(p, cfg);
  header(cfg);
  const abc::StepOptions opts{cfg.repl_bound};
  auto trace = abc::trace(p.main, p.definitions, u, steps, cfg.seed,
                          interactive ? abc::TracePolicy::Interactive : abc::TracePolicy::Random, &std::cin,
                          interactive ? &std::cerr : nullptr, opts);
  std::cout << "0 " << abc::pretty(p.main) << "\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::cout << "  -- " << abc::pretty(trace[i].label) << " -->\n";
    std::cout << i + 1 << " " << abc::pretty(trace[i].next) << "\n";
  }
  return kOk;
}

int cmd_explore(const std::string& file, const RunConfig& cfg) {
  const abc::Program p = load(file);
  const abc::Lts lts = abc::build_lts(p.main, p.definitions, universe(p, cfg), cfg.bounds(), cfg.seed);
  if (cfg.format == "structured")
    std::cout << abc::to_json(lts).dump(2) << "\n";
  else
    std::cout << abc::to_text(lts);
  return lts.truncated ? kInconclusive : kOk;
}

int cmd_barbs(const std::string& file, const RunConfig& cfg, bool weak) {
  const abc::Program p = load(file);
  const abc::Lts lts = abc::build_lts(p.main, p.definitions, universe(p, cfg), cfg.bounds(), cfg.seed);
  header(cfg);
  if (lts.truncated) std::cout << "# truncated: " << lts.reason << "\n";
  for (const auto& fp : abc::barbs(lts, lts.initial, weak)) {
    std::string shown;
    for (std::size_t i = 0; i < lts.labels.size(); ++i) {
      if (lts.labels[i].is_out() && lts.canonical[i].pred == fp) {
        shown = abc::pretty(lts.labels[i].pred);
        break;
      }
    }
    std::cout << (weak ? "weak barb " : "barb ") << shown << "  [" << abc::to_string(fp) << "]\n";
  }
  return lts.truncated ? kInconclusive : kOk;
}

int cmd_bisim(const std::string& a, const std::string& b, const RunConfig& cfg, bool strong, bool no_inputs) {
  const abc::Program pa = load(a);
  const abc::Program pb = load(b);
  abc::BisimOptions opts;
  opts.weak = !strong;
  opts.inputs = !no_inputs;
  opts.bounds = cfg.bounds();
  opts.seed = cfg.seed;
  opts.extra_values = extra(cfg);
  header(cfg);
  const abc::Verdict v = abc::bisim_programs(pa, pb, opts);
  std::cout << (strong ? "strong: " : "weak: ") << abc::describe(v);
  if (v.bounded) return kInconclusive;
  return v.equivalent ? kOk : kNegative;
}

abc::bpi::Term load_bpi(const std::string& file) {
  try {
    return abc::bpi::parse_bpi(slurp(file));
  } catch (const abc::ParseError& e) {
    throw UsageError(file + ": " + e.what());
  } catch (const abc::bpi::BpiError& e) {
    throw UsageError(file + ": " + e.what());
  }
}

int cmd_encode(const std::string& file) {
  std::cout << abc::pretty(abc::bpi::encode(load_bpi(file))) << "\n";
  return kOk;
}

int cmd_check_encoding(const std::string& file, const RunConfig& cfg, int depth) {
  const auto term = load_bpi(file);
  header(cfg);
  const auto rep = abc::bpi::correspondence_check(term, depth, cfg.seed);
  std::cout << "term " << abc::bpi::pretty(term) << "\n"
            << "depth " << depth << "\n"
            << "pairs " << rep.pairs << "\n"
            << "steps " << rep.steps << "\n"
            << "step mismatches " << rep.step_mismatches << "\n"
            << "barb mismatches " << rep.barb_mismatches << "\n"
            << "divergence mismatches " << rep.divergence_mismatches << "\n"
            << "invariance failures " << rep.invariance_failures << "\n"
            << "states compared up to alpha-renaming and attribute-environment equality\n";
  for (const auto& d : rep.details) std::cout << d << "\n";
  return rep.ok() ? kOk : kNegative;
}

int cmd_reach(const std::string& file, const RunConfig& cfg, const std::string& attr, const std::string& value) {
  const abc::Program p = load(file);
  const abc::Lts lts = abc::build_lts(p.main, p.definitions, universe(p, cfg), cfg.bounds(), cfg.seed);
  const abc::Value v = cli_value(value);
  header(cfg);
  if (lts.truncated) std::cout << "# truncated: " << lts.reason << "\n";
  auto w = abc::reachable(lts, abc::some_component_has(attr, v));
  if (!w) {
    std::cout << "unreachable: no component with " << attr << " = " << abc::pretty(v) << " in " << lts.states.size()
              << " states\n";
    return lts.truncated ? kInconclusive : kNegative;
  }
  std::cout << "reachable: state " << w->state << " after " << w->path.size() << " steps\n";
  std::cout << "0 " << abc::pretty(lts.states[lts.initial]) << "\n";
  for (std::size_t i = 0; i < w->path.size(); ++i) {
    const auto& t = lts.transitions[w->path[i]];
    std::cout << "  -- " << abc::pretty(lts.labels[t.label]) << " -->\n";
    std::cout << i + 1 << " " << abc::pretty(lts.states[t.dst]) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-based communication: parser, stepper, explorer, equivalence checker, bpi encoder"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--repl-bound", cfg.repl_bound, "copies a replication may spawn")->check(CLI::PositiveNumber);
    sub->add_option("--max-states", cfg.max_states, "state bound")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", cfg.max_depth, "depth bound")->check(CLI::PositiveNumber);
    sub->add_option("--extra-value", cfg.extra_values, "add a value to the universe (repeatable)");
    sub->add_option("--budget", cfg.budget, "environment enumeration budget")->check(CLI::PositiveNumber);
  };

  std::string file, file_b, attr, value;
  bool interactive = false, strong = false, weak = false, no_inputs = false;
  int steps = 20, depth = 5;

  auto* parse = app.add_subcommand("parse", "parse and pretty-print a program");
  parse->add_option("file", file)->required();

  auto* step = app.add_subcommand("step", "run a trace");
  step->add_option("file", file)->required();
  common(step);
  step->add_flag("--interactive", interactive, "choose transitions from stdin");
  step->add_option("--steps", steps, "number of steps")->check(CLI::NonNegativeNumber);

  auto* explore = app.add_subcommand("explore", "build the bounded transition system");
  explore->add_option("file", file)->required();
  common(explore);
  explore->add_option("--format", cfg.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));

  auto* barbs = app.add_subcommand("barbs", "observable outputs of the initial state");
  barbs->add_option("file", file)->required();
  common(barbs);
  barbs->add_flag("--weak", weak, "barbs reachable through silent and output moves");

  auto* bisim = app.add_subcommand("bisim", "compare two programs");
  bisim->add_option("a", file)->required();
  bisim->add_option("b", file_b)->required();
  common(bisim);
  auto* fs = bisim->add_flag("--strong", strong, "strong bisimilarity");
  auto* fw = bisim->add_flag("--weak", weak, "weak bisimilarity (default)");
  fs->excludes(fw);
  bisim->add_flag("--no-inputs", no_inputs, "ignore input transitions");

  auto* encode = app.add_subcommand("encode", "translate a bpi term into AbC");
  encode->add_option("file", file)->required();

  auto* check = app.add_subcommand("check-encoding", "compare a bpi term with its encoding");
  check->add_option("file", file)->required();
  check->add_option("--seed", cfg.seed, "seed for sampled renamings");
  check->add_option("--depth", depth, "exploration depth")->check(CLI::NonNegativeNumber);

  auto* reach = app.add_subcommand("reach", "search for a state where some component has attr = value");
  reach->add_option("file", file)->required();
  common(reach);
  reach->add_option("--attr", attr)->required();
  reach->add_option("--value", value)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) return cmd_parse(file);
    if (*step) return cmd_step(file, cfg, interactive, steps);
    if (*explore) return cmd_explore(file, cfg);
    if (*barbs) return cmd_barbs(file, cfg, weak);
    if (*bisim) return cmd_bisim(file, file_b, cfg, strong, no_inputs);
    if (*encode) return cmd_encode(file);
    if (*check) return cmd_check_encoding(file, cfg, depth);
    if (*reach) return cmd_reach(file, cfg, attr, value);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const abc::UniverseTooLarge& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconclusive;
  }
  return kUsage;
}
