// limid: command-line front end for the influence diagram toolkit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "limid/benchmarks.hpp"
#include "limid/emit.hpp"
#include "limid/error.hpp"
#include "limid/formulation.hpp"
#include "limid/io.hpp"
#include "limid/solvers.hpp"

using namespace limid;
using nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError: return kExitIo;
    case ErrorCode::PathExplosion:
    case ErrorCode::StrategySpaceTooLarge: return kExitCapacity;
    default: return kExitValidation;
  }
}

// Canonical "--flag value" rendering of every option of a subcommand.
std::string flag_string(const CLI::App& cmd) {
  std::string out;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    if (opt->get_expected_min() == 0) {
      if (opt->count() == 0) continue;
      if (!out.empty()) out += ' ';
      out += opt->get_name();
      continue;
    }
    const auto values = opt->results();
    if (values.empty()) {
      const std::string def = opt->get_default_str();
      if (def.empty()) continue;
      if (!out.empty()) out += ' ';
      out += opt->get_name() + " " + def;
      continue;
    }
    for (const auto& v : values) {
      if (!out.empty()) out += ' ';
      out += opt->get_name().empty() ? v : opt->get_name() + " " + v;
    }
  }
  return out;
}

ordered_json provenance(const CLI::App& cmd) {
  return {{"toolkit_version", LIMID_VERSION}, {"command", cmd.get_name()}, {"flags", flag_string(cmd)}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Toggle parse_toggle(const std::string& s) {
  if (s == "on") return Toggle::On;
  if (s == "off") return Toggle::Off;
  return Toggle::Auto;
}

FormulationKind parse_formulation(const std::string& s) {
  return s == "original" ? FormulationKind::Original : FormulationKind::Improved;
}

struct FormulationFlags {
  std::string formulation = "improved";
  std::string lower_bound = "auto";
  bool probcut = false;
  bool no_probcut = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--formulation", formulation, "original or improved")
        ->check(CLI::IsMember({"original", "improved"}))
        ->capture_default_str();
    cmd->add_option("--lower-bound", lower_bound, "lower-bound rows of the original form: auto, on or off")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();
    auto* on = cmd->add_flag("--probcut", probcut, "include the probability cut row");
    auto* off = cmd->add_flag("--no-probcut", no_probcut, "omit the probability cut row");
    on->excludes(off);
  }

  FormulationOptions options() const {
    FormulationOptions o;
    o.lower_bound = parse_toggle(lower_bound);
    if (probcut) o.probability_cut = true;
    if (no_probcut) o.probability_cut = false;
    return o;
  }
};

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> closed_form(const Family& f) {
  if (f.n < 1 || f.n > 20) return std::nullopt;
  const std::uint64_t n = static_cast<std::uint64_t>(f.n);
  if (f.name == "pigfarm") {
    return std::pair{(3 + n) * (std::uint64_t{1} << (3 * n + 1)) + 2 * n, (std::uint64_t{1} << (3 * n + 2)) + 6 * n};
  }
  if (f.name == "nmonitoring") {
    return std::pair{(3 + n) * (std::uint64_t{1} << (2 * n + 2)) + 2 * n, (std::uint64_t{1} << (2 * n + 3)) + 6 * n};
  }
  return std::nullopt;
}

InfluenceDiagram generate(const std::string& family, int n, const GeneratorOptions& g) {
  if (family == "pigfarm") return gen_pigfarm(n, g);
  return gen_nmonitoring(n, g);
}

int cmd_validate(const std::string& path) {
  const DiagramFile file = load_diagram(path);
  const auto& d = file.diagram;
  std::cout << plural(d.order().size(), "path node") << ", " << plural(d.value_nodes().size(), "value node")
            << ", |S|=" << d.path_count() << "\n";
  const PathTable table = enumerate_paths(d, file.enumeration);
  if (table.size() != d.path_count()) std::cout << "|S*|=" << table.size() << "\n";
  for (const auto& w : d.warnings()) std::cout << "warning: " << w << "\n";
  for (const auto& w : table.warnings()) std::cout << "warning: " << w << "\n";
  return 0;
}

void print_stats(const char* label, const FormulationStats& s) {
  std::cout << label << ": binary=" << s.n_binary << " continuous=" << s.n_continuous
            << " constraints=" << s.n_constraints << " structural_rows=" << s.n_structural_rows
            << " bounds=" << s.n_bounds << " count=" << s.closed_form_count() << "\n";
}

int cmd_stats(const std::string& path, const FormulationFlags& flags, bool both) {
  const DiagramFile file = load_diagram(path);
  const PathTable table = enumerate_paths(file.diagram, file.enumeration);
  const auto opts = flags.options();
  const auto report = [&](FormulationKind kind) {
    const ModelIR model = build(kind, file.diagram, table, opts);
    print_stats(kind == FormulationKind::Original ? "original" : "improved", stats(model));
    if (kind == FormulationKind::Original && !model.lower_bound_rows) {
      FormulationOptions with_lb = opts;
      with_lb.lower_bound = Toggle::On;
      std::cout << "original: lower-bound rows omitted (all U(s) >= 0); count with them="
                << stats(build(kind, file.diagram, table, with_lb)).closed_form_count() << "\n";
    }
  };
  if (both) {
    report(FormulationKind::Original);
    report(FormulationKind::Improved);
  } else {
    report(parse_formulation(flags.formulation));
  }
  const std::uint64_t po = predicted_original_count(file.diagram);
  const std::uint64_t pi = predicted_improved_count(file.diagram);
  std::cout << "closed form: original=" << po << " improved=" << pi << "\n";
  if (file.family) {
    if (const auto cf = closed_form(*file.family)) {
      std::cout << file.family->name << " n=" << file.family->n << ": original=" << cf->first
                << " improved=" << cf->second << "\n";
    }
  }
  std::cout << "improved " << (pi < po ? "<" : pi == po ? "=" : ">") << " original\n";
  return 0;
}

int cmd_emit(const std::string& path, const FormulationFlags& flags, const std::string& format,
             const std::string& out, std::uint64_t path_cap) {
  const DiagramFile file = load_diagram(path);
  EnumerationOptions e = file.enumeration;
  e.path_cap = path_cap;
  const PathTable table = enumerate_paths(file.diagram, e);
  const ModelIR model = build(parse_formulation(flags.formulation), file.diagram, table, flags.options());
  write_file(out, format == "mps" ? write_mps(model) : write_lp(model));
  print_stats(flags.formulation.c_str(), stats(model));
  return 0;
}

struct SolveFlags {
  std::string method = "spu";
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::uint64_t strategy_cap = kDefaultStrategyCap;
  std::string import_solution;
  std::string dump_assignment;
  bool trace = false;
};

ordered_json trace_json(const InfluenceDiagram& d, const std::vector<Move>& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& m : trace) {
    const Node& n = d.node(m.decision);
    out.push_back({{"node", n.name},
                   {"info_state", d.info_state_label(m.decision, m.info_state)},
                   {"from", n.states[m.from]},
                   {"to", n.states[m.to]},
                   {"old_eu", m.old_eu},
                   {"new_eu", m.new_eu}});
  }
  return out;
}

int cmd_solve(const CLI::App& cmd, const std::string& path, const SolveFlags& f, const FormulationFlags& ff) {
  const DiagramFile file = load_diagram(path);
  const auto& d = file.diagram;
  const PathTable table = enumerate_paths(d, file.enumeration);
  ordered_json out = provenance(cmd);
  Strategy strategy;

  if (!f.import_solution.empty()) {
    const ModelIR model = build(parse_formulation(ff.formulation), d, table, ff.options());
    const SolutionReport report = read_solution(model, d, table, read_file(f.import_solution));
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    out["method"] = "import";
    if (report.file_objective) out["file_objective"] = *report.file_objective;
    out["expected_utility"] = report.expected_utility;
    out["compatible_mass"] = compatible_mass(d, table, report.strategy);
    strategy = report.strategy;
  } else if (f.method == "brute") {
    const BruteForceResult r = brute_force(d, table, f.strategy_cap);
    out["method"] = "brute";
    out["expected_utility"] = r.expected_utility;
    out["compatible_mass"] = r.mass;
    out["examined"] = r.examined;
    strategy = r.strategy;
  } else {
    const MultiStartResult r = spu_multistart(d, table, f.restarts, f.seed, f.threads);
    out["method"] = "spu";
    out["expected_utility"] = r.best.expected_utility;
    out["compatible_mass"] = r.best.mass;
    out["best_restart"] = r.best_restart;
    out["moves"] = r.best.trace.size();
    if (f.trace) out["trace"] = trace_json(d, r.best.trace);
    strategy = r.best.strategy;
  }
  out["strategy"] = strategy_to_json(d, strategy);

  if (!f.dump_assignment.empty()) {
    const ModelIR model = build(parse_formulation(ff.formulation), d, table, ff.options());
    write_file(f.dump_assignment, write_solution(model, strategy_to_assignment(model, d, table, strategy)));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct BenchFlags {
  std::string family = "pigfarm";
  int n = 3;
  std::size_t instances = 50;
  std::uint64_t seed = 0;
  std::string method = "both";
  std::size_t restarts = 10;
  std::size_t threads = 1;
  bool negative = false;
  bool no_timing = false;
};

struct BenchRow {
  std::uint64_t seed = 0;
  std::uint64_t paths = 0;
  std::optional<double> brute;
  std::optional<double> spu;
  std::size_t moves = 0;
  double wall_ms = 0.0;
};

int cmd_bench(const CLI::App& cmd, const BenchFlags& f) {
  std::vector<BenchRow> rows(f.instances);
  const auto run = [&](std::size_t i) {
    BenchRow& row = rows[i];
    row.seed = f.seed + i;
    const InfluenceDiagram d = generate(f.family, f.n, {row.seed, true, f.negative});
    const PathTable table = enumerate_paths(d);
    row.paths = table.size();
    if (f.method != "spu") {
      try {
        row.brute = brute_force(d, table).expected_utility;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StrategySpaceTooLarge) throw;
      }
    }
    if (f.method != "brute") {
      const auto t0 = std::chrono::steady_clock::now();
      const MultiStartResult r = spu_multistart(d, table, f.restarts, row.seed);
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      row.spu = r.best.expected_utility;
      row.moves = r.best.trace.size();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(f.threads, f.instances));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < f.instances; i += threads) run(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::string flags = csv_field(flag_string(cmd));
  std::cout << "instance,seed,paths,brute_eu,spu_eu,spu_moves,spu_wall_ms,match,toolkit_version,flags\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BenchRow& r = rows[i];
    std::string match;
    if (r.brute && r.spu) match = std::abs(*r.brute - *r.spu) <= 1e-9 * std::max(1.0, std::abs(*r.brute)) ? "1" : "0";
    char wall[32] = "";
    if (r.spu && !f.no_timing) std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    std::cout << i << ',' << r.seed << ',' << r.paths << ',' << (r.brute ? format_number(*r.brute) : "") << ','
              << (r.spu ? format_number(*r.spu) : "") << ',' << (r.spu ? std::to_string(r.moves) : "") << ','
              << wall << ',' << match << ',' << LIMID_VERSION << ',' << flags << '\n';
  }
  return 0;
}

int cmd_generate(const std::string& family, int n, const GeneratorOptions& g, const std::string& out) {
  const InfluenceDiagram d = generate(family, n, g);
  const std::string text = diagram_to_json(d, {}, Family{family, n}).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_chd(const CLI::App& cmd, const ChdParams& params, const PerPriorOptions& options, bool as_json,
            const std::string& model_out) {
  if (!model_out.empty()) {
    const ChdModel model = gen_chd(params);
    write_file(model_out, diagram_to_json(model.diagram, model.enumeration()).dump(2) + "\n");
  }
  const auto rows = solve_per_prior(params, options);
  if (!as_json) {
    std::cout << "# synthetic placeholder parameters\n" << format_per_prior(rows);
    return 0;
  }
  ordered_json out = provenance(cmd);
  out["levels"] = ordered_json::array();
  for (const auto& r : rows) {
    out["levels"].push_back({{"level", r.level},
                             {"risk", r.risk},
                             {"first_test", r.first_test},
                             {"treatment", r.treatment},
                             {"expected_utility", r.expected_utility}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence diagram toolkit: validation, MILP emission and native solvers"};
  app.set_version_flag("--version", std::string(LIMID_VERSION));
  app.require_subcommand(1);

  std::string path;

  auto* validate = app.add_subcommand("validate", "check a diagram file and summarize it");
  validate->add_option("diagram", path, "diagram JSON")->required();

  FormulationFlags stats_flags;
  bool stats_both = false;
  auto* stats_cmd = app.add_subcommand("stats", "formulation sizes");
  stats_cmd->add_option("diagram", path, "diagram JSON")->required();
  stats_flags.add(stats_cmd);
  stats_cmd->add_flag("--both", stats_both, "report both formulations");

  FormulationFlags emit_flags;
  std::string emit_format = "lp";
  std::string emit_out;
  std::uint64_t path_cap = kDefaultPathCap;
  auto* emit = app.add_subcommand("emit", "write the MILP as an LP or MPS file");
  emit->add_option("diagram", path, "diagram JSON")->required();
  emit_flags.add(emit);
  emit->add_option("--format", emit_format, "lp or mps")->check(CLI::IsMember({"lp", "mps"}))->capture_default_str();
  emit->add_option("--out", emit_out, "output file")->required();
  emit->add_option("--path-cap", path_cap, "maximum number of paths")->capture_default_str();

  SolveFlags solve_flags;
  FormulationFlags solve_form;
  auto* solve = app.add_subcommand("solve", "solve natively or import an external solution");
  solve->add_option("diagram", path, "diagram JSON")->required();
  solve->add_option("--method", solve_flags.method, "brute or spu")
      ->check(CLI::IsMember({"brute", "spu"}))
      ->capture_default_str();
  solve->add_option("--restarts", solve_flags.restarts, "spu restarts")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--seed", solve_flags.seed, "spu seed")->capture_default_str();
  solve->add_option("--threads", solve_flags.threads, "spu worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--strategy-cap", solve_flags.strategy_cap, "brute-force strategy cap")->capture_default_str();
  solve->add_flag("--trace", solve_flags.trace, "include the spu improvement trace");
  solve->add_option("--import-solution", solve_flags.import_solution, "solution file (name value lines)");
  solve->add_option("--dump-assignment", solve_flags.dump_assignment, "write the strategy as a solution file");
  solve_form.add(solve);

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "per-instance CSV over random benchmark instances");
  bench->add_option("--family", bench_flags.family, "pigfarm or nmonitoring")
      ->check(CLI::IsMember({"pigfarm", "nmonitoring"}))
      ->capture_default_str();
  bench->add_option("--n", bench_flags.n, "stages")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--instances", bench_flags.instances, "number of instances")->capture_default_str();
  bench->add_option("--seed", bench_flags.seed, "seed of instance 0")->capture_default_str();
  bench->add_option("--method", bench_flags.method, "brute, spu or both")
      ->check(CLI::IsMember({"brute", "spu", "both"}))
      ->capture_default_str();
  bench->add_option("--restarts", bench_flags.restarts, "spu restarts")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--threads", bench_flags.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_flag("--negative-utilities", bench_flags.negative, "utilities on [-1,1]");
  bench->add_flag("--no-timing", bench_flags.no_timing, "leave the wall time column empty");

  std::string gen_family = "pigfarm";
  int gen_n = 1;
  GeneratorOptions gen_opts;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a benchmark diagram as JSON");
  gen->add_option("--family", gen_family, "pigfarm or nmonitoring")
      ->check(CLI::IsMember({"pigfarm", "nmonitoring"}))
      ->capture_default_str();
  gen->add_option("--n", gen_n, "stages")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", gen_opts.seed, "seed")->capture_default_str();
  gen->add_flag("--randomize", gen_opts.randomize, "random probabilities and utilities");
  gen->add_flag("--negative-utilities", gen_opts.negative_utilities, "random utilities on [-1,1]");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  ChdParams chd_params;
  PerPriorOptions chd_opts;
  std::string chd_solver = "brute";
  bool chd_json = false;
  std::string chd_model_out;
  auto* chd = app.add_subcommand("chd", "per-risk-level solve of the CHD testing diagram");
  chd->add_option("--levels", chd_params.risk_levels, "risk grid points")->capture_default_str();
  chd->add_option("--solver", chd_solver, "brute or spu")->check(CLI::IsMember({"brute", "spu"}))->capture_default_str();
  chd->add_option("--restarts", chd_opts.restarts, "spu restarts")->check(CLI::PositiveNumber)->capture_default_str();
  chd->add_option("--seed", chd_opts.seed, "spu seed")->capture_default_str();
  chd->add_option("--threads", chd_opts.threads, "levels solved concurrently")->check(CLI::PositiveNumber)->capture_default_str();
  chd->add_option("--trs-sensitivity", chd_params.trs.sensitivity)->capture_default_str();
  chd->add_option("--trs-specificity", chd_params.trs.specificity)->capture_default_str();
  chd->add_option("--trs-cost", chd_params.trs.cost)->capture_default_str();
  chd->add_option("--grs-sensitivity", chd_params.grs.sensitivity)->capture_default_str();
  chd->add_option("--grs-specificity", chd_params.grs.specificity)->capture_default_str();
  chd->add_option("--grs-cost", chd_params.grs.cost)->capture_default_str();
  chd->add_flag("--json", chd_json, "JSON output");
  chd->add_option("--model-out", chd_model_out, "also write the joint diagram as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) return cmd_validate(path);
    if (*stats_cmd) return cmd_stats(path, stats_flags, stats_both);
    if (*emit) return cmd_emit(path, emit_flags, emit_format, emit_out, path_cap);
    if (*solve) return cmd_solve(*solve, path, solve_flags, solve_form);
    if (*bench) return cmd_bench(*bench, bench_flags);
    if (*gen) return cmd_generate(gen_family, gen_n, gen_opts, gen_out);
    if (*chd) {
      chd_opts.solver = chd_solver == "spu" ? PerPriorSolver::Spu : PerPriorSolver::BruteForce;
      return cmd_chd(*chd, chd_params, chd_opts, chd_json, chd_model_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
