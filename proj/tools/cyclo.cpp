// Command-line front end: lock, attack, cycles, fit, bench-suite, solve.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cyclo/attack.hpp"
#include "cyclo/bench.hpp"
#include "cyclo/cnf.hpp"
#include "cyclo/cycles.hpp"
#include "cyclo/error.hpp"
#include "cyclo/harness.hpp"
#include "cyclo/locker.hpp"
#include "cyclo/solver.hpp"

namespace fs = std::filesystem;
using namespace cyclo;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kInfeasible = 2,
  kIo = 3,
  kParse = 4,
  kUnsat = 10,
  kIterationCap = 11,
  kPreprocessTimeout = 12,
  kWrongKey = 13,
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidRecipe:
    case ErrorCode::RegionTooShort:
    case ErrorCode::RegionNotAPath:
    case ErrorCode::InsufficientGates:
    case ErrorCode::InsufficientPaths:
    case ErrorCode::NoNonOccurringCombination:
    case ErrorCode::TargetSignalNotCoverable:
    case ErrorCode::NoMatchFound:
      return kInfeasible;
    case ErrorCode::IoError:
      return kIo;
    case ErrorCode::SyntaxError:
    case ErrorCode::DuplicateDriver:
    case ErrorCode::UndeclaredWire:
    case ErrorCode::ArityError:
    case ErrorCode::UnsupportedGate:
    case ErrorCode::InvalidFormula:
    case ErrorCode::NonPositiveY:
    case ErrorCode::DegenerateFit:
      return kParse;
    default:
      return kFailure;
  }
}

int exit_code(AttackStatus s) {
  switch (s) {
    case AttackStatus::Success: return kOk;
    case AttackStatus::Unsat: return kUnsat;
    case AttackStatus::IterationCapReached: return kIterationCap;
    case AttackStatus::PreprocessTimeout: return kPreprocessTimeout;
    case AttackStatus::WrongKey: return kWrongKey;
  }
  return kFailure;
}

void report_error(const std::string& code, const std::string& message) {
  nlohmann::json j{{"error", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
std::vector<T> split_list(const std::string& s, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(convert(item));
  return out;
}

std::string as_string(const std::string& s) { return s; }
int as_int(const std::string& s) { return std::stoi(s); }
std::uint64_t as_u64(const std::string& s) { return std::stoull(s); }

// ---------------------------------------------------------------- lock
struct LockArgs {
  std::string in, out, key_out, scheme = "sc";
  LockRecipe recipe;
};

int cmd_lock(const LockArgs& a) {
  Netlist n = read_bench_file(a.in);
  LockRecipe r = a.recipe;
  r.scheme = parse_lock_scheme(a.scheme);
  LockResult res = lock(n, r);

  std::string bench = serialize_bench(res.locked);
  nlohmann::json key = nlohmann::json::object();
  for (const auto& [name, bit] : res.correct_key) key[name] = bit ? 1 : 0;
  nlohmann::json doc{{"key", key},
                     {"scheme", a.scheme},
                     {"seed", r.seed},
                     {"added_gates", res.added_gates},
                     {"added_keys", res.added_keys},
                     {"placement_log", res.placement_log}};
  if (a.out.empty()) std::cout << bench;
  else open_out(a.out) << bench;
  if (!a.key_out.empty()) open_out(a.key_out) << doc.dump(2) << '\n';
  else std::cerr << doc.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- attack
struct AttackArgs {
  std::string locked, oracle, mode = "cycsat1", report, dip_csv;
  std::uint64_t iter_cap = 10'000;
  double timeout = 600;
  std::uint64_t seed = 0;
  std::uint64_t cycle_limit = 10'000'000;
};

int cmd_attack(const AttackArgs& a) {
  Netlist locked = read_bench_file(a.locked);
  Netlist oracle = read_bench_file(a.oracle);
  auto mode = parse_attack_mode(a.mode);
  if (!mode) throw Error(ErrorCode::InvalidRecipe, "attack mode 'none' runs nothing");
  AttackConfig cfg;
  cfg.iteration_cap = a.iter_cap;
  cfg.solve_timeout_seconds = a.timeout;
  cfg.total_timeout_seconds = a.timeout;
  cfg.cycle_limits.limit = a.cycle_limit;
  cfg.cycle_limits.timeout_seconds = a.timeout;
  cfg.nc_limits.path_limit = a.cycle_limit;
  cfg.nc_limits.timeout_seconds = a.timeout;
  cfg.nc_mode = *mode;
  cfg.solver.seed = a.seed;
  AttackResult r = run_sat_attack(locked, oracle, cfg);

  nlohmann::json j = to_json(r);
  j["mode"] = a.mode;
  if (a.report.empty()) std::cout << j.dump(2) << '\n';
  else open_out(a.report) << j.dump(2) << '\n';
  if (!a.dip_csv.empty()) {
    auto out = open_out(a.dip_csv);
    write_dip_csv(out, r);
  }
  if (!a.report.empty()) std::cout << to_string(r.status) << '\n';
  return exit_code(r.status);
}

// ---------------------------------------------------------------- cycles
struct CyclesArgs {
  std::string in, list_out;
  std::uint64_t limit = 10'000'000;
  double timeout = 600;
  bool count_only = false;
};

int cmd_cycles(const CyclesArgs& a) {
  Netlist n = read_bench_file(a.in);
  EnumOptions o;
  o.limit = a.limit;
  o.timeout_seconds = a.timeout;
  o.store = !a.count_only && !a.list_out.empty();
  CycleSet cs = enumerate_cycles(n, o);
  std::cout << "count " << cs.count << '\n'
            << "status " << to_string(cs.status) << '\n'
            << "seconds " << cs.elapsed << '\n';
  if (o.store) {
    auto out = open_out(a.list_out);
    for (const auto& c : cs.cycles) {
      for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << n.wire_name(c[i]);
      out << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- fit
struct FitArgs {
  std::string points, csv;
};

int cmd_fit(const FitArgs& a) {
  std::vector<std::pair<double, double>> pts;
  auto add = [&](const std::string& item, char sep) {
    auto p = item.find(sep);
    if (p == std::string::npos) throw Error(ErrorCode::SyntaxError, "bad point '" + item + "'");
    try {
      pts.emplace_back(std::stod(item.substr(0, p)), std::stod(item.substr(p + 1)));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::SyntaxError, "bad point '" + item + "'");
    }
  };
  if (!a.csv.empty()) {
    std::istringstream in(read_text(a.csv));
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
      add(line, ',');
    }
  }
  std::stringstream ss(a.points);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) add(item, ':');
  ExpFit f = fit_exponential(pts);
  nlohmann::json j{{"A", f.a}, {"B", f.b}, {"residual", f.residual}, {"r_squared", f.r_squared},
                   {"points", pts.size()}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- bench-suite
struct SuiteArgs {
  std::string bench_dir, benchmarks, schemes = "sc", sweep = "n_mc=1,2,3,5", seeds = "1",
                                     attacks = "none", out_dir = "suite_out";
  unsigned jobs = 1;
  std::uint64_t cycle_limit = 10'000'000;
  double cycle_timeout = 600;
  std::uint64_t iter_cap = 10'000;
  double timeout = 600;
  LockRecipe base;
};

int cmd_suite(const SuiteArgs& a) {
  SuiteConfig cfg;
  if (!fs::is_directory(a.bench_dir))
    throw Error(ErrorCode::IoError, "'" + a.bench_dir + "' is not a directory");
  auto wanted = split_list<std::string>(a.benchmarks, as_string);
  for (const auto& e : fs::directory_iterator(a.bench_dir)) {
    if (e.path().extension() != ".bench") continue;
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), e.path().stem().string()) == wanted.end())
      continue;
    cfg.bench_files.push_back(e.path().string());
  }
  std::sort(cfg.bench_files.begin(), cfg.bench_files.end());
  if (cfg.bench_files.empty()) throw Error(ErrorCode::IoError, "no .bench files selected in " + a.bench_dir);

  cfg.schemes.clear();
  for (const auto& s : split_list<std::string>(a.schemes, as_string)) cfg.schemes.push_back(parse_lock_scheme(s));
  auto eq = a.sweep.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::InvalidRecipe, "--sweep expects param=v1,v2,...");
  cfg.sweep_param = a.sweep.substr(0, eq);
  if (cfg.sweep_param != "n_mc" && cfg.sweep_param != "m" && cfg.sweep_param != "latches")
    throw Error(ErrorCode::InvalidRecipe, "sweep parameter must be n_mc, m or latches");
  cfg.sweep = split_list<int>(a.sweep.substr(eq + 1), as_int);
  cfg.seeds = split_list<std::uint64_t>(a.seeds, as_u64);
  cfg.attack_modes = split_list<std::string>(a.attacks, as_string);
  for (const auto& m : cfg.attack_modes) parse_attack_mode(m);
  cfg.base = a.base;
  cfg.cycle_limits.limit = a.cycle_limit;
  cfg.cycle_limits.timeout_seconds = a.cycle_timeout;
  cfg.attack.iteration_cap = a.iter_cap;
  cfg.attack.solve_timeout_seconds = a.timeout;
  cfg.attack.total_timeout_seconds = a.timeout;
  cfg.attack.cycle_limits = cfg.cycle_limits;
  cfg.attack.nc_limits.path_limit = a.cycle_limit;
  cfg.attack.nc_limits.timeout_seconds = a.cycle_timeout;
  cfg.jobs = a.jobs;

  ExperimentReport rep = run_suite(cfg);

  fs::create_directories(a.out_dir);
  open_out((fs::path(a.out_dir) / "report.json").string()) << rep.to_json().dump(2) << '\n';
  {
    auto csv = open_out((fs::path(a.out_dir) / "report.csv").string());
    rep.write_csv(csv);
  }
  {
    auto tsv = open_out((fs::path(a.out_dir) / "cycles.tsv").string());
    rep.write_cycle_table(tsv);
  }
  std::size_t failed = 0;
  for (const auto& r : rep.rows) failed += r.lock_status != "ok";
  std::cout << "rows " << rep.rows.size() << "\nlock_failures " << failed << '\n';
  for (const auto& f : rep.fits) {
    std::cout << "fit " << f.benchmark << ' ' << f.scheme << " seed=" << f.seed;
    if (f.fit) std::cout << " A=" << f.fit->a << " B=" << f.fit->b << '\n';
    else std::cout << " n/a (" << f.points << " points)\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- solve
int cmd_solve(const std::string& cnf) {
  CnfFormula f = parse_dimacs(read_text(cnf));
  SolverConfig cfg;  // always the in-process solver
  SolverVerdict v = solve(f, {}, cfg);
  if (!v.sat()) {
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  }
  std::cout << "s SATISFIABLE\nv";
  for (int i = 1; i <= f.var_count(); ++i) std::cout << ' ' << (v.value(i) ? i : -i);
  std::cout << " 0\n";
  return 10;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyclic logic locking and SAT-attack toolkit"};
  app.require_subcommand(1);

  LockArgs la;
  auto* lock_cmd = app.add_subcommand("lock", "Lock a bench netlist");
  lock_cmd->add_option("--in", la.in, "Input .bench")->required();
  lock_cmd->add_option("--scheme", la.scheme, "sc | lfn | srlatch | template");
  lock_cmd->add_option("--n-mc", la.recipe.micro_cycles, "Micro cycles in the super cycle");
  lock_cmd->add_option("--mc-size", la.recipe.mc_size, "Gates per micro cycle / LFN path");
  lock_cmd->add_option("--m-paths", la.recipe.lfn_paths, "LFN paths");
  lock_cmd->add_option("--latches", la.recipe.latches, "SR latches");
  lock_cmd->add_option("--seed", la.recipe.seed, "Placement seed");
  lock_cmd->add_option("--key-prefix", la.recipe.key_prefix, "Name prefix for new key inputs");
  lock_cmd->add_option("--out", la.out, "Locked .bench (default stdout)");
  lock_cmd->add_option("--key-out", la.key_out, "Key and placement log JSON (default stderr)");

  AttackArgs aa;
  auto* attack_cmd = app.add_subcommand("attack", "Run a SAT/CycSAT attack");
  attack_cmd->add_option("--locked", aa.locked, "Locked .bench")->required();
  attack_cmd->add_option("--oracle", aa.oracle, "Unlocked .bench used as the oracle")->required();
  attack_cmd->add_option("--mode", aa.mode,
                         "sat | cycsat1 | cycsat1-allcycles | cycsat1-singlecycle | cycsat2");
  attack_cmd->add_option("--iter-cap", aa.iter_cap, "DIP iteration cap");
  attack_cmd->add_option("--timeout", aa.timeout, "Seconds for the whole run");
  attack_cmd->add_option("--cycle-limit", aa.cycle_limit, "Cycle/path cap during preprocessing");
  attack_cmd->add_option("--seed", aa.seed, "Solver seed");
  attack_cmd->add_option("--report", aa.report, "AttackResult JSON (default stdout)");
  attack_cmd->add_option("--dip-csv", aa.dip_csv, "DIP trace CSV");

  CyclesArgs ca;
  auto* cycles_cmd = app.add_subcommand("cycles", "Count elementary cycles");
  cycles_cmd->add_option("--in", ca.in, "Input .bench")->required();
  cycles_cmd->add_option("--limit", ca.limit, "Stop after this many cycles");
  cycles_cmd->add_option("--timeout", ca.timeout, "Seconds");
  cycles_cmd->add_flag("--count-only", ca.count_only, "Do not keep the cycle list");
  cycles_cmd->add_option("--list-out", ca.list_out, "Write one cycle per line");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit y = A exp(B x)");
  fit_cmd->add_option("--points", fa.points, "x:y,x:y,...");
  fit_cmd->add_option("--csv", fa.csv, "File of x,y lines");

  SuiteArgs sa;
  auto* suite_cmd = app.add_subcommand("bench-suite", "Lock, count and attack a benchmark matrix");
  suite_cmd->add_option("--bench-dir", sa.bench_dir, "Directory of .bench files")->required();
  suite_cmd->add_option("--benchmarks", sa.benchmarks, "Comma list of names (default all)");
  suite_cmd->add_option("--schemes", sa.schemes, "Comma list of schemes");
  suite_cmd->add_option("--sweep", sa.sweep, "param=v1,v2,... with param n_mc, m or latches");
  suite_cmd->add_option("--seeds", sa.seeds, "Comma list of seeds");
  suite_cmd->add_option("--attacks", sa.attacks, "Comma list of attack modes, or none");
  suite_cmd->add_option("--out-dir", sa.out_dir, "Report directory");
  suite_cmd->add_option("--jobs", sa.jobs, "Worker threads");
  suite_cmd->add_option("--cycle-limit", sa.cycle_limit, "Cycles per enumeration");
  suite_cmd->add_option("--cycle-timeout", sa.cycle_timeout, "Seconds per enumeration");
  suite_cmd->add_option("--iter-cap", sa.iter_cap, "DIP iteration cap");
  suite_cmd->add_option("--timeout", sa.timeout, "Seconds per attack");
  suite_cmd->add_option("--n-mc", sa.base.micro_cycles, "Micro cycles when not swept");
  suite_cmd->add_option("--mc-size", sa.base.mc_size, "Gates per micro cycle");
  suite_cmd->add_option("--m-paths", sa.base.lfn_paths, "LFN paths when not swept");
  suite_cmd->add_option("--latches", sa.base.latches, "SR latches when not swept");

  std::string cnf;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a DIMACS file (SAT-competition output)");
  solve_cmd->add_option("cnf", cnf, "DIMACS file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("Usage", e.what());
    std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kIo;
  }

  try {
    if (*lock_cmd) return cmd_lock(la);
    if (*attack_cmd) return cmd_attack(aa);
    if (*cycles_cmd) return cmd_cycles(ca);
    if (*fit_cmd) return cmd_fit(fa);
    if (*suite_cmd) return cmd_suite(sa);
    if (*solve_cmd) return cmd_solve(cnf);
  } catch (const Error& e) {
    report_error(std::string(to_string(e.code())), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report_error("Failure", e.what());
    return kFailure;
  }
  return kFailure;
}
