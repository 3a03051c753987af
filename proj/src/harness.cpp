#include "cyclo/harness.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "cyclo/bench.hpp"
#include "cyclo/error.hpp"

namespace cyclo {

ExpFit fit_exponential(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw Error(ErrorCode::DegenerateFit, "need at least 2 points");
  double sx = 0, sy = 0;
  for (auto [x, y] : points) {
    if (!(y > 0)) throw Error(ErrorCode::NonPositiveY, "y must be positive, got " + std::to_string(y));
    sx += x;
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : points) {
    double dx = x - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error(ErrorCode::DegenerateFit, "all x values are equal");
  ExpFit f;
  f.b = sxy / sxx;
  const double ln_a = my - f.b * mx;
  f.a = std::exp(ln_a);
  for (auto [x, y] : points) {
    double r = std::log(y) - (ln_a + f.b * x);
    f.residual += r * r;
  }
  f.r_squared = syy == 0 ? 1.0 : 1.0 - f.residual / syy;
  return f;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::DegenerateFit, "need two equally long series of at least 2 values");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::DegenerateFit, "constant series");
  return sxy / std::sqrt(sxx * syy);
}

std::optional<std::optional<NcMode>> parse_attack_mode(const std::string& s) {
  using R = std::optional<std::optional<NcMode>>;
  if (s == "none") return std::nullopt;
  if (s == "sat") return R{std::optional<NcMode>{}};
  if (s == "cycsat1") return R{NcMode::StructuralPerFeedback};
  if (s == "cycsat1-allcycles") return R{NcMode::StructuralAllCycles};
  if (s == "cycsat1-singlecycle") return R{NcMode::StructuralPerFeedbackSingleCycle};
  if (s == "cycsat2") return R{NcMode::Sensitizable};
  throw Error(ErrorCode::InvalidRecipe, "unknown attack mode '" + s + "'");
}

namespace {

// Column order for CSV and the JSON field names.
const char* const kColumns[] = {
    "benchmark",     "scheme",        "micro_cycles",       "lfn_paths",      "latches",
    "seed",          "lock_status",   "added_gates",        "added_keys",     "cycle_count",
    "cycle_status",  "cycle_seconds", "attack_mode",        "attack_status",  "iterations",
    "preprocess_seconds", "solver_seconds", "cycles_visited", "nc_clause_count"};

nlohmann::json row_json(const ReportRow& r) {
  return {{"benchmark", r.benchmark},
          {"scheme", r.scheme},
          {"micro_cycles", r.micro_cycles},
          {"lfn_paths", r.lfn_paths},
          {"latches", r.latches},
          {"seed", r.seed},
          {"lock_status", r.lock_status},
          {"added_gates", r.added_gates},
          {"added_keys", r.added_keys},
          {"cycle_count", r.cycle_count},
          {"cycle_status", r.cycle_status},
          {"cycle_seconds", r.cycle_seconds},
          {"attack_mode", r.attack_mode},
          {"attack_status", r.attack_status},
          {"iterations", r.iterations},
          {"preprocess_seconds", r.preprocess_seconds},
          {"solver_seconds", r.solver_seconds},
          {"cycles_visited", r.cycles_visited},
          {"nc_clause_count", r.nc_clause_count}};
}

std::string csv_field(const nlohmann::json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

int sweep_value(const ReportRow& r, const std::string& param) {
  if (param == "m") return r.lfn_paths;
  if (param == "latches") return r.latches;
  return r.micro_cycles;
}

LockRecipe cell_recipe(const SuiteConfig& cfg, LockScheme scheme, int value, std::uint64_t seed) {
  LockRecipe r = cfg.base;
  r.scheme = scheme;
  r.seed = seed;
  if (cfg.sweep_param == "m") r.lfn_paths = value;
  else if (cfg.sweep_param == "latches") r.latches = value;
  else r.micro_cycles = value;
  return r;
}

}  // namespace

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["environment"] = environment;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(row_json(r));
  j["fits"] = nlohmann::json::array();
  for (const auto& f : fits) {
    nlohmann::json fj = {{"benchmark", f.benchmark}, {"scheme", f.scheme}, {"seed", f.seed},
                         {"points", f.points}};
    if (f.fit) {
      fj["A"] = f.fit->a;
      fj["B"] = f.fit->b;
      fj["residual"] = f.fit->residual;
      fj["r_squared"] = f.fit->r_squared;
    } else {
      fj["A"] = nullptr;
      fj["B"] = nullptr;
    }
    j["fits"].push_back(fj);
  }
  return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport rep;
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw Error(ErrorCode::SyntaxError, "unsupported report schema version");
  rep.environment = j.value("environment", nlohmann::json::object());
  for (const auto& rj : j.at("rows")) {
    ReportRow r;
    r.benchmark = rj.at("benchmark");
    r.scheme = rj.at("scheme");
    r.micro_cycles = rj.at("micro_cycles");
    r.lfn_paths = rj.at("lfn_paths");
    r.latches = rj.at("latches");
    r.seed = rj.at("seed");
    r.lock_status = rj.at("lock_status");
    r.added_gates = rj.at("added_gates");
    r.added_keys = rj.at("added_keys");
    r.cycle_count = rj.at("cycle_count");
    r.cycle_status = rj.at("cycle_status");
    r.cycle_seconds = rj.at("cycle_seconds");
    r.attack_mode = rj.at("attack_mode");
    r.attack_status = rj.at("attack_status");
    r.iterations = rj.at("iterations");
    r.preprocess_seconds = rj.at("preprocess_seconds");
    r.solver_seconds = rj.at("solver_seconds");
    r.cycles_visited = rj.at("cycles_visited");
    r.nc_clause_count = rj.at("nc_clause_count");
    rep.rows.push_back(std::move(r));
  }
  for (const auto& fj : j.at("fits")) {
    FitRow f;
    f.benchmark = fj.at("benchmark");
    f.scheme = fj.at("scheme");
    f.seed = fj.at("seed");
    f.points = fj.at("points");
    if (!fj.at("A").is_null()) {
      ExpFit e;
      e.a = fj.at("A");
      e.b = fj.at("B");
      e.residual = fj.value("residual", 0.0);
      e.r_squared = fj.value("r_squared", 1.0);
      f.fit = e;
    }
    rep.fits.push_back(std::move(f));
  }
  return rep;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  bool first = true;
  for (const char* c : kColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const auto& r : rows) {
    auto j = row_json(r);
    first = true;
    for (const char* c : kColumns) {
      out << (first ? "" : ",") << csv_field(j[c]);
      first = false;
    }
    out << '\n';
  }
}

void ExperimentReport::write_cycle_table(std::ostream& out) const {
  const std::string param = environment.value("sweep_param", std::string("n_mc"));
  std::set<int> columns;
  // (benchmark, scheme, seed) -> sweep value -> cell text
  std::map<std::tuple<std::string, std::string, std::uint64_t>, std::map<int, std::string>> table;
  for (const auto& r : rows) {
    int v = sweep_value(r, param);
    columns.insert(v);
    std::string cell = r.lock_status != "ok"          ? r.lock_status
                       : r.cycle_status == "Complete" ? std::to_string(r.cycle_count)
                                                      : r.cycle_status;
    table[{r.benchmark, r.scheme, r.seed}][v] = cell;
  }
  out << "benchmark\tscheme\tseed";
  for (int c : columns) out << '\t' << param << '=' << c;
  out << '\n';
  for (const auto& [key, cells] : table) {
    out << std::get<0>(key) << '\t' << std::get<1>(key) << '\t' << std::get<2>(key);
    for (int c : columns) {
      auto it = cells.find(c);
      out << '\t' << (it == cells.end() ? "-" : it->second);
    }
    out << '\n';
  }
}

ExperimentReport run_suite(const SuiteConfig& cfg) {
  struct Bench {
    std::string name;
    Netlist netlist;
  };
  std::vector<Bench> benches;
  for (const auto& path : cfg.bench_files)
    benches.push_back({std::filesystem::path(path).stem().string(), read_bench_file(path)});
  std::vector<std::optional<std::optional<NcMode>>> modes;
  for (const auto& m : cfg.attack_modes) modes.push_back(parse_attack_mode(m));

  struct Cell {
    std::size_t bench;
    LockRecipe recipe;
  };
  std::vector<Cell> cells;
  for (std::size_t b = 0; b < benches.size(); ++b)
    for (LockScheme s : cfg.schemes)
      for (int v : cfg.sweep)
        for (std::uint64_t seed : cfg.seeds) cells.push_back({b, cell_recipe(cfg, s, v, seed)});

  std::vector<std::vector<ReportRow>> out(cells.size());
  auto run_cell = [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Netlist& original = benches[cell.bench].netlist;
    ReportRow base;
    base.benchmark = benches[cell.bench].name;
    base.scheme = std::string(to_string(cell.recipe.scheme));
    base.micro_cycles = cell.recipe.micro_cycles;
    base.lfn_paths = cell.recipe.lfn_paths;
    base.latches = cell.recipe.latches;
    base.seed = cell.recipe.seed;
    std::optional<LockResult> locked;
    try {
      locked = lock(original, cell.recipe, cfg.attack.solver);
      base.added_gates = locked->added_gates;
      base.added_keys = locked->added_keys;
      EnumOptions eo = cfg.cycle_limits;
      eo.store = false;
      auto cs = enumerate_cycles(locked->locked, eo);
      base.cycle_count = cs.count;
      base.cycle_status = std::string(to_string(cs.status));
      base.cycle_seconds = cs.elapsed;
    } catch (const Error& e) {
      base.lock_status = std::string(to_string(e.code()));
      locked.reset();
    }
    for (std::size_t m = 0; m < modes.size(); ++m) {
      ReportRow row = base;
      row.attack_mode = cfg.attack_modes[m];
      if (locked && modes[m] && !locked->locked.key_inputs().empty()) {
        AttackConfig ac = cfg.attack;
        ac.nc_mode = *modes[m];
        try {
          auto r = run_sat_attack(locked->locked, original, ac);
          row.attack_status = std::string(to_string(r.status));
          row.iterations = r.iterations;
          row.preprocess_seconds = r.preprocess_seconds;
          row.solver_seconds = r.solver_seconds;
          row.cycles_visited = r.cycles_visited;
          row.nc_clause_count = r.nc_clause_count;
        } catch (const Error& e) {
          row.attack_status = std::string(to_string(e.code()));
        }
      }
      out[i].push_back(std::move(row));
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cells.size();) run_cell(i);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  ExperimentReport rep;
  for (auto& rows : out)
    for (auto& r : rows) rep.rows.push_back(std::move(r));

  // One fit per series over distinct sweep values with complete, positive counts.
  std::map<std::tuple<std::string, std::string, std::uint64_t>, std::map<int, double>> series;
  for (const auto& r : rep.rows) {
    auto& s = series[{r.benchmark, r.scheme, r.seed}];
    if (r.lock_status == "ok" && r.cycle_status == "Complete" && r.cycle_count > 0)
      s[sweep_value(r, cfg.sweep_param)] = static_cast<double>(r.cycle_count);
  }
  for (const auto& [key, pts] : series) {
    FitRow f{std::get<0>(key), std::get<1>(key), std::get<2>(key), pts.size(), std::nullopt};
    if (pts.size() >= 2) {
      std::vector<std::pair<double, double>> p;
      for (auto [x, y] : pts) p.emplace_back(x, y);
      f.fit = fit_exponential(p);
    }
    rep.fits.push_back(std::move(f));
  }

  nlohmann::json seeds = cfg.seeds;
  rep.environment = {{"sweep_param", cfg.sweep_param},
                     {"sweep", cfg.sweep},
                     {"seeds", seeds},
                     {"attack_modes", cfg.attack_modes},
                     {"cycle_limit", cfg.cycle_limits.limit},
                     {"cycle_timeout_seconds", cfg.cycle_limits.timeout_seconds},
                     {"iteration_cap", cfg.attack.iteration_cap},
                     {"attack_timeout_seconds", cfg.attack.total_timeout_seconds},
                     {"mc_size", cfg.base.mc_size},
                     {"solver", cfg.attack.solver.external.empty() ? "builtin" : cfg.attack.solver.external},
                     {"jobs", jobs}};
  return rep;
}

}  // namespace cyclo
