#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclo/attack.hpp"
#include "cyclo/cycles.hpp"
#include "cyclo/locker.hpp"

namespace cyclo {

/// y = a * exp(b * x), fitted as least squares on ln y.
struct ExpFit {
  double a = 0;
  double b = 0;
  double residual = 0;   // sum of squared residuals in log space
  double r_squared = 1;  // of the log-linear regression
};

/// Throws NonPositiveY, or DegenerateFit for fewer than 2 points or all x equal.
ExpFit fit_exponential(std::span<const std::pair<double, double>> points);

/// Throws DegenerateFit when sizes differ, n < 2, or either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Attack mode names used on the command line and in reports.
/// "none", "sat", "cycsat1", "cycsat1-allcycles", "cycsat1-singlecycle", "cycsat2".
/// nullopt for "none"; the inner optional is the NC mode (nullopt = plain SAT).
std::optional<std::optional<NcMode>> parse_attack_mode(const std::string& s);

struct ReportRow {
  std::string benchmark;
  std::string scheme;
  int micro_cycles = 0;
  int lfn_paths = 0;
  int latches = 0;
  std::uint64_t seed = 0;
  std::string lock_status = "ok";  // or the error code name
  std::size_t added_gates = 0;
  std::size_t added_keys = 0;
  std::uint64_t cycle_count = 0;
  std::string cycle_status;  // EnumStatus, empty when locking failed
  double cycle_seconds = 0;
  std::string attack_mode = "none";
  std::string attack_status;  // empty when no attack ran
  std::uint64_t iterations = 0;
  double preprocess_seconds = 0;
  double solver_seconds = 0;
  std::uint64_t cycles_visited = 0;
  std::size_t nc_clause_count = 0;
};

struct FitRow {
  std::string benchmark;
  std::string scheme;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::optional<ExpFit> fit;  // nullopt when fewer than 2 usable points
};

struct ExperimentReport {
  static constexpr int kSchemaVersion = 1;
  std::vector<ReportRow> rows;
  std::vector<FitRow> fits;
  nlohmann::json environment = nlohmann::json::object();

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
  /// Fixed column order; the header lists the ReportRow fields.
  void write_csv(std::ostream& out) const;
  /// Benchmark x seed rows, one column per sweep value (cycle counts or
  /// the enumeration status when incomplete). Tab separated.
  void write_cycle_table(std::ostream& out) const;
};

struct SuiteConfig {
  std::vector<std::string> bench_files;
  std::vector<LockScheme> schemes{LockScheme::SuperCycle};
  std::string sweep_param = "n_mc";  // n_mc, m, latches
  std::vector<int> sweep{1, 2, 3, 5};
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> attack_modes{"none"};
  LockRecipe base;
  EnumOptions cycle_limits;
  AttackConfig attack;
  unsigned jobs = 1;
};

/// Runs every (benchmark, scheme, sweep value, seed, attack mode) cell and fits
/// the cycle counts of each (benchmark, scheme, seed) series against the sweep
/// value. A failing cell is recorded, never fatal. Benchmarks are read up
/// front, so a missing or malformed file throws before any cell runs.
ExperimentReport run_suite(const SuiteConfig& cfg);

}  // namespace cyclo
