#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cyclo/cycles.hpp"
#include "cyclo/netlist.hpp"
#include "cyclo/simulate.hpp"
#include "cyclo/solver.hpp"

namespace cyclo {

struct AttackConfig {
  std::uint64_t iteration_cap = 10'000;
  double solve_timeout_seconds = 600;  // per solver call
  double total_timeout_seconds = 600;  // whole run, preprocessing included
  std::optional<NcMode> nc_mode;       // nullopt: plain SAT attack
  EnumOptions cycle_limits;            // AllCycles enumeration
  NcOptions nc_limits;
  SolverConfig solver = SolverConfig::from_env();

  /// Throws Error{InvalidRecipe} unless caps and timeouts are positive.
  void validate() const;
};

enum class AttackStatus { Success, IterationCapReached, Unsat, PreprocessTimeout, WrongKey };
std::string_view to_string(AttackStatus s);

struct AttackResult {
  AttackStatus status = AttackStatus::Unsat;
  std::optional<KeyAssignment> key;
  std::uint64_t iterations = 0;
  std::vector<Bits> dips;               // locked-netlist input order
  std::vector<double> dip_solver_time;  // cumulative solver seconds per DIP
  double preprocess_seconds = 0;
  std::uint64_t cycles_visited = 0;
  std::size_t nc_clause_count = 0;
  double solver_seconds = 0;
  double total_seconds = 0;
  std::string note;  // why the loop stopped, when not plain UNSAT
};

/// Output bits of a key-free oracle, inputs positional. Throws
/// Error{OracleAmbiguous} when an output settles at X.
Bits oracle_query(const Netlist& oracle, std::span<const std::uint8_t> x);

/// The DIP loop. Inputs are matched to the oracle by name and outputs by name
/// or position (Error{InterfaceMismatch} otherwise). With cfg.nc_mode set the
/// cycle-avoidance clauses are computed and conjoined first. A DIP returned a
/// second time ends the run as IterationCapReached: the DIVC copies could not
/// exclude it, so the loop would never terminate.
AttackResult run_sat_attack(const Netlist& locked, const Netlist& oracle, const AttackConfig& cfg);

/// run_sat_attack with a required nc_mode. Structural modes give CycSAT-I,
/// Sensitizable gives CycSAT-II.
AttackResult run_cycsat(const Netlist& locked, const Netlist& oracle, const AttackConfig& cfg);

nlohmann::json to_json(const AttackResult& r);
/// Columns: iteration, dip (bit string), solver_seconds.
void write_dip_csv(std::ostream& out, const AttackResult& r);

}  // namespace cyclo
