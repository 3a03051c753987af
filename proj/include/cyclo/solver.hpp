#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclo/cnf.hpp"

namespace cyclo {

enum class Verdict { Sat, Unsat, Timeout };

struct SolverVerdict {
  Verdict status = Verdict::Unsat;
  std::vector<std::uint8_t> model;  // indexed by variable, entry 0 unused; empty unless Sat

  bool sat() const { return status == Verdict::Sat; }
  bool value(int lit) const { return (model.at(static_cast<std::size_t>(std::abs(lit))) != 0) == (lit > 0); }
};

/// Backend selection. An empty `external` command means the in-process CDCL
/// solver; otherwise every solve writes DIMACS and runs `external <file>`,
/// reading SAT-competition output ("s ..." / "v ..." lines). The command is
/// split on whitespace, so "kissat -q" works.
struct SolverConfig {
  std::string external;
  double external_timeout_seconds = 600;
  std::uint64_t seed = 0;

  /// Reads CYCLO_SOLVER and CYCLO_SOLVER_TIMEOUT.
  static SolverConfig from_env();
};

/// Incremental solving session. Every Sat model is re-checked against all
/// clauses added so far and the assumptions; a failing check throws
/// Error{BackendFailure}.
class SolverSession : public ClauseSink {
 public:
  explicit SolverSession(SolverConfig cfg = SolverConfig::from_env());
  ~SolverSession() override;
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  int new_var() override;
  void add_clause(std::span<const int> lits) override;
  int var_count() const { return vars_; }
  std::size_t clause_count() const { return clause_count_; }

  /// Timeout is only reported for the in-process backend; a subprocess that
  /// runs out of time is a BackendFailure.
  SolverVerdict solve(std::span<const int> assumptions = {});
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline);

  bool external() const { return !cfg_.external.empty(); }

 private:
  struct Impl;
  SolverConfig cfg_;
  std::unique_ptr<Impl> impl_;
  int vars_ = 0;
  std::size_t clause_count_ = 0;
  std::vector<int> flat_;  // all clauses, zero-terminated, for the model check
};

/// One-shot solve of a stored formula.
SolverVerdict solve(const CnfFormula& f, std::span<const int> assumptions = {},
                    const SolverConfig& cfg = SolverConfig::from_env());

/// Parses SAT-competition solver output. Throws Error{BackendFailure} when no
/// "s" line is present.
SolverVerdict parse_solver_output(const std::string& text, int var_count);

}  // namespace cyclo
