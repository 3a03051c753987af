#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cyclo/cnf.hpp"
#include "cyclo/graph.hpp"
#include "cyclo/netlist.hpp"
#include "cyclo/simulate.hpp"

namespace cyclo {

/// Gate-graph edge `from -> to` (to reads from's output). In feedback terms the
/// signal entering `to` is the feedback w, and from's output is w'.
struct FeedbackEdge {
  int from = 0;
  int to = 0;
  bool operator==(const FeedbackEdge&) const = default;
};

struct FeedbackSet {
  std::vector<FeedbackEdge> edges;
};

/// Depth-first search over gates, rooted at primary inputs, then key inputs,
/// then any unvisited gate, all in declaration order; successors are visited
/// in ascending gate order. Back edges form the feedback set.
FeedbackSet find_feedback_set(const Netlist& n);

enum class EnumStatus { Complete, LimitHit, TimedOut };
std::string_view to_string(EnumStatus s);

struct EnumOptions {
  std::uint64_t limit = 10'000'000;
  double timeout_seconds = 600;
  bool store = true;  // keep cycle lists; off for count-only runs
};

/// Elementary cycles. For netlists a cycle is the list of wires driven by its
/// gates, starting at the lowest gate index.
struct CycleSet {
  std::vector<std::vector<WireId>> cycles;
  std::uint64_t count = 0;
  EnumStatus status = EnumStatus::Complete;
  double elapsed = 0;
};

/// Called per cycle with vertex (gate) indices; return false to stop early.
using CycleVisitor = std::function<bool(std::span<const int>)>;

/// Johnson's algorithm on a plain digraph; `cycles` holds vertex ids.
CycleSet enumerate_cycles(const Adjacency& succ, const EnumOptions& opts = {},
                          const CycleVisitor& visit = {});
CycleSet enumerate_cycles(const Netlist& n, const EnumOptions& opts = {},
                          const CycleVisitor& visit = {});

enum class CycleBehavior { Broken, Stateful, Oscillating };
std::string_view to_string(CycleBehavior b);

/// Ternary fixpoint first; if a watched wire stays X, synchronous binary runs
/// from all-0 and all-1 states decide between Stateful (some run settles) and
/// Oscillating (every run revisits a state without settling). With no wires
/// given, every wire on a cycle is watched.
CycleBehavior classify_cycle(const Netlist& n, const KeyAssignment& key, const Assignment& x,
                             const std::vector<WireId>& cycle_wires = {});

/// Literal "wire == value".
struct WireLit {
  WireId wire = 0;
  bool value = true;
  auto operator<=>(const WireLit&) const = default;
};

enum class BreakMode { Structural, Sensitizable };

/// Condition under which a signal entering `gate` through `through` does not
/// reach its output. Empty result means "never blocked" (false).
/// Throws Error{NotAnInput} when `through` is not an input of the gate.
std::vector<WireLit> break_condition(const Netlist& n, const Gate& gate, WireId through,
                                     BreakMode mode);

enum class NcMode {
  StructuralPerFeedbackSingleCycle,  // one shortest cycle per feedback edge
  StructuralPerFeedback,             // every simple path closing each feedback edge
  StructuralAllCycles,               // one clause per enumerated cycle
  Sensitizable,                      // every closing path, side-input conditions
};
std::string_view to_string(NcMode m);

/// Clauses over WireLit; an empty clause means some cycle can never be broken.
struct NcClauses {
  std::vector<std::vector<WireLit>> clauses;
  NcMode mode = NcMode::StructuralPerFeedback;
  std::uint64_t cycles_visited = 0;
  double build_time = 0;
  EnumStatus status = EnumStatus::Complete;

  bool has_empty_clause() const;
  /// Evaluates the clauses under `value(wire)`.
  bool satisfied_by(const std::function<bool(WireId)>& value) const;
};

struct NcOptions {
  std::uint64_t path_limit = 10'000'000;
  double timeout_seconds = 600;
};

/// Throws Error{IncompleteCycleSet} for StructuralAllCycles when `cs` is
/// missing, truncated, or was enumerated without storing cycles.
NcClauses compute_nc(const Netlist& n, const FeedbackSet& fs, const CycleSet* cs, NcMode mode,
                     const NcOptions& opts = {});

/// Adds the clauses to `sink` with wire variables from `vars`.
void add_nc_clauses(ClauseSink& sink, const NcClauses& nc, const CopyVars& vars);

}  // namespace cyclo
