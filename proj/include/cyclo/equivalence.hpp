#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cyclo/netlist.hpp"
#include "cyclo/simulate.hpp"
#include "cyclo/solver.hpp"

namespace cyclo {

/// Locked/oracle port pairing: inputs by name, outputs by name when every
/// oracle output exists in the locked netlist, otherwise by position.
struct Interface {
  std::vector<WireId> locked_inputs;  // aligned with oracle.inputs()
  std::vector<std::pair<WireId, WireId>> outputs;  // (locked, oracle)
};

/// Throws Error{InterfaceMismatch}.
Interface match_interface(const Netlist& locked, const Netlist& oracle);

struct EquivalenceOptions {
  /// Budget for the unrolled ternary miter of cyclic netlists, in gate copies.
  std::size_t max_unrolled_gates = 2'000'000;
  /// Exhaustive ternary simulation is the fallback up to this many inputs.
  std::size_t max_simulated_inputs = 20;
  SolverConfig solver = SolverConfig::from_env();
};

/// An input pattern (oracle input order) on which the keyed netlist differs
/// from the oracle or leaves an output at X; nullopt when equivalent.
///
/// The key is first constant-propagated. Acyclic results are checked with a
/// binary miter. Cyclic ones with a dual-rail ternary miter in which every
/// strongly connected component is unrolled once per gate it contains, which
/// reaches the ternary fixpoint exactly. Inputs are matched by name, outputs by
/// name when possible and by position otherwise (Error{InterfaceMismatch} if
/// neither fits). Throws TooLargeForSimulationFallback when the unrolling is
/// over budget and there are too many inputs to simulate exhaustively.
std::optional<Bits> find_mismatch(const Netlist& locked, const KeyAssignment& key,
                                  const Netlist& oracle, const EquivalenceOptions& opts = {});

bool check_equivalence(const Netlist& locked, const KeyAssignment& key, const Netlist& oracle,
                       const EquivalenceOptions& opts = {});

}  // namespace cyclo
