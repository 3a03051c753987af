#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyclo/netlist.hpp"
#include "cyclo/simulate.hpp"
#include "cyclo/solver.hpp"

namespace cyclo {

enum class LockScheme { SuperCycle, Lfn, SrLatch, Template };
std::string_view to_string(LockScheme s);
/// Accepts "sc", "lfn", "srlatch", "template"; throws Error{InvalidRecipe}.
LockScheme parse_lock_scheme(std::string_view s);

struct LockRecipe {
  LockScheme scheme = LockScheme::SuperCycle;
  int micro_cycles = 1;  // MCs in a Super Cycle
  int mc_size = 7;       // gates per MC, also the LFN path length
  int lfn_paths = 2;
  int latches = 0;
  std::uint64_t seed = 1;
  std::string key_prefix = "keyinput";

  /// Throws Error{InvalidRecipe} when a field is out of range for the scheme.
  void validate() const;
};

struct LockResult {
  Netlist locked;
  KeyAssignment correct_key;  // new key bits only
  std::size_t added_gates = 0;
  std::size_t added_keys = 0;
  std::vector<std::string> placement_log;
};

using Rng = std::mt19937_64;

/// Closes a micro cycle on `region`, a simple path of gates (each gate reads
/// the previous one's output): a key MUX in front of the head and one in front
/// of an interior gate, both fed back from the tail. Two keys, two MUXes, both
/// correct at 0. Throws RegionTooShort or RegionNotAPath.
LockResult insert_micro_cycle(const Netlist& n, std::span<const int> region, Rng& rng,
                              int mc_size = 7, const std::string& key_prefix = "keyinput");

/// Places `micro_cycles` MCs one at a time on disjoint paths inside the fanin
/// cones of as few outputs as possible (largest cone first). The first MC gets
/// a two-way link to its own fanin and two chords; every later MC a two-way
/// link to its predecessor and one link into a random earlier MC. 5N+1 MUXes
/// in total, and the result for N is contained in the result for N + 1.
/// Throws InsufficientGates.
LockResult build_super_cycle(const Netlist& n, const LockRecipe& recipe);

/// Breaks `lfn_paths` paths of one output cone at their midpoints and feeds
/// every second half from a MUX network over the path ends. The correct key
/// (all 0) routes each half back to its original driver. Adds
/// m * (1 + ceil(log2 m)) MUXes. Throws InsufficientPaths.
LockResult build_lfn(const Netlist& n, const LockRecipe& recipe);

/// Sum over l = 1..m of C(m, l) * (l - 1)!.
std::uint64_t lfn_cycle_lower_bound(int m);

/// A value pattern over `signals` (bit i for signals[i]) that no input
/// assignment produces. Patterns are tried in Gray-code order from a random
/// start. Throws NoNonOccurringCombination, or InvalidRecipe for more than 8
/// or fewer than 1 signals.
Bits find_nonoccurring_combination(const Netlist& n, const std::vector<WireId>& signals, Rng& rng,
                                   const SolverConfig& solver = SolverConfig::from_env());

/// Re-expresses `latches` signals through NAND SR latches whose hold state is
/// tied to a non-occurring pattern of nearby signals; both latch feedback
/// wires pass through key MUXes offering a self-loop as the alternative.
/// Throws NoNonOccurringCombination or TargetSignalNotCoverable.
LockResult cyclify_with_sr_latch(const Netlist& n, const LockRecipe& recipe,
                                 const SolverConfig& solver = SolverConfig::from_env());

/// The 3-input ring of alternating AND/OR gates. Tap i is the output of gate i.
Netlist rivest_ring();

/// Replaces one gate whose function over a 3-leaf cut equals a ring tap (after
/// input permutation) by that tap of a new ring. Adds no keys.
/// Throws NoMatchFound.
LockResult insert_rivest_template(const Netlist& n, Rng& rng);

/// Dispatches on recipe.scheme.
LockResult lock(const Netlist& n, const LockRecipe& recipe,
                const SolverConfig& solver = SolverConfig::from_env());

}  // namespace cyclo
