#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cyclo/netlist.hpp"
#include "cyclo/ternary.hpp"

namespace cyclo {

/// Wire name -> bit. Ordered so JSON dumps and key listings are stable.
using Assignment = std::map<std::string, bool>;
using KeyAssignment = std::map<std::string, bool>;
/// Positional bit vector (0/1 per entry); avoids std::vector<bool>.
using Bits = std::vector<std::uint8_t>;

struct FixpointStats {
  std::size_t iterations = 0;
  bool converged = true;
};

/// Per-wire values for the given input and key bits (positional, declaration
/// order). Acyclic netlists are evaluated in one topological pass; cyclic ones
/// by synchronous ternary iteration from all-X, capped at 2 x gate count rounds.
std::vector<Ternary> simulate(const Netlist& n, std::span<const std::uint8_t> inputs,
                              std::span<const std::uint8_t> keys, FixpointStats* stats = nullptr);

/// Same as simulate() with ternary stimulus, so X can be driven on inputs.
std::vector<Ternary> simulate_ternary(const Netlist& n, std::span<const Ternary> inputs,
                                      std::span<const Ternary> keys,
                                      FixpointStats* stats = nullptr);

/// Output values only.
std::vector<Ternary> evaluate_outputs(const Netlist& n, std::span<const std::uint8_t> inputs,
                                      std::span<const std::uint8_t> keys);

/// Name-based evaluation. Throws MissingAssignment when an input or key is absent.
std::map<std::string, Ternary> evaluate(const Netlist& n, const Assignment& x,
                                        const KeyAssignment& k);

/// Bits for `wires` taken from `a` by name; throws MissingAssignment.
Bits bits_for(const Netlist& n, const std::vector<WireId>& wires,
                           const Assignment& a);
/// Inverse of bits_for.
Assignment assignment_of(const Netlist& n, const std::vector<WireId>& wires,
                         std::span<const std::uint8_t> bits);

bool is_acyclic(const Netlist& n);

/// 64 input patterns at once for acyclic netlists; one word per wire.
std::vector<std::uint64_t> simulate64(const Netlist& n, std::span<const std::uint64_t> inputs,
                                      std::span<const std::uint64_t> keys);

}  // namespace cyclo
