#pragma once

#include <optional>

#include "cyclo/netlist.hpp"
#include "cyclo/simulate.hpp"

namespace cyclo {

/// Position of the key input inside a key gate: the select of a MUX, or the
/// single key operand of an XOR/XNOR. nullopt for ordinary gates.
std::optional<std::size_t> key_operand(const Netlist& n, const Gate& g);

/// Constant-propagates a key through the key gates: a key MUX becomes a BUF of
/// the selected data input, a key XOR/XNOR loses its key operand. Key inputs
/// stay declared so the interface is unchanged. Throws MissingAssignment.
Netlist apply_key(const Netlist& n, const KeyAssignment& key);

/// apply_key() followed by removing the key inputs, giving a key-free netlist
/// usable as an oracle. Throws MissingAssignment when a key feeds anything
/// other than a key gate.
Netlist unlock(const Netlist& n, const KeyAssignment& key);

/// Drops gates outside the transitive fanin of the outputs.
Netlist prune_dead_logic(const Netlist& n);

}  // namespace cyclo
