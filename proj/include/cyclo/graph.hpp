#pragma once

#include <vector>

#include "cyclo/netlist.hpp"

namespace cyclo {

/// Adjacency over gate indices: g -> h when h reads g's output.
using Adjacency = std::vector<std::vector<int>>;

Adjacency gate_successors(const Netlist& n);
Adjacency gate_predecessors(const Netlist& n);

/// Tarjan SCC (iterative). Returns a component id per vertex; ids are assigned
/// in reverse topological order of the condensation (sinks first).
std::vector<int> strongly_connected_components(const Adjacency& succ, int* count = nullptr);

/// True when vertex v lies on some cycle (non-trivial SCC or self-loop).
std::vector<char> cyclic_vertices(const Adjacency& succ);

/// Gates in the transitive fanin of `w` (including its driver), as a mask.
std::vector<char> fanin_cone(const Netlist& n, WireId w);
/// Gates in the transitive fanout of `w`, as a mask.
std::vector<char> fanout_cone(const Netlist& n, WireId w);

}  // namespace cyclo
