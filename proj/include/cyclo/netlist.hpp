#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cyclo {

using WireId = std::uint32_t;
inline constexpr int kNoGate = -1;

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Mux };

std::string_view to_string(GateKind kind);
std::optional<GateKind> parse_gate_kind(std::string_view text);

/// Allowed input counts: NOT/BUF exactly 1, MUX exactly 3, everything else at least 2.
bool arity_ok(GateKind kind, std::size_t inputs);

/// A gate drives exactly one wire. MUX inputs are ordered (select, in0, in1);
/// select = 0 routes in0.
struct Gate {
  WireId output = 0;
  GateKind kind = GateKind::Buf;
  std::vector<WireId> inputs;
};

/// Immutable gate-level netlist. Produced by NetlistBuilder, which enforces the
/// structural invariants; the gate graph may be cyclic.
class Netlist {
 public:
  Netlist() = default;

  const std::string& name() const { return name_; }

  std::size_t wire_count() const { return wire_names_.size(); }
  const std::string& wire_name(WireId w) const { return wire_names_[w]; }
  std::optional<WireId> find_wire(std::string_view name) const;
  /// Throws Error{UndeclaredWire} when absent.
  WireId wire(std::string_view name) const;

  /// Primary inputs (X), key inputs (K) and outputs (Y), in declaration order.
  const std::vector<WireId>& inputs() const { return inputs_; }
  const std::vector<WireId>& key_inputs() const { return key_inputs_; }
  const std::vector<WireId>& outputs() const { return outputs_; }
  /// INPUT declarations in file order, primary and key interleaved.
  const std::vector<WireId>& declared_inputs() const { return declared_inputs_; }

  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t gate_count() const { return gates_.size(); }

  /// Index of the gate driving `w`, or kNoGate for primary/key inputs.
  int driver(WireId w) const { return driver_[w]; }
  /// Gates reading `w`, ascending and without duplicates.
  const std::vector<int>& fanout(WireId w) const { return fanout_[w]; }

  bool is_key_input(WireId w) const { return input_kind_[w] == 2; }
  bool is_primary_input(WireId w) const { return input_kind_[w] == 1; }

  bool acyclic() const { return topo_.has_value(); }
  /// Gate indices in topological order; empty optional for cyclic netlists.
  const std::optional<std::vector<int>>& topological_order() const { return topo_; }

 private:
  friend class NetlistBuilder;

  std::string name_;
  std::vector<std::string> wire_names_;
  std::unordered_map<std::string, WireId> index_;
  std::vector<WireId> inputs_;
  std::vector<WireId> key_inputs_;
  std::vector<WireId> outputs_;
  std::vector<WireId> declared_inputs_;
  std::vector<Gate> gates_;
  std::vector<int> driver_;
  std::vector<std::vector<int>> fanout_;
  std::vector<std::uint8_t> input_kind_;  // 0 gate output, 1 primary, 2 key
  std::optional<std::vector<int>> topo_;
};

/// Name-based, mutable form of a netlist used for parsing and transforms.
/// build() validates and produces the immutable Netlist.
class NetlistBuilder {
 public:
  struct PendingGate {
    std::string output;
    GateKind kind = GateKind::Buf;
    std::vector<std::string> inputs;
    int line = 0;  // source line, 0 when synthesized
  };

  explicit NetlistBuilder(std::string name = "top") : name_(std::move(name)) {}
  static NetlistBuilder from(const Netlist& n);

  void set_name(std::string name) { name_ = std::move(name); }
  const std::string& name() const { return name_; }

  void add_input(std::string wire, int line = 0);
  void add_key_input(std::string wire, int line = 0);
  void add_output(std::string wire, int line = 0);
  std::size_t add_gate(std::string output, GateKind kind, std::vector<std::string> inputs,
                       int line = 0);

  std::size_t gate_count() const { return gates_.size(); }
  PendingGate& gate(std::size_t i) { return gates_[i]; }
  const PendingGate& gate(std::size_t i) const { return gates_[i]; }
  std::optional<std::size_t> find_gate(std::string_view output) const;

  /// Renames the wire driven by gate `i`; readers keep referring to the old name.
  void rename_gate_output(std::size_t i, std::string new_name);
  /// Removes gates whose indices are listed; order of the remaining gates is kept.
  void remove_gates(const std::vector<std::size_t>& indices);

  bool has_name(std::string_view wire) const { return used_.count(std::string(wire)) > 0; }
  /// Returns `stem` or `stem_<n>`, whichever is first unused, and reserves it.
  std::string fresh_name(std::string_view stem);

  const std::vector<std::string>& outputs() const { return outputs_; }
  std::vector<std::string> key_inputs() const;
  std::vector<std::string> primary_inputs() const;

  Netlist build() const;

 private:
  struct InputDecl {
    std::string wire;
    bool key = false;
    int line = 0;
  };

  std::string name_;
  std::vector<InputDecl> inputs_;
  std::vector<std::string> outputs_;
  std::vector<int> output_lines_;
  std::vector<PendingGate> gates_;
  std::unordered_map<std::string, std::size_t> gate_index_;
  std::unordered_set<std::string> used_;
  std::unordered_map<std::string, std::size_t> fresh_counter_;
};

}  // namespace cyclo
