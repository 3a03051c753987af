#include "cyclo/transform.hpp"

#include "cyclo/error.hpp"

namespace cyclo {

std::optional<std::size_t> key_operand(const Netlist& n, const Gate& g) {
  if (g.kind == GateKind::Mux) {
    if (n.is_key_input(g.inputs[0])) return 0;
    return std::nullopt;
  }
  if (g.kind != GateKind::Xor && g.kind != GateKind::Xnor) return std::nullopt;
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < g.inputs.size(); ++i) {
    if (!n.is_key_input(g.inputs[i])) continue;
    if (found) return std::nullopt;
    found = i;
  }
  return found;
}

Netlist apply_key(const Netlist& n, const KeyAssignment& key) {
  auto bits = bits_for(n, n.key_inputs(), key);
  std::vector<std::uint8_t> value(n.wire_count(), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) value[n.key_inputs()[i]] = bits[i];

  NetlistBuilder b = NetlistBuilder::from(n);
  for (std::size_t gi = 0; gi < n.gate_count(); ++gi) {
    const Gate& g = n.gates()[gi];
    auto pos = key_operand(n, g);
    if (!pos) continue;
    auto& pg = b.gate(gi);
    if (g.kind == GateKind::Mux) {
      std::string chosen = pg.inputs[value[g.inputs[0]] ? 2 : 1];
      pg.kind = GateKind::Buf;
      pg.inputs = {chosen};
      continue;
    }
    bool invert = (value[g.inputs[*pos]] != 0) != (g.kind == GateKind::Xnor);
    pg.inputs.erase(pg.inputs.begin() + static_cast<std::ptrdiff_t>(*pos));
    if (pg.inputs.size() == 1)
      pg.kind = invert ? GateKind::Not : GateKind::Buf;
    else
      pg.kind = invert ? GateKind::Xnor : GateKind::Xor;
  }
  return b.build();
}

Netlist unlock(const Netlist& n, const KeyAssignment& key) {
  Netlist keyed = apply_key(n, key);
  NetlistBuilder b(keyed.name());
  for (WireId w : keyed.declared_inputs())
    if (!keyed.is_key_input(w)) b.add_input(keyed.wire_name(w));
  for (WireId w : keyed.outputs()) b.add_output(keyed.wire_name(w));
  for (const Gate& g : keyed.gates()) {
    std::vector<std::string> ins;
    for (WireId w : g.inputs) {
      if (keyed.is_key_input(w))
        throw Error(ErrorCode::MissingAssignment,
                    "key '" + keyed.wire_name(w) + "' still drives " + keyed.wire_name(g.output));
      ins.push_back(keyed.wire_name(w));
    }
    b.add_gate(keyed.wire_name(g.output), g.kind, std::move(ins));
  }
  return b.build();
}

Netlist prune_dead_logic(const Netlist& n) {
  std::vector<char> live(n.gate_count(), 0);
  std::vector<int> todo;
  for (WireId w : n.outputs())
    if (int d = n.driver(w); d != kNoGate) todo.push_back(d);
  while (!todo.empty()) {
    int g = todo.back();
    todo.pop_back();
    if (live[g]) continue;
    live[g] = 1;
    for (WireId in : n.gates()[g].inputs)
      if (int d = n.driver(in); d != kNoGate && !live[d]) todo.push_back(d);
  }
  std::vector<std::size_t> dead;
  for (std::size_t g = 0; g < n.gate_count(); ++g)
    if (!live[g]) dead.push_back(g);
  if (dead.empty()) return n;
  NetlistBuilder b = NetlistBuilder::from(n);
  b.remove_gates(dead);
  return b.build();
}

}  // namespace cyclo
