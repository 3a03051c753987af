#include "cyclo/simulate.hpp"

#include <stdexcept>

#include "cyclo/error.hpp"

namespace cyclo {

Ternary eval_gate(GateKind kind, std::span<const Ternary> in) {
  switch (kind) {
    case GateKind::Buf: return in[0];
    case GateKind::Not: return t_not(in[0]);
    case GateKind::Mux: return t_mux(in[0], in[1], in[2]);
    case GateKind::And:
    case GateKind::Nand: {
      Ternary acc = Ternary::One;
      for (Ternary v : in) acc = t_and(acc, v);
      return kind == GateKind::And ? acc : t_not(acc);
    }
    case GateKind::Or:
    case GateKind::Nor: {
      Ternary acc = Ternary::Zero;
      for (Ternary v : in) acc = t_or(acc, v);
      return kind == GateKind::Or ? acc : t_not(acc);
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      Ternary acc = Ternary::Zero;
      for (Ternary v : in) acc = t_xor(acc, v);
      return kind == GateKind::Xor ? acc : t_not(acc);
    }
  }
  return Ternary::X;
}

namespace {

Ternary eval_at(const Gate& g, const std::vector<Ternary>& values) {
  Ternary buf[8];
  std::vector<Ternary> big;
  std::span<const Ternary> in;
  if (g.inputs.size() <= 8) {
    for (std::size_t i = 0; i < g.inputs.size(); ++i) buf[i] = values[g.inputs[i]];
    in = std::span<const Ternary>(buf, g.inputs.size());
  } else {
    big.reserve(g.inputs.size());
    for (WireId w : g.inputs) big.push_back(values[w]);
    in = big;
  }
  return eval_gate(g.kind, in);
}

}  // namespace

std::vector<Ternary> simulate_ternary(const Netlist& n, std::span<const Ternary> inputs,
                                      std::span<const Ternary> keys, FixpointStats* stats) {
  if (inputs.size() != n.inputs().size() || keys.size() != n.key_inputs().size())
    throw Error(ErrorCode::MissingAssignment,
                "expected " + std::to_string(n.inputs().size()) + " input and " +
                    std::to_string(n.key_inputs().size()) + " key values");
  std::vector<Ternary> values(n.wire_count(), Ternary::X);
  for (std::size_t i = 0; i < inputs.size(); ++i) values[n.inputs()[i]] = inputs[i];
  for (std::size_t i = 0; i < keys.size(); ++i) values[n.key_inputs()[i]] = keys[i];

  const auto& gates = n.gates();
  if (const auto& topo = n.topological_order()) {
    for (int g : *topo) values[gates[g].output] = eval_at(gates[g], values);
    if (stats) *stats = {1, true};
    return values;
  }

  // Synchronous rounds; only gates whose inputs moved last round are re-evaluated,
  // which gives the same sequence of states as updating every gate.
  const std::size_t cap = 2 * gates.size();
  std::vector<char> dirty(gates.size(), 1);
  std::vector<int> work(gates.size());
  for (std::size_t i = 0; i < gates.size(); ++i) work[i] = static_cast<int>(i);
  std::vector<std::pair<WireId, Ternary>> updates;
  std::size_t rounds = 0;
  bool converged = false;
  while (rounds < cap) {
    ++rounds;
    updates.clear();
    for (int g : work) {
      dirty[g] = 0;
      Ternary v = eval_at(gates[g], values);
      if (v != values[gates[g].output]) updates.emplace_back(gates[g].output, v);
    }
    if (updates.empty()) {
      converged = true;
      break;
    }
    work.clear();
    for (auto [w, v] : updates) {
      values[w] = v;
      for (int succ : n.fanout(w))
        if (!dirty[succ]) {
          dirty[succ] = 1;
          work.push_back(succ);
        }
    }
  }
  if (stats) *stats = {rounds, converged};
  return values;
}

std::vector<Ternary> simulate(const Netlist& n, std::span<const std::uint8_t> inputs,
                              std::span<const std::uint8_t> keys, FixpointStats* stats) {
  std::vector<Ternary> x(inputs.size()), k(keys.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) x[i] = ternary(inputs[i] != 0);
  for (std::size_t i = 0; i < keys.size(); ++i) k[i] = ternary(keys[i] != 0);
  return simulate_ternary(n, x, k, stats);
}

std::vector<Ternary> evaluate_outputs(const Netlist& n, std::span<const std::uint8_t> inputs,
                                      std::span<const std::uint8_t> keys) {
  auto values = simulate(n, inputs, keys);
  std::vector<Ternary> out;
  out.reserve(n.outputs().size());
  for (WireId w : n.outputs()) out.push_back(values[w]);
  return out;
}

Bits bits_for(const Netlist& n, const std::vector<WireId>& wires,
                           const Assignment& a) {
  Bits bits;
  bits.reserve(wires.size());
  for (WireId w : wires) {
    auto it = a.find(n.wire_name(w));
    if (it == a.end())
      throw Error(ErrorCode::MissingAssignment, "no value for '" + n.wire_name(w) + "'");
    bits.push_back(it->second);
  }
  return bits;
}

Assignment assignment_of(const Netlist& n, const std::vector<WireId>& wires,
                         std::span<const std::uint8_t> bits) {
  Assignment a;
  for (std::size_t i = 0; i < wires.size(); ++i) a[n.wire_name(wires[i])] = bits[i] != 0;
  return a;
}

std::map<std::string, Ternary> evaluate(const Netlist& n, const Assignment& x,
                                        const KeyAssignment& k) {
  auto xb = bits_for(n, n.inputs(), x);
  auto kb = bits_for(n, n.key_inputs(), k);
  auto values = simulate(n, xb, kb);
  std::map<std::string, Ternary> out;
  for (WireId w : n.outputs()) out[n.wire_name(w)] = values[w];
  return out;
}

bool is_acyclic(const Netlist& n) { return n.acyclic(); }

std::vector<std::uint64_t> simulate64(const Netlist& n, std::span<const std::uint64_t> inputs,
                                      std::span<const std::uint64_t> keys) {
  const auto& topo = n.topological_order();
  if (!topo) throw std::logic_error("simulate64 requires an acyclic netlist");
  std::vector<std::uint64_t> v(n.wire_count(), 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) v[n.inputs()[i]] = inputs[i];
  for (std::size_t i = 0; i < keys.size(); ++i) v[n.key_inputs()[i]] = keys[i];
  for (int gi : *topo) {
    const Gate& g = n.gates()[gi];
    std::uint64_t r = 0;
    switch (g.kind) {
      case GateKind::Buf: r = v[g.inputs[0]]; break;
      case GateKind::Not: r = ~v[g.inputs[0]]; break;
      case GateKind::Mux:
        r = (~v[g.inputs[0]] & v[g.inputs[1]]) | (v[g.inputs[0]] & v[g.inputs[2]]);
        break;
      case GateKind::And:
      case GateKind::Nand:
        r = ~0ULL;
        for (WireId w : g.inputs) r &= v[w];
        if (g.kind == GateKind::Nand) r = ~r;
        break;
      case GateKind::Or:
      case GateKind::Nor:
        for (WireId w : g.inputs) r |= v[w];
        if (g.kind == GateKind::Nor) r = ~r;
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
        for (WireId w : g.inputs) r ^= v[w];
        if (g.kind == GateKind::Xnor) r = ~r;
        break;
    }
    v[g.output] = r;
  }
  return v;
}

}  // namespace cyclo
