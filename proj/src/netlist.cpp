#include "cyclo/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "cyclo/error.hpp"

namespace cyclo {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
    case GateKind::Mux: return "MUX";
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view text) {
  std::string up(text);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "AND") return GateKind::And;
  if (up == "NAND") return GateKind::Nand;
  if (up == "OR") return GateKind::Or;
  if (up == "NOR") return GateKind::Nor;
  if (up == "XOR") return GateKind::Xor;
  if (up == "XNOR") return GateKind::Xnor;
  if (up == "NOT" || up == "INV") return GateKind::Not;
  if (up == "BUF" || up == "BUFF") return GateKind::Buf;
  if (up == "MUX") return GateKind::Mux;
  return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t inputs) {
  switch (kind) {
    case GateKind::Not:
    case GateKind::Buf: return inputs == 1;
    case GateKind::Mux: return inputs == 3;
    default: return inputs >= 2;
  }
}

std::optional<WireId> Netlist::find_wire(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WireId Netlist::wire(std::string_view name) const {
  if (auto w = find_wire(name)) return *w;
  throw Error(ErrorCode::UndeclaredWire, "no wire named '" + std::string(name) + "'");
}

namespace {

std::string at_line(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : std::string();
}

}  // namespace

NetlistBuilder NetlistBuilder::from(const Netlist& n) {
  NetlistBuilder b(n.name());
  for (WireId w : n.declared_inputs()) {
    if (n.is_key_input(w))
      b.add_key_input(n.wire_name(w));
    else
      b.add_input(n.wire_name(w));
  }
  for (WireId w : n.outputs()) b.add_output(n.wire_name(w));
  for (const Gate& g : n.gates()) {
    std::vector<std::string> ins;
    ins.reserve(g.inputs.size());
    for (WireId w : g.inputs) ins.push_back(n.wire_name(w));
    b.add_gate(n.wire_name(g.output), g.kind, std::move(ins));
  }
  return b;
}

void NetlistBuilder::add_input(std::string wire, int line) {
  used_.insert(wire);
  inputs_.push_back({std::move(wire), false, line});
}

void NetlistBuilder::add_key_input(std::string wire, int line) {
  used_.insert(wire);
  inputs_.push_back({std::move(wire), true, line});
}

void NetlistBuilder::add_output(std::string wire, int line) {
  used_.insert(wire);
  outputs_.push_back(std::move(wire));
  output_lines_.push_back(line);
}

std::size_t NetlistBuilder::add_gate(std::string output, GateKind kind,
                                     std::vector<std::string> inputs, int line) {
  for (const auto& in : inputs) used_.insert(in);
  used_.insert(output);
  std::size_t idx = gates_.size();
  // First driver wins the index; duplicates are reported by build().
  gate_index_.emplace(output, idx);
  gates_.push_back({std::move(output), kind, std::move(inputs), line});
  return idx;
}

std::optional<std::size_t> NetlistBuilder::find_gate(std::string_view output) const {
  auto it = gate_index_.find(std::string(output));
  if (it == gate_index_.end()) return std::nullopt;
  return it->second;
}

void NetlistBuilder::rename_gate_output(std::size_t i, std::string new_name) {
  auto it = gate_index_.find(gates_[i].output);
  if (it != gate_index_.end() && it->second == i) gate_index_.erase(it);
  used_.insert(new_name);
  gate_index_.emplace(new_name, i);
  gates_[i].output = std::move(new_name);
}

void NetlistBuilder::remove_gates(const std::vector<std::size_t>& indices) {
  std::vector<bool> drop(gates_.size(), false);
  for (auto i : indices) drop.at(i) = true;
  std::vector<PendingGate> kept;
  kept.reserve(gates_.size());
  for (std::size_t i = 0; i < gates_.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(gates_[i]));
  gates_ = std::move(kept);
  gate_index_.clear();
  for (std::size_t i = 0; i < gates_.size(); ++i) gate_index_.emplace(gates_[i].output, i);
}

std::string NetlistBuilder::fresh_name(std::string_view stem) {
  std::string base(stem);
  if (!used_.count(base)) {
    used_.insert(base);
    return base;
  }
  auto& counter = fresh_counter_[base];
  std::string candidate;
  do {
    candidate = base + "_" + std::to_string(++counter);
  } while (used_.count(candidate));
  used_.insert(candidate);
  return candidate;
}

std::vector<std::string> NetlistBuilder::key_inputs() const {
  std::vector<std::string> out;
  for (const auto& d : inputs_)
    if (d.key) out.push_back(d.wire);
  return out;
}

std::vector<std::string> NetlistBuilder::primary_inputs() const {
  std::vector<std::string> out;
  for (const auto& d : inputs_)
    if (!d.key) out.push_back(d.wire);
  return out;
}

Netlist NetlistBuilder::build() const {
  Netlist n;
  n.name_ = name_;

  auto declare = [&](const std::string& wire, std::uint8_t kind, int line) {
    auto [it, fresh] = n.index_.emplace(wire, static_cast<WireId>(n.wire_names_.size()));
    if (!fresh)
      throw Error(ErrorCode::DuplicateDriver, "wire '" + wire + "' has more than one driver" +
                                                  at_line(line));
    n.wire_names_.push_back(wire);
    n.input_kind_.push_back(kind);
    return it->second;
  };

  for (const auto& d : inputs_) {
    WireId w = declare(d.wire, d.key ? 2 : 1, d.line);
    n.declared_inputs_.push_back(w);
    (d.key ? n.key_inputs_ : n.inputs_).push_back(w);
  }
  for (const auto& g : gates_) declare(g.output, 0, g.line);

  n.driver_.assign(n.wire_names_.size(), kNoGate);
  n.fanout_.assign(n.wire_names_.size(), {});
  n.gates_.reserve(gates_.size());

  auto lookup = [&](const std::string& wire, int line) {
    auto it = n.index_.find(wire);
    if (it == n.index_.end())
      throw Error(ErrorCode::UndeclaredWire, "wire '" + wire + "' is never driven" + at_line(line));
    return it->second;
  };

  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const auto& pg = gates_[i];
    if (!arity_ok(pg.kind, pg.inputs.size()))
      throw Error(ErrorCode::ArityError, std::string(to_string(pg.kind)) + " gate '" + pg.output +
                                             "' has " + std::to_string(pg.inputs.size()) +
                                             " inputs" + at_line(pg.line));
    Gate g;
    g.output = n.index_.at(pg.output);
    g.kind = pg.kind;
    for (const auto& in : pg.inputs) g.inputs.push_back(lookup(in, pg.line));
    n.driver_[g.output] = static_cast<int>(i);
    for (WireId in : g.inputs) {
      auto& fo = n.fanout_[in];
      if (fo.empty() || fo.back() != static_cast<int>(i)) fo.push_back(static_cast<int>(i));
    }
    n.gates_.push_back(std::move(g));
  }

  std::unordered_set<WireId> seen_out;
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    WireId w = lookup(outputs_[i], output_lines_[i]);
    if (!seen_out.insert(w).second)
      throw Error(ErrorCode::SyntaxError,
                  "output '" + outputs_[i] + "' declared twice" + at_line(output_lines_[i]));
    n.outputs_.push_back(w);
  }

  // Kahn's algorithm over gates; leftover gates mean a cycle.
  std::vector<int> indeg(n.gates_.size(), 0);
  for (std::size_t i = 0; i < n.gates_.size(); ++i)
    for (WireId in : n.gates_[i].inputs)
      if (n.driver_[in] != kNoGate) ++indeg[i];
  std::deque<int> ready;
  for (std::size_t i = 0; i < indeg.size(); ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  std::vector<int> order;
  order.reserve(n.gates_.size());
  while (!ready.empty()) {
    int g = ready.front();
    ready.pop_front();
    order.push_back(g);
    // A gate reading the same wire twice appears once in fanout but counts twice in indeg.
    for (int succ : n.fanout_[n.gates_[g].output]) {
      int times = static_cast<int>(std::count(n.gates_[succ].inputs.begin(),
                                              n.gates_[succ].inputs.end(), n.gates_[g].output));
      indeg[succ] -= times;
      if (indeg[succ] == 0) ready.push_back(succ);
    }
  }
  if (order.size() == n.gates_.size()) n.topo_ = std::move(order);
  return n;
}

}  // namespace cyclo
