#include "cyclo/equivalence.hpp"

#include <algorithm>

#include "cyclo/cnf.hpp"
#include "cyclo/error.hpp"
#include "cyclo/graph.hpp"
#include "cyclo/transform.hpp"

namespace cyclo {

namespace {


// Dual-rail literal pair: t means "is 1", f means "is 0"; both false is X.
struct Rail {
  int t;
  int f;
};

class RailEncoder {
 public:
  explicit RailEncoder(ClauseSink& sink) : sink_(sink) {
    one_ = sink_.new_var();
    sink_.add({one_});
  }

  Rail constant(bool b) const { return b ? Rail{one_, -one_} : Rail{-one_, one_}; }
  Rail unknown() const { return {-one_, -one_}; }

  int land(std::span<const int> lits) {
    if (lits.size() == 1) return lits[0];
    int d = sink_.new_var();
    std::vector<int> big{d};
    for (int l : lits) {
      sink_.add({-d, l});
      big.push_back(-l);
    }
    sink_.add_clause(big);
    return d;
  }
  int lor(std::span<const int> lits) {
    std::vector<int> neg(lits.size());
    for (std::size_t i = 0; i < lits.size(); ++i) neg[i] = -lits[i];
    return -land(neg);
  }
  int and2(int a, int b) {
    int v[2] = {a, b};
    return land(v);
  }

  Rail gate(GateKind kind, std::span<const Rail> in) {
    std::vector<int> ts, fs;
    for (const Rail& r : in) {
      ts.push_back(r.t);
      fs.push_back(r.f);
    }
    switch (kind) {
      case GateKind::Buf: return in[0];
      case GateKind::Not: return {in[0].f, in[0].t};
      case GateKind::And: return {land(ts), lor(fs)};
      case GateKind::Nand: return {lor(fs), land(ts)};
      case GateKind::Or: return {lor(ts), land(fs)};
      case GateKind::Nor: return {land(fs), lor(ts)};
      case GateKind::Xor:
      case GateKind::Xnor: {
        Rail acc = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) {
          const Rail& b = in[i];
          int t[2] = {and2(acc.t, b.f), and2(acc.f, b.t)};
          int f[2] = {and2(acc.t, b.t), and2(acc.f, b.f)};
          acc = {lor(t), lor(f)};
        }
        return kind == GateKind::Xor ? acc : Rail{acc.f, acc.t};
      }
      case GateKind::Mux: {
        const Rail &s = in[0], &a = in[1], &b = in[2];
        int t[3] = {and2(s.f, a.t), and2(s.t, b.t), and2(a.t, b.t)};
        int f[3] = {and2(s.f, a.f), and2(s.t, b.f), and2(a.f, b.f)};
        return {lor(t), lor(f)};
      }
    }
    return unknown();
  }

 private:
  ClauseSink& sink_;
  int one_;
};

std::size_t unrolled_size(const Netlist& n) {
  int count = 0;
  auto succ = gate_successors(n);
  auto comp = strongly_connected_components(succ, &count);
  std::vector<std::size_t> size(count, 0);
  for (int c : comp) ++size[c];
  auto cyc = cyclic_vertices(succ);
  std::size_t total = 0;
  for (std::size_t g = 0; g < n.gate_count(); ++g) total += cyc[g] ? size[comp[g]] : 1;
  return total;
}

// Ternary fixpoint of `n` as dual-rail literals; `fixed` presets inputs/keys.
std::vector<Rail> encode_rails(RailEncoder& enc, const Netlist& n, std::vector<Rail> values) {
  auto succ = gate_successors(n);
  int count = 0;
  auto comp = strongly_connected_components(succ, &count);
  auto cyc = cyclic_vertices(succ);
  std::vector<std::vector<int>> members(count);
  for (std::size_t g = 0; g < n.gate_count(); ++g) members[comp[g]].push_back(static_cast<int>(g));

  std::vector<Rail> in;
  auto eval = [&](int g, const std::vector<Rail>& from) {
    const Gate& gate = n.gates()[g];
    in.clear();
    for (WireId w : gate.inputs) in.push_back(from[w]);
    return enc.gate(gate.kind, in);
  };

  // Tarjan numbers sinks first, so walk components from the highest id down.
  for (int c = count - 1; c >= 0; --c) {
    const auto& gs = members[c];
    if (gs.size() == 1 && !cyc[gs[0]]) {
      values[n.gates()[gs[0]].output] = eval(gs[0], values);
      continue;
    }
    for (int g : gs) values[n.gates()[g].output] = enc.unknown();
    std::vector<Rail> next(gs.size());
    for (std::size_t round = 0; round < gs.size(); ++round) {
      for (std::size_t i = 0; i < gs.size(); ++i) next[i] = eval(gs[i], values);
      for (std::size_t i = 0; i < gs.size(); ++i) values[n.gates()[gs[i]].output] = next[i];
    }
  }
  return values;
}

std::optional<Bits> exhaustive(const Netlist& keyed, const Bits& key_bits, const Netlist& oracle,
                               const Interface& io) {
  const std::size_t ni = oracle.inputs().size();
  Bits x(ni), lx(keyed.inputs().size());
  std::vector<std::size_t> pos(ni);
  for (std::size_t i = 0; i < ni; ++i)
    pos[i] = static_cast<std::size_t>(
        std::find(keyed.inputs().begin(), keyed.inputs().end(), io.locked_inputs[i]) -
        keyed.inputs().begin());
  for (std::uint64_t m = 0; m < (1ULL << ni); ++m) {
    for (std::size_t i = 0; i < ni; ++i) {
      x[i] = (m >> i) & 1u;
      lx[pos[i]] = x[i];
    }
    auto lv = simulate(keyed, lx, key_bits);
    auto ov = simulate(oracle, x, {});
    for (auto [lw, ow] : io.outputs)
      if (!is_binary(lv[lw]) || lv[lw] != ov[ow]) return x;
  }
  return std::nullopt;
}

}  // namespace

Interface match_interface(const Netlist& locked, const Netlist& oracle) {
  Interface io;
  if (locked.inputs().size() != oracle.inputs().size())
    throw Error(ErrorCode::InterfaceMismatch, "primary input counts differ");
  for (WireId w : oracle.inputs()) {
    auto lw = locked.find_wire(oracle.wire_name(w));
    if (!lw || !locked.is_primary_input(*lw))
      throw Error(ErrorCode::InterfaceMismatch, "input '" + oracle.wire_name(w) + "' missing");
    io.locked_inputs.push_back(*lw);
  }
  if (locked.outputs().size() != oracle.outputs().size())
    throw Error(ErrorCode::InterfaceMismatch, "output counts differ");
  bool by_name = true;
  for (WireId w : oracle.outputs()) {
    auto lw = locked.find_wire(oracle.wire_name(w));
    if (!lw || std::find(locked.outputs().begin(), locked.outputs().end(), *lw) == locked.outputs().end()) {
      by_name = false;
      break;
    }
    io.outputs.emplace_back(*lw, w);
  }
  if (!by_name) {
    io.outputs.clear();
    for (std::size_t i = 0; i < oracle.outputs().size(); ++i)
      io.outputs.emplace_back(locked.outputs()[i], oracle.outputs()[i]);
  }
  return io;
}

std::optional<Bits> find_mismatch(const Netlist& locked, const KeyAssignment& key,
                                  const Netlist& oracle, const EquivalenceOptions& opts) {
  Netlist keyed = prune_dead_logic(apply_key(locked, key));
  Interface io = match_interface(keyed, oracle);
  Bits key_bits = bits_for(keyed, keyed.key_inputs(), key);

  SolverSession session(opts.solver);
  std::vector<int> input_vars;

  if (keyed.acyclic() && oracle.acyclic()) {
    CopyVars preset(keyed.wire_count(), 0);
    for (std::size_t i = 0; i < keyed.key_inputs().size(); ++i) {
      int v = session.new_var();
      session.add({key_bits[i] ? v : -v});
      preset[keyed.key_inputs()[i]] = v;
    }
    auto lv = encode_copy(session, keyed, preset);
    CopyVars opre(oracle.wire_count(), 0);
    for (std::size_t i = 0; i < oracle.inputs().size(); ++i) {
      opre[oracle.inputs()[i]] = lv[io.locked_inputs[i]];
      input_vars.push_back(lv[io.locked_inputs[i]]);
    }
    auto ov = encode_copy(session, oracle, opre);
    std::vector<int> diffs;
    for (auto [lw, ow] : io.outputs) diffs.push_back(encode_xor(session, lv[lw], ov[ow]));
    if (diffs.empty()) return std::nullopt;
    session.add_clause(diffs);
  } else {
    if (unrolled_size(keyed) + unrolled_size(oracle) > opts.max_unrolled_gates) {
      if (oracle.inputs().size() > opts.max_simulated_inputs)
        throw Error(ErrorCode::TooLargeForSimulationFallback,
                    "cyclic miter over budget and " + std::to_string(oracle.inputs().size()) +
                        " inputs are too many to simulate");
      return exhaustive(keyed, key_bits, oracle, io);
    }
    RailEncoder enc(session);
    std::vector<Rail> lvals(keyed.wire_count(), enc.unknown());
    std::vector<Rail> ovals(oracle.wire_count(), enc.unknown());
    for (std::size_t i = 0; i < keyed.key_inputs().size(); ++i)
      lvals[keyed.key_inputs()[i]] = enc.constant(key_bits[i] != 0);
    for (std::size_t i = 0; i < oracle.inputs().size(); ++i) {
      int v = session.new_var();
      input_vars.push_back(v);
      lvals[io.locked_inputs[i]] = {v, -v};
      ovals[oracle.inputs()[i]] = {v, -v};
    }
    lvals = encode_rails(enc, keyed, std::move(lvals));
    ovals = encode_rails(enc, oracle, std::move(ovals));
    std::vector<int> differ;
    for (auto [lw, ow] : io.outputs) {
      int both[2] = {enc.and2(lvals[lw].t, ovals[ow].t), enc.and2(lvals[lw].f, ovals[ow].f)};
      differ.push_back(-enc.lor(both));
    }
    if (differ.empty()) return std::nullopt;
    session.add_clause(differ);
  }

  auto verdict = session.solve();
  if (verdict.status == Verdict::Timeout)
    throw Error(ErrorCode::BackendFailure, "equivalence check ran out of time");
  if (!verdict.sat()) return std::nullopt;
  Bits x;
  for (int v : input_vars) x.push_back(verdict.value(v) ? 1 : 0);
  return x;
}

bool check_equivalence(const Netlist& locked, const KeyAssignment& key, const Netlist& oracle,
                       const EquivalenceOptions& opts) {
  return !find_mismatch(locked, key, oracle, opts).has_value();
}

}  // namespace cyclo
