#include "cyclo/cnf.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

#include "cyclo/error.hpp"

namespace cyclo {

void CnfFormula::add_clause(std::span<const int> lits) {
  if (lits.empty()) throw Error(ErrorCode::InvalidFormula, "empty clause");
  for (int l : lits)
    if (l == 0 || std::abs(l) > var_count_)
      throw Error(ErrorCode::InvalidFormula, "literal " + std::to_string(l) + " out of range");
  clauses_.emplace_back(lits.begin(), lits.end());
}

int CnfFormula::var_of(const std::string& tag, const std::string& wire) const {
  auto it = names_.find({tag, wire});
  return it == names_.end() ? 0 : it->second;
}

bool CnfFormula::satisfied_by(std::span<const std::uint8_t> model) const {
  for (const auto& c : clauses_) {
    bool sat = false;
    for (int l : c) {
      int v = std::abs(l);
      if (static_cast<std::size_t>(v) < model.size() && (model[v] != 0) == (l > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

int encode_xor(ClauseSink& sink, int a, int b) {
  int d = sink.new_var();
  sink.add({-d, a, b});
  sink.add({-d, -a, -b});
  sink.add({d, -a, b});
  sink.add({d, a, -b});
  return d;
}

int encode_or(ClauseSink& sink, std::span<const int> lits) {
  int d = sink.new_var();
  std::vector<int> big{-d};
  for (int l : lits) {
    big.push_back(l);
    sink.add({d, -l});
  }
  sink.add_clause(big);
  return d;
}

namespace {

void encode_and_like(ClauseSink& sink, int out, std::span<const int> in) {
  // out <-> AND(in); NAND/OR/NOR are reached by negating out and/or inputs.
  std::vector<int> big{out};
  for (int a : in) {
    sink.add({-out, a});
    big.push_back(-a);
  }
  sink.add_clause(big);
}

void encode_xor2(ClauseSink& sink, int out, int a, int b) {
  sink.add({-out, a, b});
  sink.add({-out, -a, -b});
  sink.add({out, -a, b});
  sink.add({out, a, -b});
}

}  // namespace

void encode_gate(ClauseSink& sink, GateKind kind, int out, std::span<const int> in) {
  std::vector<int> neg(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) neg[i] = -in[i];
  switch (kind) {
    case GateKind::And: encode_and_like(sink, out, in); break;
    case GateKind::Nand: encode_and_like(sink, -out, in); break;
    case GateKind::Or: encode_and_like(sink, -out, neg); break;
    case GateKind::Nor: encode_and_like(sink, out, neg); break;
    case GateKind::Not:
      sink.add({out, in[0]});
      sink.add({-out, -in[0]});
      break;
    case GateKind::Buf:
      sink.add({-out, in[0]});
      sink.add({out, -in[0]});
      break;
    case GateKind::Mux: {
      int s = in[0], a = in[1], b = in[2];
      sink.add({-s, -b, out});
      sink.add({-s, b, -out});
      sink.add({s, -a, out});
      sink.add({s, a, -out});
      break;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      int acc = in[0];
      for (std::size_t i = 1; i + 1 < in.size(); ++i) {
        int t = sink.new_var();
        encode_xor2(sink, t, acc, in[i]);
        acc = t;
      }
      encode_xor2(sink, kind == GateKind::Xor ? out : -out, acc, in.back());
      break;
    }
  }
}

CopyVars encode_copy(ClauseSink& sink, const Netlist& n, const CopyVars& preset) {
  CopyVars vars(n.wire_count(), 0);
  for (std::size_t w = 0; w < n.wire_count(); ++w)
    vars[w] = (w < preset.size() && preset[w] != 0) ? preset[w] : sink.new_var();
  std::vector<int> in;
  for (const Gate& g : n.gates()) {
    in.clear();
    for (WireId w : g.inputs) in.push_back(vars[w]);
    encode_gate(sink, g.kind, vars[g.output], in);
  }
  return vars;
}

CnfFormula tseitin_encode(const Netlist& n, const std::string& copy_tag, const ShareSpec& share) {
  CnfFormula f;
  CopyVars preset(n.wire_count(), 0);
  if (share.formula) {
    f = *share.formula;
    for (const auto& name : share.wires) {
      auto w = n.find_wire(name);
      int v = share.formula->var_of(share.tag, name);
      if (!w || v == 0)
        throw Error(ErrorCode::ShareMismatch, "shared wire '" + name + "' is not in the formula");
      preset[*w] = v;
    }
  }
  auto vars = encode_copy(f, n, preset);
  for (std::size_t w = 0; w < n.wire_count(); ++w)
    f.bind(copy_tag, n.wire_name(static_cast<WireId>(w)), vars[w]);
  return f;
}

CnfFormula build_attack_formula(const Netlist& n) {
  if (n.key_inputs().empty()) throw Error(ErrorCode::NoKeys, "netlist has no key inputs");
  if (n.outputs().empty()) throw Error(ErrorCode::NoKeys, "netlist has no outputs");
  CnfFormula f;
  auto c1 = encode_copy(f, n);
  CopyVars preset(n.wire_count(), 0);
  for (WireId w : n.inputs()) preset[w] = c1[w];
  auto c2 = encode_copy(f, n, preset);

  auto bind_copy = [&](const CopyVars& c, const char* internal, const char* key, const char* out) {
    for (std::size_t w = 0; w < n.wire_count(); ++w) {
      if (n.is_primary_input(static_cast<WireId>(w))) continue;
      f.bind(internal, n.wire_name(static_cast<WireId>(w)), c[w]);
    }
    for (WireId w : n.key_inputs()) f.bind(key, n.wire_name(w), c[w]);
    for (WireId w : n.outputs()) f.bind(out, n.wire_name(w), c[w]);
  };
  for (WireId w : n.inputs()) f.bind("X", n.wire_name(w), c1[w]);
  bind_copy(c1, "C1", "K1", "Y1");
  bind_copy(c2, "C2", "K2", "Y2");

  std::vector<int> diffs;
  for (WireId w : n.outputs()) diffs.push_back(encode_xor(f, c1[w], c2[w]));
  f.add_clause(diffs);
  return f;
}

void write_dimacs(std::ostream& out, const CnfFormula& f, std::span<const int> assumptions) {
  out << "p cnf " << f.var_count() << ' ' << f.clause_count() + assumptions.size() << '\n';
  for (const auto& c : f.clauses()) {
    for (int l : c) out << l << ' ';
    out << "0\n";
  }
  for (int a : assumptions) out << a << " 0\n";
}

CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CnfFormula f;
  int declared_vars = -1;
  std::vector<int> clause;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      long clauses = 0;
      if (!(ls >> fmt >> declared_vars >> clauses) || fmt != "cnf" || declared_vars < 0)
        throw Error(ErrorCode::InvalidFormula, "bad DIMACS header: " + line);
      while (f.var_count() < declared_vars) f.new_var();
      continue;
    }
    if (declared_vars < 0) throw Error(ErrorCode::InvalidFormula, "clause before header");
    std::istringstream body(line);
    long lit = 0;
    while (body >> lit) {
      if (lit == 0) {
        f.add_clause(clause);
        clause.clear();
      } else {
        clause.push_back(static_cast<int>(lit));
      }
    }
  }
  if (!clause.empty()) f.add_clause(clause);
  return f;
}

}  // namespace cyclo
