#pragma once

#include <initializer_list>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclo/netlist.hpp"

namespace cyclo {

/// Anything clauses can be poured into: a stored formula or a live solver.
class ClauseSink {
 public:
  virtual ~ClauseSink() = default;
  virtual int new_var() = 0;
  virtual void add_clause(std::span<const int> lits) = 0;

  void add(std::initializer_list<int> lits) { add_clause(std::span<const int>(lits.begin(), lits.size())); }
};

/// Stored clause set plus a (copy tag, wire name) -> variable map.
class CnfFormula : public ClauseSink {
 public:
  int new_var() override { return ++var_count_; }
  /// Throws Error{InvalidFormula} on empty clauses or out-of-range literals.
  void add_clause(std::span<const int> lits) override;

  int var_count() const { return var_count_; }
  std::size_t clause_count() const { return clauses_.size(); }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }

  void bind(const std::string& tag, const std::string& wire, int var) { names_[{tag, wire}] = var; }
  /// 0 when unbound.
  int var_of(const std::string& tag, const std::string& wire) const;
  const std::map<std::pair<std::string, std::string>, int>& name_map() const { return names_; }

  /// True when `model` (indexed by variable, entry 0 unused) satisfies every clause.
  bool satisfied_by(std::span<const std::uint8_t> model) const;

 private:
  int var_count_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::map<std::pair<std::string, std::string>, int> names_;
};

/// Variable per wire (index = WireId) for one encoded circuit copy.
using CopyVars = std::vector<int>;

/// Emits the gate constraints of `n`. Wires with a nonzero entry in `preset`
/// reuse that variable; every other wire gets a fresh one.
CopyVars encode_copy(ClauseSink& sink, const Netlist& n, const CopyVars& preset = {});

/// Gate constraints for out = kind(in...). MUX order: select, in0, in1.
void encode_gate(ClauseSink& sink, GateKind kind, int out, std::span<const int> in);

/// Fresh variable d with d <-> (a xor b).
int encode_xor(ClauseSink& sink, int a, int b);
/// Fresh variable d with d <-> OR(lits); an empty list gives a constant-false variable.
int encode_or(ClauseSink& sink, std::span<const int> lits);

/// Tseitin encoding of one copy into a new formula, or appended to `share`d
/// formula when given; wires named in `shared_wires` reuse the share formula's
/// variables under `share_tag` (Error{ShareMismatch} when absent).
struct ShareSpec {
  const CnfFormula* formula = nullptr;
  std::string tag;
  std::vector<std::string> wires;
};
CnfFormula tseitin_encode(const Netlist& n, const std::string& copy_tag,
                          const ShareSpec& share = {});

/// Two copies sharing X with keys K1/K2 and an output-difference constraint.
/// Name map tags: "X", "K1", "K2", "Y1", "Y2" (plus "C1"/"C2" for internal wires).
CnfFormula build_attack_formula(const Netlist& n);

void write_dimacs(std::ostream& out, const CnfFormula& f, std::span<const int> assumptions = {});
CnfFormula parse_dimacs(const std::string& text);

}  // namespace cyclo
