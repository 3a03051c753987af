#include "cyclo/attack.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "cyclo/cnf.hpp"
#include "cyclo/equivalence.hpp"
#include "cyclo/error.hpp"

namespace cyclo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

double remaining(Clock::time_point deadline) {
  return std::max(0.0, std::chrono::duration<double>(deadline - Clock::now()).count());
}

Clock::time_point after(double seconds) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

std::string bit_string(const Bits& b) {
  std::string s;
  for (auto v : b) s.push_back(v ? '1' : '0');
  return s;
}

// CycSAT pre-processing. Returns nullopt on a limit or timeout.
std::optional<NcClauses> build_nc(const Netlist& locked, NcMode mode, const AttackConfig& cfg,
                                  Clock::time_point deadline, AttackResult& r) {
  auto t0 = Clock::now();
  FeedbackSet fs = find_feedback_set(locked);
  std::optional<CycleSet> cs;
  if (mode == NcMode::StructuralAllCycles) {
    EnumOptions eo = cfg.cycle_limits;
    eo.store = true;
    eo.timeout_seconds = std::min(eo.timeout_seconds, remaining(deadline));
    cs = enumerate_cycles(locked, eo);
    r.cycles_visited = cs->count;
    if (cs->status != EnumStatus::Complete) {
      r.preprocess_seconds = seconds_since(t0);
      r.note = "cycle enumeration " + std::string(to_string(cs->status));
      return std::nullopt;
    }
  }
  NcOptions no = cfg.nc_limits;
  no.timeout_seconds = std::min(no.timeout_seconds, remaining(deadline));
  NcClauses nc = compute_nc(locked, fs, cs ? &*cs : nullptr, mode, no);
  r.preprocess_seconds = seconds_since(t0);
  r.cycles_visited = nc.cycles_visited;
  r.nc_clause_count = nc.clauses.size();
  if (nc.status != EnumStatus::Complete) {
    r.note = "nc construction " + std::string(to_string(nc.status));
    return std::nullopt;
  }
  return nc;
}

}  // namespace

void AttackConfig::validate() const {
  if (iteration_cap == 0) throw Error(ErrorCode::InvalidRecipe, "iteration cap must be positive");
  if (!(solve_timeout_seconds > 0) || !(total_timeout_seconds > 0))
    throw Error(ErrorCode::InvalidRecipe, "timeouts must be positive");
}

std::string_view to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::Success: return "Success";
    case AttackStatus::IterationCapReached: return "IterationCapReached";
    case AttackStatus::Unsat: return "Unsat";
    case AttackStatus::PreprocessTimeout: return "PreprocessTimeout";
    case AttackStatus::WrongKey: return "WrongKey";
  }
  return "?";
}

Bits oracle_query(const Netlist& oracle, std::span<const std::uint8_t> x) {
  if (!oracle.key_inputs().empty())
    throw Error(ErrorCode::InterfaceMismatch, "oracle has key inputs");
  if (x.size() != oracle.inputs().size())
    throw Error(ErrorCode::MissingAssignment, "oracle query needs " +
                                                  std::to_string(oracle.inputs().size()) + " input bits");
  auto out = evaluate_outputs(oracle, x, {});
  Bits y;
  y.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == Ternary::X)
      throw Error(ErrorCode::OracleAmbiguous,
                  "oracle output '" + oracle.wire_name(oracle.outputs()[i]) + "' is X");
    y.push_back(out[i] == Ternary::One ? 1 : 0);
  }
  return y;
}

AttackResult run_sat_attack(const Netlist& locked, const Netlist& oracle, const AttackConfig& cfg) {
  cfg.validate();
  if (locked.key_inputs().empty()) throw Error(ErrorCode::NoKeys, "locked netlist has no key inputs");
  if (!oracle.key_inputs().empty())
    throw Error(ErrorCode::InterfaceMismatch, "oracle has key inputs");
  const Interface io = match_interface(locked, oracle);

  const auto start = Clock::now();
  const auto deadline = after(cfg.total_timeout_seconds);
  AttackResult r;
  auto finish = [&](AttackStatus st, std::string note = {}) {
    r.status = st;
    if (!note.empty()) r.note = std::move(note);
    r.total_seconds = seconds_since(start);
    return r;
  };

  std::optional<NcClauses> nc;
  if (cfg.nc_mode) {
    nc = build_nc(locked, *cfg.nc_mode, cfg, deadline, r);
    if (!nc) return finish(AttackStatus::PreprocessTimeout);
  }
  const bool nc_per_copy = nc && nc->mode == NcMode::Sensitizable;

  SolverSession s(cfg.solver);
  CopyVars k1(locked.wire_count(), 0);
  for (WireId w : locked.inputs()) k1[w] = s.new_var();
  CopyVars k2 = k1;
  for (WireId w : locked.key_inputs()) {
    k1[w] = s.new_var();
    k2[w] = s.new_var();
  }
  const CopyVars a = encode_copy(s, locked, k1);
  const CopyVars b = encode_copy(s, locked, k2);
  if (nc) {
    add_nc_clauses(s, *nc, a);
    add_nc_clauses(s, *nc, b);
  }
  std::vector<int> diffs;
  for (auto [lo, oo] : io.outputs) diffs.push_back(encode_xor(s, a[lo], b[lo]));
  const int differ = encode_or(s, diffs);
  const int act = s.new_var();  // the miter is only active under this assumption
  s.add({-act, differ});

  // Oracle input i is locked input at position oracle_pos[i]; outputs likewise.
  std::vector<std::size_t> oracle_pos;
  for (WireId w : io.locked_inputs) {
    auto it = std::find(locked.inputs().begin(), locked.inputs().end(), w);
    oracle_pos.push_back(static_cast<std::size_t>(it - locked.inputs().begin()));
  }
  std::vector<std::size_t> out_pos;
  for (auto [lo, oo] : io.outputs) {
    auto it = std::find(oracle.outputs().begin(), oracle.outputs().end(), oo);
    out_pos.push_back(static_cast<std::size_t>(it - oracle.outputs().begin()));
  }

  auto solve = [&](int assumption) {
    s.set_deadline(std::min(after(cfg.solve_timeout_seconds), deadline));
    auto t = Clock::now();
    int lits[] = {assumption};
    auto v = s.solve(lits);
    r.solver_seconds += seconds_since(t);
    return v;
  };

  std::set<Bits> seen;
  for (;;) {
    if (r.iterations >= cfg.iteration_cap)
      return finish(AttackStatus::IterationCapReached, "iteration cap");
    if (Clock::now() >= deadline) return finish(AttackStatus::IterationCapReached, "total timeout");
    auto v = solve(act);
    if (v.status == Verdict::Timeout)
      return finish(AttackStatus::IterationCapReached, "solver timeout");
    if (!v.sat()) break;

    Bits x;
    for (WireId w : locked.inputs()) x.push_back(v.value(k1[w]) ? 1 : 0);
    if (!seen.insert(x).second) return finish(AttackStatus::IterationCapReached, "repeated DIP");
    ++r.iterations;
    r.dips.push_back(x);
    r.dip_solver_time.push_back(r.solver_seconds);

    Bits ox(oracle_pos.size());
    for (std::size_t i = 0; i < ox.size(); ++i) ox[i] = x[oracle_pos[i]];
    const Bits y = oracle_query(oracle, ox);

    for (const CopyVars* keys : {&k1, &k2}) {
      CopyVars preset = *keys;
      for (std::size_t i = 0; i < locked.inputs().size(); ++i) {
        int fixed = s.new_var();
        s.add({x[i] ? fixed : -fixed});
        preset[locked.inputs()[i]] = fixed;
      }
      CopyVars c = encode_copy(s, locked, preset);
      for (std::size_t j = 0; j < io.outputs.size(); ++j) {
        int o = c[io.outputs[j].first];
        s.add({y[out_pos[j]] ? o : -o});
      }
      if (nc_per_copy) add_nc_clauses(s, *nc, c);
    }
  }

  for (WireId w : locked.key_inputs()) {
    s.add({-k1[w], k2[w]});
    s.add({k1[w], -k2[w]});
  }
  auto v = solve(-act);
  if (v.status == Verdict::Timeout)
    return finish(AttackStatus::IterationCapReached, "solver timeout in key extraction");
  if (!v.sat()) return finish(AttackStatus::Unsat, "no key satisfies the constraints");

  KeyAssignment key;
  for (WireId w : locked.key_inputs()) key[locked.wire_name(w)] = v.value(k1[w]);
  r.key = key;
  EquivalenceOptions eo;
  eo.solver = cfg.solver;
  return finish(check_equivalence(locked, key, oracle, eo) ? AttackStatus::Success
                                                           : AttackStatus::WrongKey);
}

AttackResult run_cycsat(const Netlist& locked, const Netlist& oracle, const AttackConfig& cfg) {
  if (!cfg.nc_mode) throw Error(ErrorCode::InvalidRecipe, "CycSAT needs an NC mode");
  return run_sat_attack(locked, oracle, cfg);
}

nlohmann::json to_json(const AttackResult& r) {
  nlohmann::json j;
  j["status"] = std::string(to_string(r.status));
  if (r.key) {
    nlohmann::json k = nlohmann::json::object();
    for (const auto& [name, bit] : *r.key) k[name] = bit ? 1 : 0;
    j["key"] = k;
  } else {
    j["key"] = nullptr;
  }
  j["iterations"] = r.iterations;
  nlohmann::json dips = nlohmann::json::array();
  for (const auto& d : r.dips) dips.push_back(bit_string(d));
  j["dips"] = dips;
  j["preprocess_seconds"] = r.preprocess_seconds;
  j["cycles_visited"] = r.cycles_visited;
  j["nc_clause_count"] = r.nc_clause_count;
  j["solver_seconds"] = r.solver_seconds;
  j["total_seconds"] = r.total_seconds;
  j["note"] = r.note;
  return j;
}

void write_dip_csv(std::ostream& out, const AttackResult& r) {
  out << "iteration,dip,solver_seconds\n";
  for (std::size_t i = 0; i < r.dips.size(); ++i)
    out << i + 1 << ',' << bit_string(r.dips[i]) << ',' << r.dip_solver_time[i] << '\n';
}

}  // namespace cyclo
