#include "cyclo/cycles.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "cyclo/error.hpp"

namespace cyclo {

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(EnumStatus s) {
  switch (s) {
    case EnumStatus::Complete: return "Complete";
    case EnumStatus::LimitHit: return "LimitHit";
    case EnumStatus::TimedOut: return "TimedOut";
  }
  return "?";
}

std::string_view to_string(CycleBehavior b) {
  switch (b) {
    case CycleBehavior::Broken: return "Broken";
    case CycleBehavior::Stateful: return "Stateful";
    case CycleBehavior::Oscillating: return "Oscillating";
  }
  return "?";
}

std::string_view to_string(NcMode m) {
  switch (m) {
    case NcMode::StructuralPerFeedbackSingleCycle: return "StructuralPerFeedbackSingleCycle";
    case NcMode::StructuralPerFeedback: return "StructuralPerFeedback";
    case NcMode::StructuralAllCycles: return "StructuralAllCycles";
    case NcMode::Sensitizable: return "Sensitizable";
  }
  return "?";
}

// ---------------------------------------------------------------- feedback

FeedbackSet find_feedback_set(const Netlist& n) {
  const auto succ = gate_successors(n);
  FeedbackSet fs;
  std::vector<std::uint8_t> color(n.gate_count(), 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::pair<int, std::size_t>> stack;

  auto dfs = [&](int root) {
    if (color[root]) return;
    color[root] = 1;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos < succ[v].size()) {
        int w = succ[v][pos++];
        if (color[w] == 1) {
          fs.edges.push_back({v, w});
        } else if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
        continue;
      }
      color[v] = 2;
      stack.pop_back();
    }
  };

  for (WireId w : n.inputs())
    for (int g : n.fanout(w)) dfs(g);
  for (WireId w : n.key_inputs())
    for (int g : n.fanout(w)) dfs(g);
  for (std::size_t g = 0; g < n.gate_count(); ++g) dfs(static_cast<int>(g));
  return fs;
}

// ---------------------------------------------------------------- Johnson

CycleSet enumerate_cycles(const Adjacency& succ, const EnumOptions& opts, const CycleVisitor& visit) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(opts.timeout_seconds));
  const int nv = static_cast<int>(succ.size());
  CycleSet out;

  std::vector<int> member(nv, -1);  // component tag of the current search
  std::vector<char> blocked(nv, 0);
  std::vector<std::vector<int>> bset(nv);
  std::vector<int> path;
  struct Frame {
    int v;
    std::size_t next;
    bool closed;
  };
  std::vector<Frame> frames;
  std::uint64_t steps = 0;
  bool stop = false;

  auto unblock = [&](int u0) {
    std::vector<int> todo{u0};
    while (!todo.empty()) {
      int u = todo.back();
      todo.pop_back();
      if (!blocked[u]) continue;
      blocked[u] = 0;
      for (int w : bset[u]) todo.push_back(w);
      bset[u].clear();
    }
  };

  auto report = [&]() {
    ++out.count;
    if (opts.store) out.cycles.emplace_back(path.begin(), path.end());
    if (visit && !visit(path)) stop = true;
    if (out.count >= opts.limit) {
      out.status = EnumStatus::LimitHit;
      stop = true;
    }
  };

  // Components still to be searched; each is searched from its lowest vertex,
  // which is then removed and the remainder re-split into components.
  std::vector<std::vector<int>> work;
  auto push_components = [&](const std::vector<int>& verts) {
    std::vector<int> local(nv, -1);
    for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
    Adjacency sub(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (int w : succ[verts[i]])
        if (local[w] >= 0) sub[i].push_back(local[w]);
    int count = 0;
    auto comp = strongly_connected_components(sub, &count);
    std::vector<std::vector<int>> groups(count);
    for (std::size_t i = 0; i < verts.size(); ++i) groups[comp[i]].push_back(verts[i]);
    // Reverse so that lower-numbered components come off the stack first.
    std::vector<std::vector<int>> keep;
    for (auto& g : groups) {
      bool self_loop = g.size() == 1 &&
                       std::find(succ[g[0]].begin(), succ[g[0]].end(), g[0]) != succ[g[0]].end();
      if (g.size() > 1 || self_loop) {
        std::sort(g.begin(), g.end());
        keep.push_back(std::move(g));
      }
    }
    std::sort(keep.begin(), keep.end(), [](const auto& a, const auto& b) { return a[0] > b[0]; });
    for (auto& g : keep) work.push_back(std::move(g));
  };

  std::vector<int> all(nv);
  for (int v = 0; v < nv; ++v) all[v] = v;
  push_components(all);

  int tag = 0;
  while (!work.empty() && !stop) {
    std::vector<int> comp = std::move(work.back());
    work.pop_back();
    ++tag;
    for (int v : comp) {
      member[v] = tag;
      blocked[v] = 0;
      bset[v].clear();
    }
    const int s = comp[0];
    path.assign(1, s);
    blocked[s] = 1;
    frames.assign(1, {s, 0, false});
    while (!frames.empty() && !stop) {
      if ((++steps & 1023u) == 0 && Clock::now() > deadline) {
        out.status = EnumStatus::TimedOut;
        stop = true;
        break;
      }
      Frame& f = frames.back();
      const auto& nb = succ[f.v];
      if (f.next < nb.size()) {
        int w = nb[f.next++];
        if (member[w] != tag) continue;
        if (w == s) {
          report();
          f.closed = true;
        } else if (!blocked[w]) {
          path.push_back(w);
          blocked[w] = 1;
          frames.push_back({w, 0, false});
        }
        continue;
      }
      if (f.closed) {
        unblock(f.v);
      } else {
        for (int w : nb)
          if (member[w] == tag && std::find(bset[w].begin(), bset[w].end(), f.v) == bset[w].end())
            bset[w].push_back(f.v);
      }
      bool closed = f.closed;
      frames.pop_back();
      path.pop_back();
      if (!frames.empty() && closed) frames.back().closed = true;
    }
    if (stop) break;
    comp.erase(comp.begin());
    for (int v : comp) member[v] = -1;
    member[s] = -1;
    if (!comp.empty()) push_components(comp);
  }
  out.elapsed = seconds_since(t0);
  return out;
}

CycleSet enumerate_cycles(const Netlist& n, const EnumOptions& opts, const CycleVisitor& visit) {
  auto cs = enumerate_cycles(gate_successors(n), opts, visit);
  for (auto& c : cs.cycles)
    for (auto& v : c) v = n.gates()[v].output;
  return cs;
}

// ---------------------------------------------------------------- classify

namespace {

bool binary_run_settles(const Netlist& n, const std::vector<Ternary>& fixed, bool start_value) {
  // Synchronous binary iteration with inputs held; X wires from the ternary
  // fixpoint start at start_value, everything else keeps its binary value.
  std::vector<std::uint8_t> state(n.wire_count());
  for (std::size_t w = 0; w < n.wire_count(); ++w)
    state[w] = fixed[w] == Ternary::X ? start_value : fixed[w] == Ternary::One;
  std::unordered_map<std::size_t, std::vector<std::vector<std::uint8_t>>> seen;
  const std::size_t cap = 4 * n.gate_count() + 16;
  std::vector<std::uint8_t> next(state.size());
  std::vector<Ternary> in;
  for (std::size_t step = 0; step < cap; ++step) {
    next = state;
    for (const Gate& g : n.gates()) {
      in.clear();
      for (WireId w : g.inputs) in.push_back(ternary(state[w] != 0));
      next[g.output] = eval_gate(g.kind, in) == Ternary::One;
    }
    if (next == state) return true;
    std::size_t h = std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(next.data()), next.size()));
    auto& bucket = seen[h];
    if (std::find(bucket.begin(), bucket.end(), next) != bucket.end()) return false;
    bucket.push_back(next);
    state.swap(next);
  }
  return false;
}

}  // namespace

CycleBehavior classify_cycle(const Netlist& n, const KeyAssignment& key, const Assignment& x,
                             const std::vector<WireId>& cycle_wires) {
  auto xb = bits_for(n, n.inputs(), x);
  auto kb = bits_for(n, n.key_inputs(), key);
  auto values = simulate(n, xb, kb);

  std::vector<WireId> watch = cycle_wires;
  if (watch.empty()) {
    auto on_cycle = cyclic_vertices(gate_successors(n));
    for (std::size_t g = 0; g < n.gate_count(); ++g)
      if (on_cycle[g]) watch.push_back(n.gates()[g].output);
  }
  bool all_binary = std::all_of(watch.begin(), watch.end(),
                                [&](WireId w) { return is_binary(values[w]); });
  if (all_binary) return CycleBehavior::Broken;
  if (binary_run_settles(n, values, false) || binary_run_settles(n, values, true))
    return CycleBehavior::Stateful;
  return CycleBehavior::Oscillating;
}

// ---------------------------------------------------------------- NC

std::vector<WireLit> break_condition(const Netlist& n, const Gate& gate, WireId through,
                                     BreakMode mode) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < gate.inputs.size(); ++i)
    if (gate.inputs[i] == through) pos.push_back(i);
  if (pos.empty())
    throw Error(ErrorCode::NotAnInput,
                "'" + n.wire_name(through) + "' does not feed '" + n.wire_name(gate.output) + "'");

  if (gate.kind == GateKind::Mux) {
    bool via_select = pos.front() == 0;
    if (via_select || pos.size() != 1) return {};
    if (mode == BreakMode::Structural && !n.is_key_input(gate.inputs[0])) return {};
    // Entering via in0 is blocked when select = 1, via in1 when select = 0.
    return {WireLit{gate.inputs[0], pos.front() == 1}};
  }
  if (mode == BreakMode::Structural) return {};

  bool block_value;
  switch (gate.kind) {
    case GateKind::And:
    case GateKind::Nand: block_value = false; break;
    case GateKind::Or:
    case GateKind::Nor: block_value = true; break;
    default: return {};
  }
  std::vector<WireLit> lits;
  for (WireId side : gate.inputs) {
    if (side == through) continue;
    WireLit l{side, block_value};
    if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
  }
  return lits;
}

bool NcClauses::has_empty_clause() const {
  return std::any_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.empty(); });
}

bool NcClauses::satisfied_by(const std::function<bool(WireId)>& value) const {
  for (const auto& c : clauses) {
    bool sat = std::any_of(c.begin(), c.end(), [&](const WireLit& l) { return value(l.wire) == l.value; });
    if (!sat) return false;
  }
  return true;
}

namespace {

class NcBuilder {
 public:
  NcBuilder(const Netlist& n, BreakMode mode) : n_(n), mode_(mode) {}

  // Break literals of edge from -> to (gate indices).
  const std::vector<WireLit>& edge(int from, int to) {
    auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
               static_cast<std::uint32_t>(to);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto lits = break_condition(n_, n_.gates()[to], n_.gates()[from].output, mode_);
    return cache_.emplace(key, std::move(lits)).first->second;
  }

  // Clause for a closed walk v0 -> v1 -> ... -> vk -> v0.
  void add_cycle(std::span<const int> cyc) {
    std::vector<WireLit> clause;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const auto& lits = edge(cyc[i], cyc[(i + 1) % cyc.size()]);
      clause.insert(clause.end(), lits.begin(), lits.end());
    }
    std::sort(clause.begin(), clause.end());
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 0; i + 1 < clause.size(); ++i)
      if (clause[i].wire == clause[i + 1].wire) return;  // tautology
    clauses_.insert(std::move(clause));
  }

  std::vector<std::vector<WireLit>> take() { return {clauses_.begin(), clauses_.end()}; }

 private:
  const Netlist& n_;
  BreakMode mode_;
  std::unordered_map<std::uint64_t, std::vector<WireLit>> cache_;
  std::set<std::vector<WireLit>> clauses_;
};

}  // namespace

NcClauses compute_nc(const Netlist& n, const FeedbackSet& fs, const CycleSet* cs, NcMode mode,
                     const NcOptions& opts) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(opts.timeout_seconds));
  NcClauses out;
  out.mode = mode;
  NcBuilder builder(n, mode == NcMode::Sensitizable ? BreakMode::Sensitizable : BreakMode::Structural);

  if (mode == NcMode::StructuralAllCycles) {
    if (!cs || cs->status != EnumStatus::Complete || cs->cycles.size() != cs->count)
      throw Error(ErrorCode::IncompleteCycleSet,
                  "all-cycles NC needs a complete, stored cycle enumeration");
    std::vector<int> gates;
    for (const auto& cyc : cs->cycles) {
      gates.clear();
      for (WireId w : cyc) gates.push_back(n.driver(w));
      builder.add_cycle(gates);
      ++out.cycles_visited;
      if ((out.cycles_visited & 255u) == 0 && Clock::now() > deadline) {
        out.status = EnumStatus::TimedOut;
        break;
      }
    }
    out.clauses = builder.take();
    out.build_time = seconds_since(t0);
    return out;
  }

  const auto succ = gate_successors(n);
  int ncomp = 0;
  const auto comp = strongly_connected_components(succ, &ncomp);

  for (const auto& fb : fs.edges) {
    // A closing path runs head -> ... -> tail, then the feedback edge tail -> head.
    const int head = fb.to, tail = fb.from;
    if (head == tail) {
      int self[1] = {head};
      builder.add_cycle(self);
      ++out.cycles_visited;
      continue;
    }
    const int c = comp[head];

    if (mode == NcMode::StructuralPerFeedbackSingleCycle) {
      // Shortest closing path by BFS, ties broken by gate index.
      std::vector<int> parent(n.gate_count(), -2);
      std::deque<int> q{head};
      parent[head] = -1;
      while (!q.empty() && parent[tail] == -2) {
        int v = q.front();
        q.pop_front();
        for (int w : succ[v])
          if (comp[w] == c && parent[w] == -2) {
            parent[w] = v;
            q.push_back(w);
          }
      }
      std::vector<int> path;
      for (int v = tail; v != -1; v = parent[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      builder.add_cycle(path);
      ++out.cycles_visited;
      continue;
    }

    // Every simple head -> tail path inside the component.
    std::vector<char> on_path(n.gate_count(), 0);
    std::vector<int> path{head};
    std::vector<std::size_t> next{0};
    on_path[head] = 1;
    std::uint64_t steps = 0;
    while (!path.empty()) {
      if ((++steps & 1023u) == 0 && Clock::now() > deadline) {
        out.status = EnumStatus::TimedOut;
        break;
      }
      int v = path.back();
      if (v == tail) {
        builder.add_cycle(path);
        if (++out.cycles_visited >= opts.path_limit) {
          out.status = EnumStatus::LimitHit;
          break;
        }
        on_path[v] = 0;
        path.pop_back();
        next.pop_back();
        continue;
      }
      auto& i = next.back();
      if (i < succ[v].size()) {
        int w = succ[v][i++];
        if (comp[w] == c && !on_path[w]) {
          on_path[w] = 1;
          path.push_back(w);
          next.push_back(0);
        }
        continue;
      }
      on_path[v] = 0;
      path.pop_back();
      next.pop_back();
    }
    if (out.status != EnumStatus::Complete) break;
  }
  out.clauses = builder.take();
  out.build_time = seconds_since(t0);
  return out;
}

void add_nc_clauses(ClauseSink& sink, const NcClauses& nc, const CopyVars& vars) {
  std::vector<int> lits;
  for (const auto& c : nc.clauses) {
    if (c.empty()) {
      int z = sink.new_var();
      sink.add({z});
      sink.add({-z});
      continue;
    }
    lits.clear();
    for (const auto& l : c) lits.push_back(l.value ? vars.at(l.wire) : -vars.at(l.wire));
    sink.add_clause(lits);
  }
}

}  // namespace cyclo
