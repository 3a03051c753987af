#include "cyclo/locker.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "cyclo/cnf.hpp"
#include "cyclo/error.hpp"
#include "cyclo/graph.hpp"
#include "cyclo/transform.hpp"

namespace cyclo {

std::string_view to_string(LockScheme s) {
  switch (s) {
    case LockScheme::SuperCycle: return "sc";
    case LockScheme::Lfn: return "lfn";
    case LockScheme::SrLatch: return "srlatch";
    case LockScheme::Template: return "template";
  }
  return "?";
}

LockScheme parse_lock_scheme(std::string_view s) {
  for (auto v : {LockScheme::SuperCycle, LockScheme::Lfn, LockScheme::SrLatch, LockScheme::Template})
    if (to_string(v) == s) return v;
  throw Error(ErrorCode::InvalidRecipe, "unknown scheme '" + std::string(s) + "'");
}

void LockRecipe::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidRecipe, m); };
  if (key_prefix.empty()) fail("empty key prefix");
  switch (scheme) {
    case LockScheme::SuperCycle:
      if (micro_cycles < 1) fail("a Super Cycle needs at least one MC");
      if (mc_size < 3) fail("MC size must be at least 3");
      break;
    case LockScheme::Lfn:
      if (lfn_paths < 2) fail("LFN needs at least two paths");
      if (mc_size < 2) fail("LFN path length must be at least 2");
      break;
    case LockScheme::SrLatch:
      if (latches < 0 || micro_cycles < 0) fail("negative count");
      if (micro_cycles > 0 && mc_size < 3) fail("MC size must be at least 3");
      break;
    case LockScheme::Template:
      break;
  }
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
void shuffle_with(std::vector<T>& v, Rng& rng) {
  // Fisher-Yates with rng() % n so results do not depend on the library's
  // distribution implementation.
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

// Edits on top of a base netlist. Base gate indices stay valid in the builder;
// new gates are appended.
class Editor {
 public:
  Editor(const Netlist& base, std::string key_prefix)
      : b_(NetlistBuilder::from(base)), prefix_(std::move(key_prefix)) {}

  NetlistBuilder& builder() { return b_; }

  std::string new_key() {
    std::string name;
    do name = prefix_ + std::to_string(next_key_++);
    while (b_.has_name(name));
    b_.add_key_input(name);
    key_[name] = false;
    return name;
  }

  std::string add_gate(std::string_view stem, GateKind kind, std::vector<std::string> ins) {
    return add_named(b_.fresh_name(stem), kind, std::move(ins));
  }
  std::string add_named(std::string out, GateKind kind, std::vector<std::string> ins) {
    b_.add_gate(out, kind, std::move(ins));
    ++added_;
    return out;
  }

  /// Key MUX selecting `in0` under the correct key (0).
  std::string key_mux(const std::string& in0, const std::string& in1) {
    std::string key = new_key();
    return add_gate("cyc_m", GateKind::Mux, {key, in0, in1});
  }

  /// Puts a key MUX in front of input `slot` of gate `gate`.
  std::string mux_slot(std::size_t gate, std::size_t slot, const std::string& alt) {
    std::string out = key_mux(b_.gate(gate).inputs[slot], alt);
    b_.gate(gate).inputs[slot] = out;
    return out;
  }

  void log(std::string line) { log_.push_back(std::move(line)); }

  LockResult finish(Netlist locked) {
    LockResult r;
    r.locked = std::move(locked);
    r.correct_key = key_;
    r.added_keys = key_.size();
    r.added_gates = added_;
    r.placement_log = std::move(log_);
    return r;
  }
  LockResult finish() { return finish(b_.build()); }

 private:
  NetlistBuilder b_;
  std::string prefix_;
  std::size_t next_key_ = 0;
  std::size_t added_ = 0;
  KeyAssignment key_;
  std::vector<std::string> log_;
};

std::string gate_name(const Netlist& n, int g) { return n.wire_name(n.gates()[g].output); }

std::string join_path(const Netlist& n, std::span<const int> path) {
  std::string s;
  for (int g : path) {
    if (!s.empty()) s += ' ';
    s += gate_name(n, g);
  }
  return s;
}

// Random simple paths through the acyclic, key-free part of a netlist.
class PathFinder {
 public:
  explicit PathFinder(const Netlist& n) : n_(n), succ_(gate_successors(n)) {
    auto cyc = cyclic_vertices(succ_);
    usable_.assign(n.gate_count(), 1);
    for (std::size_t g = 0; g < n.gate_count(); ++g) {
      if (cyc[g]) usable_[g] = 0;
      for (WireId w : n.gates()[g].inputs)
        if (n.is_key_input(w)) usable_[g] = 0;
    }
    // Topological order of the usable subgraph (acyclic by construction).
    std::vector<int> indeg(n.gate_count(), 0);
    for (std::size_t g = 0; g < n.gate_count(); ++g)
      if (usable_[g])
        for (int s : succ_[g])
          if (usable_[s] && s != static_cast<int>(g)) ++indeg[s];
    for (std::size_t g = 0; g < n.gate_count(); ++g)
      if (usable_[g] && indeg[g] == 0) order_.push_back(static_cast<int>(g));
    for (std::size_t i = 0; i < order_.size(); ++i)
      for (int s : succ_[order_[i]])
        if (usable_[s] && --indeg[s] == 0) order_.push_back(s);
  }

  const std::vector<char>& usable() const { return usable_; }
  const std::vector<int>& order() const { return order_; }

  /// A path of `len` gates inside `allowed` (which is narrowed to usable gates),
  /// or empty when none exists.
  std::vector<int> random_path(const std::vector<char>& allowed, int len, Rng& rng) const {
    std::vector<int> longest(n_.gate_count(), 0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      int g = *it;
      if (!allowed[g]) continue;
      int best = 0;
      for (int s : succ_[g])
        if (allowed[s] && usable_[s]) best = std::max(best, longest[s]);
      longest[g] = 1 + best;
    }
    std::vector<int> starts;
    for (int g : order_)
      if (allowed[g] && longest[g] >= len) starts.push_back(g);
    if (starts.empty()) return {};
    std::vector<int> path{starts[pick(rng, starts.size())]};
    while (static_cast<int>(path.size()) < len) {
      int need = len - static_cast<int>(path.size());
      std::vector<int> next;
      for (int s : succ_[path.back()])
        if (allowed[s] && usable_[s] && longest[s] >= need) next.push_back(s);
      path.push_back(next[pick(rng, next.size())]);
    }
    return path;
  }

  /// `count` disjoint paths inside `pool`, or empty on failure.
  std::vector<std::vector<int>> disjoint_paths(std::vector<char> pool, int count, int len,
                                               Rng& rng) const {
    std::vector<std::vector<int>> paths;
    for (int i = 0; i < count; ++i) {
      auto p = random_path(pool, len, rng);
      if (p.empty()) return {};
      for (int g : p) pool[g] = 0;
      paths.push_back(std::move(p));
    }
    return paths;
  }

 private:
  const Netlist& n_;
  Adjacency succ_;
  std::vector<char> usable_;
  std::vector<int> order_;
};

// Outputs ordered by fanin cone size, largest first (ties by declaration).
std::vector<std::pair<WireId, std::vector<char>>> cones_by_size(const Netlist& n,
                                                                 const std::vector<char>& usable) {
  std::vector<std::pair<WireId, std::vector<char>>> cones;
  for (WireId o : n.outputs()) {
    auto c = fanin_cone(n, o);
    for (std::size_t g = 0; g < c.size(); ++g) c[g] = c[g] && usable[g];
    cones.emplace_back(o, std::move(c));
  }
  auto size = [](const std::vector<char>& m) { return std::count(m.begin(), m.end(), 1); };
  std::stable_sort(cones.begin(), cones.end(),
                   [&](const auto& a, const auto& b) { return size(a.second) > size(b.second); });
  return cones;
}

void check_region(const Netlist& n, std::span<const int> region, int mc_size) {
  if (static_cast<int>(region.size()) < mc_size || region.size() < 2)
    throw Error(ErrorCode::RegionTooShort, "region has " + std::to_string(region.size()) +
                                               " gates, need " + std::to_string(mc_size));
  std::set<int> seen;
  for (std::size_t t = 0; t < region.size(); ++t) {
    int g = region[t];
    if (g < 0 || static_cast<std::size_t>(g) >= n.gate_count() || !seen.insert(g).second)
      throw Error(ErrorCode::RegionNotAPath, "region gate list is not a simple path");
    if (t > 0) {
      const auto& ins = n.gates()[g].inputs;
      if (std::find(ins.begin(), ins.end(), n.gates()[region[t - 1]].output) == ins.end())
        throw Error(ErrorCode::RegionNotAPath,
                    gate_name(n, g) + " does not read " + gate_name(n, region[t - 1]));
    }
  }
}

std::size_t slot_of(const Netlist& n, int gate, WireId w) {
  const auto& ins = n.gates()[gate].inputs;
  return static_cast<std::size_t>(std::find(ins.begin(), ins.end(), w) - ins.begin());
}

struct McSlots {
  std::vector<int> gates;
  std::set<std::pair<int, std::size_t>> used_slots;
  std::set<int> used_sources;
};

// Head MUX plus interior MUX, both fed from the tail. Returns the slots used.
void close_micro_cycle(Editor& ed, const Netlist& n, McSlots& mc, Rng& rng) {
  const auto& region = mc.gates;
  std::string tail = gate_name(n, region.back());
  std::size_t head_slot = pick(rng, n.gates()[region[0]].inputs.size());
  int t = 1 + static_cast<int>(pick(rng, region.size() - 1));
  std::size_t inner_slot = slot_of(n, region[t], n.gates()[region[t - 1]].output);
  ed.mux_slot(region[0], head_slot, tail);
  ed.mux_slot(region[t], inner_slot, tail);
  mc.used_slots.insert({region[0], head_slot});
  mc.used_slots.insert({region[t], inner_slot});
  mc.used_sources.insert(region.back());
  ed.log("mc: " + join_path(n, region) + "; entries at " + gate_name(n, region[0]) + " and " +
         gate_name(n, region[t]));
}

}  // namespace

LockResult insert_micro_cycle(const Netlist& n, std::span<const int> region, Rng& rng, int mc_size,
                              const std::string& key_prefix) {
  check_region(n, region, mc_size);
  Editor ed(n, key_prefix);
  McSlots mc{{region.begin(), region.end()}, {}, {}};
  close_micro_cycle(ed, n, mc, rng);
  return ed.finish();
}

LockResult build_super_cycle(const Netlist& n, const LockRecipe& recipe) {
  LockRecipe r = recipe;
  r.scheme = LockScheme::SuperCycle;
  r.validate();
  Rng rng(r.seed);
  PathFinder finder(n);
  const int count = r.micro_cycles;
  Editor ed(n, r.key_prefix);

  // MCs are built one after another and only ever touch earlier MCs, so the
  // Super Cycle for N is contained in the one for N + 1 under the same seed.
  auto cones = cones_by_size(n, finder.usable());
  std::vector<char> pool(n.gate_count(), 0), taken(n.gate_count(), 0);
  std::size_t cones_used = 0;
  std::vector<McSlots> mcs;

  // Links enter an MC in its first half and leave from its second half, so a
  // path through the MC can run along most of it.
  auto free_slot = [&](McSlots& mc) {
    std::vector<std::pair<int, std::size_t>> slots, all;
    for (std::size_t t = 0; t < (mc.gates.size() + 1) / 2; ++t) {
      int g = mc.gates[t];
      for (std::size_t s = 0; s < n.gates()[g].inputs.size(); ++s) {
        all.emplace_back(g, s);
        if (!mc.used_slots.count({g, s})) slots.emplace_back(g, s);
      }
    }
    auto& from = slots.empty() ? all : slots;
    auto chosen = from[pick(rng, from.size())];
    mc.used_slots.insert(chosen);
    return chosen;
  };
  auto source = [&](McSlots& mc) {
    std::vector<int> fresh, all;
    for (std::size_t t = mc.gates.size() / 2; t < mc.gates.size(); ++t) {
      all.push_back(mc.gates[t]);
      if (!mc.used_sources.count(mc.gates[t])) fresh.push_back(mc.gates[t]);
    }
    auto& from = fresh.empty() ? all : fresh;
    int g = from[pick(rng, from.size())];
    mc.used_sources.insert(g);
    return g;
  };
  auto link = [&](std::size_t to, std::size_t from, const char* what) {
    auto [g, s] = free_slot(mcs[to]);
    int src = source(mcs[from]);
    ed.mux_slot(static_cast<std::size_t>(g), s, gate_name(n, src));
    ed.log(std::string(what) + ": " + gate_name(n, src) + " -> " + gate_name(n, g));
  };

  for (int i = 0; i < count; ++i) {
    // Place the MC, widening the pool by the next largest output cone when needed.
    std::vector<int> region;
    while (true) {
      std::vector<char> allowed(n.gate_count());
      for (std::size_t g = 0; g < allowed.size(); ++g) allowed[g] = pool[g] && !taken[g];
      if (cones_used > 0) region = finder.random_path(allowed, r.mc_size, rng);
      if (!region.empty() || cones_used == cones.size()) break;
      for (std::size_t g = 0; g < pool.size(); ++g) pool[g] = pool[g] || cones[cones_used].second[g];
      ed.log("pool: add fanin cone of " + n.wire_name(cones[cones_used].first));
      ++cones_used;
    }
    if (region.empty())
      throw Error(ErrorCode::InsufficientGates,
                  "placed " + std::to_string(i) + " of " + std::to_string(count) +
                      " disjoint paths of " + std::to_string(r.mc_size) + " gates");
    for (int g : region) taken[g] = 1;
    mcs.push_back({region, {}, {}});
    close_micro_cycle(ed, n, mcs.back(), rng);

    // Gates feeding this MC that no MC uses.
    std::vector<int> upstream;
    {
      std::vector<char> seen(n.gate_count(), 0);
      for (int g : region) {
        auto cone = fanin_cone(n, n.gates()[g].output);
        for (std::size_t h = 0; h < cone.size(); ++h)
          if (cone[h] && !seen[h] && !taken[h] && finder.usable()[h]) {
            seen[h] = 1;
            upstream.push_back(static_cast<int>(h));
          }
      }
      std::sort(upstream.begin(), upstream.end());
    }
    // A MUX in front of an upstream gate reading the MC closes cycles through
    // the original logic between the two.
    auto upstream_link = [&](std::size_t me) {
      if (upstream.empty()) {
        link(me, me == 0 ? 0 : pick(rng, me), "extra");
        return;
      }
      int u = upstream[pick(rng, upstream.size())];
      int src = source(mcs[me]);
      ed.mux_slot(static_cast<std::size_t>(u), pick(rng, n.gates()[u].inputs.size()),
                  gate_name(n, src));
      ed.log("extra: " + gate_name(n, src) + " -> " + gate_name(n, u));
    };

    std::size_t me = static_cast<std::size_t>(i);
    if (i == 0) {
      // Two-way link with the MC's own fanin, a second fanin link and a chord.
      if (upstream.empty()) {
        link(0, 0, "link");
      } else {
        int u = upstream[pick(rng, upstream.size())];
        auto [g, s] = free_slot(mcs[0]);
        ed.mux_slot(static_cast<std::size_t>(g), s, gate_name(n, u));
        ed.log("link: " + gate_name(n, u) + " -> " + gate_name(n, g));
      }
      upstream_link(0);
      upstream_link(0);
      link(0, 0, "extra");
    } else {
      // Two-way link with the previous MC, one more into this MC's fanin.
      link(me, me - 1, "link");
      link(me - 1, me, "link");
      upstream_link(me);
    }
  }
  return ed.finish();
}

std::uint64_t lfn_cycle_lower_bound(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidRecipe, "m must be at least 1");
  std::uint64_t total = 0, binom = 1, fact = 1;  // C(m, l), (l - 1)!
  for (int l = 1; l <= m; ++l) {
    binom = binom * static_cast<std::uint64_t>(m - l + 1) / static_cast<std::uint64_t>(l);
    if (l > 1) fact *= static_cast<std::uint64_t>(l - 1);
    total += binom * fact;
  }
  return total;
}

LockResult build_lfn(const Netlist& n, const LockRecipe& recipe) {
  LockRecipe r = recipe;
  r.scheme = LockScheme::Lfn;
  r.validate();
  Rng rng(r.seed);
  PathFinder finder(n);
  const int m = r.lfn_paths;

  std::vector<std::vector<int>> paths;
  WireId cone_output = 0;
  for (const auto& [out, cone] : cones_by_size(n, finder.usable())) {
    Rng trial = rng;
    paths = finder.disjoint_paths(cone, m, r.mc_size, trial);
    if (!paths.empty()) {
      rng = trial;
      cone_output = out;
      break;
    }
  }
  if (paths.empty())
    throw Error(ErrorCode::InsufficientPaths, "no output cone holds " + std::to_string(m) +
                                                  " disjoint paths of " +
                                                  std::to_string(r.mc_size) + " gates");

  Editor ed(n, r.key_prefix);
  ed.log("cone of " + n.wire_name(cone_output));
  const int half = r.mc_size / 2;
  std::vector<std::string> line(m);
  std::vector<std::string> ends(m);
  std::vector<std::pair<int, std::size_t>> starts(m);
  for (int i = 0; i < m; ++i) {
    const auto& p = paths[i];
    ends[i] = gate_name(n, p.back());
    starts[i] = {p[half], slot_of(n, p[half], n.gates()[p[half - 1]].output)};
    ed.log("path " + std::to_string(i) + ": " + join_path(n, p) + "; broken before " +
           gate_name(n, p[half]));
  }
  // Entry stage: original midpoint signal or the next path's end.
  for (int i = 0; i < m; ++i)
    line[i] = ed.key_mux(gate_name(n, paths[i][half - 1]), ends[(i + 1) % m]);
  // Rotation stages: line i may take line i + 2^s.
  for (int shift = 1; shift < m; shift *= 2) {
    std::vector<std::string> next(m);
    for (int i = 0; i < m; ++i) next[i] = ed.key_mux(line[i], line[(i + shift) % m]);
    line = std::move(next);
  }
  for (int i = 0; i < m; ++i) ed.builder().gate(starts[i].first).inputs[starts[i].second] = line[i];
  return ed.finish();
}

namespace {

// Gray-code search for an unreachable pattern on an already encoded copy.
std::optional<Bits> search_pattern(SolverSession& session, const CopyVars& vars,
                                   const std::vector<WireId>& signals, Rng& rng) {
  const std::uint64_t total = 1ULL << signals.size();
  const std::uint64_t start = rng() % total;
  std::vector<int> assume(signals.size());
  for (std::uint64_t i = 0; i < total; ++i) {
    std::uint64_t p = start ^ (i ^ (i >> 1));
    for (std::size_t b = 0; b < signals.size(); ++b) {
      int v = vars[signals[b]];
      assume[b] = (p >> b) & 1 ? v : -v;
    }
    if (session.solve(assume).status == Verdict::Unsat) {
      Bits bits(signals.size());
      for (std::size_t b = 0; b < signals.size(); ++b) bits[b] = (p >> b) & 1;
      return bits;
    }
  }
  return std::nullopt;
}

void check_signal_count(std::size_t k) {
  if (k < 1 || k > 8)
    throw Error(ErrorCode::InvalidRecipe, "need between 1 and 8 signals, got " + std::to_string(k));
}

}  // namespace

Bits find_nonoccurring_combination(const Netlist& n, const std::vector<WireId>& signals, Rng& rng,
                                   const SolverConfig& solver) {
  check_signal_count(signals.size());
  SolverSession session(solver);
  CopyVars vars = encode_copy(session, n);
  if (auto p = search_pattern(session, vars, signals, rng)) return *p;
  throw Error(ErrorCode::NoNonOccurringCombination,
              "every pattern over the " + std::to_string(signals.size()) + " signals occurs");
}

LockResult cyclify_with_sr_latch(const Netlist& n, const LockRecipe& recipe,
                                 const SolverConfig& solver) {
  if (recipe.latches < 0) throw Error(ErrorCode::InvalidRecipe, "negative latch count");
  Rng rng(recipe.seed);
  Editor ed(n, recipe.key_prefix);
  if (recipe.latches == 0) return ed.finish();

  PathFinder finder(n);
  const auto& usable = finder.usable();
  std::vector<int> candidates;
  for (int g : finder.order())
    if (n.gates()[g].kind != GateKind::Buf) candidates.push_back(g);
  shuffle_with(candidates, rng);

  SolverSession session(solver);
  CopyVars vars = encode_copy(session, n);
  std::size_t next = 0;
  bool coverable = false;
  for (int latch = 0; latch < recipe.latches; ++latch) {
    int target = -1;
    std::vector<WireId> signals;
    Bits pattern;
    while (target < 0 && next < candidates.size()) {
      int y = candidates[next++];
      // Signals two levels up from the target.
      std::vector<WireId> frontier;
      for (WireId w : n.gates()[y].inputs) {
        int d = n.driver(w);
        if (d >= 0 && usable[d]) {
          for (WireId u : n.gates()[d].inputs)
            if (!n.is_key_input(u)) frontier.push_back(u);
        } else if (!n.is_key_input(w)) {
          frontier.push_back(w);
        }
      }
      std::sort(frontier.begin(), frontier.end());
      frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
      if (frontier.size() < 2) continue;
      coverable = true;
      shuffle_with(frontier, rng);
      if (frontier.size() > 4) frontier.resize(4);
      std::sort(frontier.begin(), frontier.end());
      if (auto p = search_pattern(session, vars, frontier, rng)) {
        target = y;
        signals = std::move(frontier);
        pattern = std::move(*p);
      }
    }
    if (target < 0) {
      if (!coverable)
        throw Error(ErrorCode::TargetSignalNotCoverable, "no gate has two or more nearby signals");
      throw Error(ErrorCode::NoNonOccurringCombination,
                  "found " + std::to_string(latch) + " of " + std::to_string(recipe.latches) +
                      " latch sites");
    }

    // Q = NAND(S, Qb), Qb = NAND(R, Q). R is 1 only on the unreachable
    // pattern, so Qb = 1 and Q = not S = the original signal everywhere else.
    auto& b = ed.builder();
    std::string y = gate_name(n, target);
    std::string pre = b.fresh_name(y + "_pre");
    b.rename_gate_output(static_cast<std::size_t>(target), pre);
    std::string s = ed.add_gate("srl_s", GateKind::Not, {pre});
    std::vector<std::string> lits;
    std::string shown;
    for (std::size_t i = 0; i < signals.size(); ++i) {
      const std::string& w = n.wire_name(signals[i]);
      lits.push_back(pattern[i] ? w : ed.add_gate("srl_n", GateKind::Not, {w}));
      shown += pattern[i] ? '1' : '0';
    }
    std::string r = ed.add_gate("srl_r", GateKind::And, lits);
    std::string qb = b.fresh_name("srl_qb");
    std::string to_qb = ed.key_mux(y, qb);
    std::string to_q = ed.key_mux(qb, y);
    ed.add_named(qb, GateKind::Nand, {r, to_qb});
    ed.add_named(y, GateKind::Nand, {s, to_q});
    ed.log("latch on " + y + ": pattern " + shown + " over " + [&] {
      std::string names;
      for (WireId w : signals) names += (names.empty() ? "" : ",") + n.wire_name(w);
      return names;
    }());
  }
  return ed.finish();
}

Netlist rivest_ring() {
  NetlistBuilder b("rivest3");
  const char* x[] = {"x1", "x2", "x3"};
  for (auto* in : x) b.add_input(in);
  for (int i = 0; i < 6; ++i) {
    std::string prev = "g" + std::to_string((i + 5) % 6 + 1);
    b.add_gate("g" + std::to_string(i + 1), i % 2 == 0 ? GateKind::And : GateKind::Or,
               {x[i % 3], prev});
    b.add_output("g" + std::to_string(i + 1));
  }
  return b.build();
}

namespace {

// Truth tables of the six ring taps, bit p for x1 = p&1, x2 = p>>1&1, x3 = p>>2&1.
std::array<std::uint8_t, 6> ring_tables() {
  Netlist ring = rivest_ring();
  std::array<std::uint8_t, 6> tt{};
  for (unsigned p = 0; p < 8; ++p) {
    Bits x{static_cast<std::uint8_t>(p & 1), static_cast<std::uint8_t>(p >> 1 & 1),
           static_cast<std::uint8_t>(p >> 2 & 1)};
    auto out = evaluate_outputs(ring, x, {});
    for (int t = 0; t < 6; ++t) {
      if (!is_binary(out[t])) throw std::logic_error("ring tap is not combinational");
      if (out[t] == Ternary::One) tt[t] |= static_cast<std::uint8_t>(1u << p);
    }
  }
  return tt;
}

using Cut = std::vector<WireId>;

// Value of `w` when the cut leaves take the bits of `p`.
bool cut_value(const Netlist& n, WireId w, const Cut& leaves, unsigned p,
               std::vector<signed char>& memo) {
  for (std::size_t i = 0; i < leaves.size(); ++i)
    if (leaves[i] == w) return (p >> i) & 1;
  if (memo[w] >= 0) return memo[w];
  const Gate& g = n.gates()[n.driver(w)];
  std::vector<Ternary> in;
  for (WireId u : g.inputs) in.push_back(ternary(cut_value(n, u, leaves, p, memo)));
  bool v = eval_gate(g.kind, in) == Ternary::One;
  memo[w] = v;
  return v;
}

}  // namespace

LockResult insert_rivest_template(const Netlist& n, Rng& rng) {
  static const auto taps = ring_tables();
  PathFinder finder(n);
  const auto& usable = finder.usable();

  // 3-feasible cuts, capped per wire.
  constexpr std::size_t kMaxCuts = 24;
  std::vector<std::vector<Cut>> cuts(n.wire_count());
  for (std::size_t w = 0; w < n.wire_count(); ++w) cuts[w] = {{static_cast<WireId>(w)}};
  for (int g : finder.order()) {
    std::set<Cut> acc{{}};
    for (WireId u : n.gates()[g].inputs) {
      std::set<Cut> merged;
      for (const auto& a : acc)
        for (const auto& c : cuts[u]) {
          Cut m;
          std::set_union(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(m));
          if (m.size() <= 3) merged.insert(std::move(m));
          if (merged.size() >= 4 * kMaxCuts) break;
        }
      acc = std::move(merged);
    }
    WireId out = n.gates()[g].output;
    for (const auto& c : acc) {
      if (cuts[out].size() >= kMaxCuts) break;
      cuts[out].push_back(c);
    }
  }

  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<int> order = finder.order();
  shuffle_with(order, rng);
  for (int g : order) {
    if (!usable[g]) continue;
    WireId out = n.gates()[g].output;
    for (const auto& cut : cuts[out]) {
      if (cut.size() != 3) continue;
      std::uint8_t tt = 0;
      for (unsigned p = 0; p < 8; ++p) {
        std::vector<signed char> memo(n.wire_count(), -1);
        if (cut_value(n, out, cut, p, memo)) tt |= static_cast<std::uint8_t>(1u << p);
      }
      for (int t = 0; t < 6; ++t)
        for (const auto& perm : perms) {
          // Ring input j reads leaf perm[j].
          bool match = true;
          for (unsigned p = 0; p < 8 && match; ++p) {
            unsigned q = 0;
            for (int j = 0; j < 3; ++j) q |= ((p >> perm[j]) & 1u) << j;
            match = ((tt >> p) & 1) == ((taps[t] >> q) & 1);
          }
          if (!match) continue;

          Editor ed(n, "keyinput");
          auto& b = ed.builder();
          std::string y = gate_name(n, g);
          b.rename_gate_output(static_cast<std::size_t>(g), b.fresh_name(y + "_old"));
          std::array<std::string, 6> names;
          for (int i = 0; i < 6; ++i) names[i] = i == t ? y : b.fresh_name("rv");
          for (int i = 0; i < 6; ++i)
            ed.add_named(names[i], i % 2 == 0 ? GateKind::And : GateKind::Or,
                       {n.wire_name(cut[perm[i % 3]]), names[(i + 5) % 6]});
          ed.log("ring tap " + std::to_string(t + 1) + " replaces " + y + " over " +
                 n.wire_name(cut[perm[0]]) + "," + n.wire_name(cut[perm[1]]) + "," +
                 n.wire_name(cut[perm[2]]));
          return ed.finish(prune_dead_logic(b.build()));
        }
    }
  }
  throw Error(ErrorCode::NoMatchFound, "no gate matches a ring function over a 3-input cut");
}

LockResult lock(const Netlist& n, const LockRecipe& recipe, const SolverConfig& solver) {
  recipe.validate();
  switch (recipe.scheme) {
    case LockScheme::SuperCycle: return build_super_cycle(n, recipe);
    case LockScheme::Lfn: return build_lfn(n, recipe);
    case LockScheme::Template: {
      Rng rng(recipe.seed);
      return insert_rivest_template(n, rng);
    }
    case LockScheme::SrLatch: {
      LockResult latched = cyclify_with_sr_latch(n, recipe, solver);
      if (recipe.micro_cycles == 0) return latched;
      LockResult sc = build_super_cycle(latched.locked, recipe);
      sc.correct_key.insert(latched.correct_key.begin(), latched.correct_key.end());
      sc.added_gates += latched.added_gates;
      sc.added_keys += latched.added_keys;
      latched.placement_log.insert(latched.placement_log.end(), sc.placement_log.begin(),
                                   sc.placement_log.end());
      sc.placement_log = std::move(latched.placement_log);
      return sc;
    }
  }
  throw std::logic_error("unhandled scheme");
}

}  // namespace cyclo
