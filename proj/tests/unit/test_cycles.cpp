#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "cyclo/bench.hpp"
#include "cyclo/cycles.hpp"
#include "cyclo/error.hpp"
#include "cyclo/transform.hpp"
#include "helpers.hpp"

using namespace cyclo;

namespace {

// Brute force: every vertex sequence that closes into a cycle, canonicalized
// by rotating its minimum to the front.
std::set<std::vector<int>> brute_cycles(const Adjacency& succ) {
  const int n = static_cast<int>(succ.size());
  std::set<std::vector<int>> out;
  std::vector<int> path;
  std::vector<char> used(n, 0);
  auto has_edge = [&](int a, int b) {
    return std::find(succ[a].begin(), succ[a].end(), b) != succ[a].end();
  };
  std::function<void()> rec = [&]() {
    if (!path.empty() && has_edge(path.back(), path.front())) {
      auto c = path;
      std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
      out.insert(c);
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      if (!path.empty() && !has_edge(path.back(), v)) continue;
      used[v] = 1;
      path.push_back(v);
      rec();
      path.pop_back();
      used[v] = 0;
    }
  };
  rec();
  return out;
}

Adjacency complete(int n) {
  Adjacency g(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) g[a].push_back(b);
  return g;
}

KeyAssignment toy_key(int k1, int k2, int k3) {
  return {{"keyinput1", k1 != 0}, {"keyinput2", k2 != 0}, {"keyinput3", k3 != 0}};
}

// Truth table of NC clauses over keys (and x2 in sensitizable mode).
std::vector<bool> nc_table(const Netlist& n, const NcClauses& nc, const std::vector<std::string>& vars) {
  std::vector<bool> table;
  for (unsigned m = 0; m < (1u << vars.size()); ++m) {
    table.push_back(nc.satisfied_by([&](WireId w) {
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (n.wire_name(w) == vars[i]) return ((m >> i) & 1u) != 0;
      FAIL("unexpected wire in NC clause: " << n.wire_name(w));
      return false;
    }));
  }
  return table;
}

// Truth table of a CNF written with k1..k3 / x2 as indices 0..3.
std::vector<bool> cnf_table(const std::vector<std::vector<int>>& cnf, std::size_t nvars) {
  std::vector<bool> table;
  for (unsigned m = 0; m < (1u << nvars); ++m) {
    bool all = true;
    for (const auto& c : cnf) {
      bool any = false;
      for (int l : c) any = any || ((((m >> (std::abs(l) - 1)) & 1u) != 0) == (l > 0));
      all = all && any;
    }
    table.push_back(all);
  }
  return table;
}

}  // namespace

TEST_CASE("johnson: small fixed graphs") {
  Adjacency two{{1}, {0}};
  CHECK(enumerate_cycles(two).count == 1);
  CHECK(enumerate_cycles(complete(3)).count == 5);
  Adjacency self{{0}};
  CHECK(enumerate_cycles(self).count == 1);
}

TEST_CASE("johnson agrees with brute force on K_n and random digraphs") {
  for (int n = 1; n <= 5; ++n) {
    auto g = complete(n);
    auto cs = enumerate_cycles(g);
    CHECK(cs.count == brute_cycles(g).size());
  }
  std::mt19937 rng(7);
  for (int round = 0; round < 60; ++round) {
    int n = 3 + round % 5;
    Adjacency g(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (rng() % 3 == 0) g[a].push_back(b);
    auto cs = enumerate_cycles(g);
    auto expect = brute_cycles(g);
    REQUIRE(cs.status == EnumStatus::Complete);
    CHECK(cs.count == expect.size());
    std::set<std::vector<int>> got;
    for (const auto& c : cs.cycles) {
      std::vector<int> v(c.begin(), c.end());
      std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
      got.insert(v);
    }
    CHECK(got == expect);
  }
}

TEST_CASE("johnson: limit truncates with status") {
  EnumOptions opt;
  opt.limit = 10;
  auto cs = enumerate_cycles(complete(5), opt);
  CHECK(cs.status == EnumStatus::LimitHit);
  CHECK(cs.count == 10);
}

TEST_CASE("toy lock: three cycles and feedbacks {C->A, E->C}") {
  auto n = testing::load("toy_locked.bench");
  auto cs = enumerate_cycles(n);
  CHECK(cs.count == 3);
  CHECK(cs.count == brute_cycles(gate_successors(n)).size());

  auto fs = find_feedback_set(n);
  REQUIRE(fs.edges.size() == 2);
  auto name = [&](int g) { return n.wire_name(n.gates()[g].output); };
  CHECK(name(fs.edges[0].from) == "C");
  CHECK(name(fs.edges[0].to) == "A");
  CHECK(name(fs.edges[1].from) == "E");
  CHECK(name(fs.edges[1].to) == "C");
}

TEST_CASE("feedback removal leaves an acyclic graph") {
  auto check = [](const Netlist& n) {
    auto fs = find_feedback_set(n);
    auto succ = gate_successors(n);
    for (const auto& e : fs.edges) {
      auto& s = succ[e.from];
      s.erase(std::find(s.begin(), s.end(), e.to));
    }
    auto cyc = cyclic_vertices(succ);
    CHECK(std::none_of(cyc.begin(), cyc.end(), [](char c) { return c != 0; }));
  };
  check(testing::load("toy_locked.bench"));
  auto loop = parse_bench("INPUT(a)\nOUTPUT(w)\nw = BUF(w)");
  auto fs = find_feedback_set(loop);
  REQUIRE(fs.edges.size() == 1);
  CHECK(fs.edges[0].from == fs.edges[0].to);
  CHECK(find_feedback_set(testing::load_bench("c432")).edges.empty());
}

TEST_CASE("classify: self-loops and the toy lock keys") {
  auto buf = parse_bench("INPUT(a)\nOUTPUT(w)\nw = BUF(w)");
  CHECK(classify_cycle(buf, {}, {{"a", false}}) == CycleBehavior::Stateful);
  auto inv = parse_bench("INPUT(a)\nOUTPUT(w)\nw = NOT(w)");
  CHECK(classify_cycle(inv, {}, {{"a", false}}) == CycleBehavior::Oscillating);

  auto n = testing::load("toy_locked.bench");
  Assignment x0{{"x1", false}, {"x2", false}, {"x3", false}};
  Assignment x3{{"x1", false}, {"x2", false}, {"x3", true}};
  CHECK(classify_cycle(n, toy_key(0, 0, 0), x0) == CycleBehavior::Broken);
  // Under 110 the loop A-G-E-C computes C = C xor x3.
  CHECK(classify_cycle(n, toy_key(1, 1, 0), x0) == CycleBehavior::Stateful);
  CHECK(classify_cycle(n, toy_key(1, 1, 0), x3) == CycleBehavior::Oscillating);
}

TEST_CASE("break conditions") {
  auto n = testing::load("toy_locked.bench");
  auto gate = [&](const char* w) { return n.gates()[n.driver(n.wire(w))]; };
  auto lits = break_condition(n, gate("C"), n.wire("E"), BreakMode::Structural);
  REQUIRE(lits.size() == 1);
  CHECK(n.wire_name(lits[0].wire) == "keyinput2");
  CHECK(lits[0].value == false);
  CHECK(break_condition(n, gate("C"), n.wire("B"), BreakMode::Structural)[0].value == true);

  auto side = break_condition(n, gate("B"), n.wire("A"), BreakMode::Sensitizable);
  REQUIRE(side.size() == 1);
  CHECK(n.wire_name(side[0].wire) == "x2");
  CHECK(side[0].value == false);
  CHECK(break_condition(n, gate("B"), n.wire("A"), BreakMode::Structural).empty());

  for (auto mode : {BreakMode::Structural, BreakMode::Sensitizable}) {
    CHECK(break_condition(n, gate("G"), n.wire("A"), mode).empty());
    CHECK(break_condition(n, gate("G"), n.wire("x3"), mode).empty());
  }
  CHECK(break_condition(n, gate("A"), n.wire("keyinput1"), BreakMode::Structural).empty());
  CHECK_THROWS_AS(break_condition(n, gate("B"), n.wire("x3"), BreakMode::Structural), Error);
}

TEST_CASE("toy lock NC listings") {
  auto n = testing::load("toy_locked.bench");
  auto fs = find_feedback_set(n);
  const std::vector<std::string> keys{"keyinput1", "keyinput2", "keyinput3"};
  // Literal index: 1..3 = k1..k3, 4 = x2.
  auto single = compute_nc(n, fs, nullptr, NcMode::StructuralPerFeedbackSingleCycle);
  CHECK(nc_table(n, single, keys) == cnf_table({{-1, 2}, {-2, -3}}, 3));

  auto rule2 = compute_nc(n, fs, nullptr, NcMode::StructuralPerFeedback);
  CHECK(nc_table(n, rule2, keys) == cnf_table({{-2, -3}, {-1, -2, 3}, {-1, 2}}, 3));

  auto cs = enumerate_cycles(n);
  auto all = compute_nc(n, fs, &cs, NcMode::StructuralAllCycles);
  CHECK(all.clauses.size() == 3);
  CHECK(all.cycles_visited == 3);
  CHECK(nc_table(n, all, keys) == nc_table(n, rule2, keys));

  auto sens = compute_nc(n, fs, nullptr, NcMode::Sensitizable);
  auto with_x2 = keys;
  with_x2.push_back("x2");
  CHECK(nc_table(n, sens, with_x2) ==
        cnf_table({{-1, -4, 2}, {-1, 3, -2}, {-2, -3}, {-2, -1, -4, 3}}, 4));
}

TEST_CASE("all-cycles NC refuses truncated enumerations") {
  auto n = testing::load("toy_locked.bench");
  EnumOptions opt;
  opt.limit = 2;
  auto cs = enumerate_cycles(n, opt);
  CHECK_THROWS_AS(compute_nc(n, find_feedback_set(n), &cs, NcMode::StructuralAllCycles), Error);
  CHECK_THROWS_AS(compute_nc(n, find_feedback_set(n), nullptr, NcMode::StructuralAllCycles), Error);
}

TEST_CASE("trap: single-cycle NC admits a key that leaves a cycle closed") {
  auto n = testing::load("toy_locked.bench");
  auto fs = find_feedback_set(n);
  auto single = compute_nc(n, fs, nullptr, NcMode::StructuralPerFeedbackSingleCycle);
  auto rule2 = compute_nc(n, fs, nullptr, NcMode::StructuralPerFeedback);
  int trapped = 0;
  for (int m = 0; m < 8; ++m) {
    auto key = toy_key(m & 1, (m >> 1) & 1, (m >> 2) & 1);
    auto value = [&](WireId w) { return key.at(n.wire_name(w)); };
    bool cyclic = !is_acyclic(apply_key(n, key));
    // Rule (ii) is exact: it holds iff every cycle is structurally broken.
    CHECK(rule2.satisfied_by(value) == !cyclic);
    if (single.satisfied_by(value) && cyclic) ++trapped;
  }
  CHECK(trapped == 1);
  auto trap = toy_key(1, 1, 0);
  CHECK(single.satisfied_by([&](WireId w) { return trap.at(n.wire_name(w)); }));
  CHECK_FALSE(is_acyclic(apply_key(n, trap)));
}
