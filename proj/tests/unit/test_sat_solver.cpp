#include <doctest.h>

#include <random>

#include "cyclo/cnf.hpp"
#include "cyclo/error.hpp"
#include "cyclo/sat_solver.hpp"
#include "cyclo/solver.hpp"

using namespace cyclo;

namespace {

using Clauses = std::vector<std::vector<int>>;

bool brute_force_sat(int vars, const Clauses& cs, const std::vector<int>& assume = {}) {
  for (std::uint32_t m = 0; m < (1u << vars); ++m) {
    auto val = [&](int lit) {
      bool b = (m >> (std::abs(lit) - 1)) & 1u;
      return lit > 0 ? b : !b;
    };
    bool ok = true;
    for (int a : assume) ok = ok && val(a);
    for (const auto& c : cs) {
      bool any = false;
      for (int l : c) any = any || val(l);
      ok = ok && any;
    }
    if (ok) return true;
  }
  return false;
}

Clauses random_3sat(std::mt19937& rng, int vars, int clauses) {
  Clauses cs;
  std::uniform_int_distribution<int> var(1, vars), coin(0, 1);
  for (int i = 0; i < clauses; ++i) {
    std::vector<int> c;
    for (int k = 0; k < 3; ++k) c.push_back(coin(rng) ? var(rng) : -var(rng));
    cs.push_back(c);
  }
  return cs;
}

}  // namespace

TEST_CASE("cdcl: contradictory units are unsat") {
  CdclSolver s;
  int x = s.new_var();
  s.add_clause(std::vector<int>{x});
  s.add_clause(std::vector<int>{-x});
  CHECK(s.solve() == SolveStatus::Unsat);
}

TEST_CASE("cdcl: assumption forces the other literal") {
  CdclSolver s;
  int a = s.new_var(), b = s.new_var();
  s.add_clause(std::vector<int>{a, b});
  std::vector<int> assume{-a};
  REQUIRE(s.solve(assume) == SolveStatus::Sat);
  CHECK(s.model()[b] == 1);
  // Assumptions do not stick.
  std::vector<int> assume2{-b};
  REQUIRE(s.solve(assume2) == SolveStatus::Sat);
  CHECK(s.model()[a] == 1);
}

TEST_CASE("cdcl agrees with brute force on random 3-SAT near the threshold") {
  std::mt19937 rng(1234);
  int disagreements = 0, sat_count = 0;
  for (int round = 0; round < 300; ++round) {
    int vars = 6 + round % 9;
    auto cs = random_3sat(rng, vars, static_cast<int>(vars * 4.26));
    CdclSolver s(static_cast<std::uint64_t>(round));
    for (int i = 0; i < vars; ++i) s.new_var();
    for (const auto& c : cs) s.add_clause(c);
    auto st = s.solve();
    bool expect = brute_force_sat(vars, cs);
    if ((st == SolveStatus::Sat) != expect) ++disagreements;
    if (st == SolveStatus::Sat) {
      ++sat_count;
      for (const auto& c : cs) {
        bool any = false;
        for (int l : c) any = any || ((s.model()[std::abs(l)] != 0) == (l > 0));
        CHECK(any);
      }
    }
  }
  CHECK(disagreements == 0);
  CHECK(sat_count > 20);
  CHECK(sat_count < 280);
}

TEST_CASE("cdcl incremental: clauses added between calls with assumptions") {
  std::mt19937 rng(99);
  for (int round = 0; round < 60; ++round) {
    int vars = 10;
    CdclSolver s(static_cast<std::uint64_t>(round + 1));
    for (int i = 0; i < vars; ++i) s.new_var();
    Clauses all;
    for (int step = 0; step < 8; ++step) {
      auto more = random_3sat(rng, vars, 6);
      for (const auto& c : more) {
        s.add_clause(c);
        all.push_back(c);
      }
      std::vector<int> assume{(step % 2 ? 1 : -1) * (1 + step % vars)};
      bool expect = brute_force_sat(vars, all, assume);
      CHECK((s.solve(assume) == SolveStatus::Sat) == expect);
    }
  }
}

TEST_CASE("pigeonhole 7 into 6 is unsat") {
  CdclSolver s;
  const int P = 7, H = 6;
  auto v = [&](int p, int h) { return p * H + h + 1; };
  for (int i = 0; i < P * H; ++i) s.new_var();
  for (int p = 0; p < P; ++p) {
    std::vector<int> c;
    for (int h = 0; h < H; ++h) c.push_back(v(p, h));
    s.add_clause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p = 0; p < P; ++p)
      for (int q = p + 1; q < P; ++q) s.add_clause(std::vector<int>{-v(p, h), -v(q, h)});
  CHECK(s.solve() == SolveStatus::Unsat);
}

TEST_CASE("solve(): worked examples") {
  SolverConfig cfg;  // in-process regardless of environment
  CnfFormula f;
  int x1 = f.new_var();
  f.add({x1});
  f.add({-x1});
  CHECK_FALSE(solve(f, {}, cfg).sat());

  CnfFormula g;
  int a = g.new_var(), b = g.new_var();
  g.add({a, b});
  std::vector<int> assume{-a};
  auto v = solve(g, assume, cfg);
  REQUIRE(v.sat());
  CHECK(v.value(b));
}

TEST_CASE("solver output parsing") {
  auto v = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3);
  REQUIRE(v.sat());
  CHECK(v.value(1));
  CHECK(v.value(-2));
  CHECK(v.value(3));
  CHECK(parse_solver_output("s UNSATISFIABLE\n", 3).status == Verdict::Unsat);
  CHECK_THROWS_AS(parse_solver_output("garbage\n", 3), Error);
}

TEST_CASE("external backend failure is distinct from unsat") {
  SolverConfig cfg;
  cfg.external = "/nonexistent/solver";
  CnfFormula f;
  int a = f.new_var();
  f.add({a});
  try {
    solve(f, {}, cfg);
    FAIL("expected BackendFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
}
