#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "cyclo/bench.hpp"
#include "cyclo/error.hpp"
#include "cyclo/simulate.hpp"
#include "cyclo/transform.hpp"
#include "helpers.hpp"

using namespace cyclo;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_bench(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::IoError;
}

bool same_structure(const Netlist& a, const Netlist& b) {
  if (a.wire_count() != b.wire_count() || a.gate_count() != b.gate_count()) return false;
  auto names = [](const Netlist& n, const std::vector<WireId>& ws) {
    std::vector<std::string> out;
    for (WireId w : ws) out.push_back(n.wire_name(w));
    return out;
  };
  if (names(a, a.inputs()) != names(b, b.inputs())) return false;
  if (names(a, a.key_inputs()) != names(b, b.key_inputs())) return false;
  if (names(a, a.outputs()) != names(b, b.outputs())) return false;
  for (std::size_t i = 0; i < a.gate_count(); ++i) {
    const auto &ga = a.gates()[i], &gb = b.gates()[i];
    if (ga.kind != gb.kind || a.wire_name(ga.output) != b.wire_name(gb.output)) return false;
    if (names(a, ga.inputs) != names(b, gb.inputs)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse a minimal netlist") {
  auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  CHECK(n.inputs().size() == 2);
  CHECK(n.key_inputs().empty());
  CHECK(n.outputs().size() == 1);
  CHECK(n.gate_count() == 1);
  CHECK(is_acyclic(n));
}

TEST_CASE("parse errors carry codes") {
  CHECK(code_of("INPUT(a)\ny = AND(a)") == ErrorCode::ArityError);
  CHECK(code_of("INPUT(a)\ny = NOT(a)\ny = BUF(a)") == ErrorCode::DuplicateDriver);
  CHECK(code_of("INPUT(a)\na = NOT(a)") == ErrorCode::DuplicateDriver);
  CHECK(code_of("INPUT(a)\ny = AND(a, b)") == ErrorCode::UndeclaredWire);
  CHECK(code_of("INPUT(a)\ny = DFF(a)") == ErrorCode::UnsupportedGate);
  CHECK(code_of("INPUT(a)\ny = NOT a") == ErrorCode::SyntaxError);
  CHECK(code_of("INPUT(a)\nOUTPUT(q)") == ErrorCode::UndeclaredWire);
  CHECK(code_of("INPUT(a)\ny = MUX(a, a)") == ErrorCode::ArityError);
}

TEST_CASE("syntax errors report the line") {
  try {
    parse_bench("INPUT(a)\n# comment\n\ny == AND(a, a)\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("key inputs follow the configured prefix") {
  auto n = parse_bench("INPUT(a)\nINPUT(keyinput0)\nINPUT(kx)\nOUTPUT(y)\ny = XOR(a, keyinput0, kx)");
  CHECK(n.key_inputs().size() == 1);
  CHECK(n.inputs().size() == 2);
  BenchOptions opt;
  opt.key_prefix = "k";
  auto m = parse_bench("INPUT(a)\nINPUT(keyinput0)\nINPUT(kx)\nOUTPUT(y)\ny = XOR(a, keyinput0, kx)", opt);
  CHECK(m.key_inputs().size() == 2);
}

TEST_CASE("c432 gate count equals its assignment lines") {
  std::ifstream in(testing::bench_path("c432"));
  REQUIRE(in);
  std::string line;
  std::size_t assigns = 0;
  while (std::getline(in, line))
    if (line.find('=') != std::string::npos && line[0] != '#') ++assigns;
  auto n = testing::load_bench("c432");
  CHECK(n.gate_count() == assigns);
  CHECK(is_acyclic(n));
}

TEST_CASE("round trip is structural identity") {
  for (const char* name : {"c17", "c432", "c880"}) {
    auto n = testing::load_bench(name);
    auto m = parse_bench(serialize_bench(n));
    CHECK(same_structure(n, m));
  }
  auto fig = testing::load("toy_locked.bench");
  auto back = parse_bench(serialize_bench(fig));
  CHECK(same_structure(fig, back));
  CHECK_FALSE(is_acyclic(back));
}

TEST_CASE("AND evaluation and BUF self-loop") {
  auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  auto out = evaluate(n, {{"a", true}, {"b", true}}, {});
  CHECK(out.at("y") == Ternary::One);
  CHECK_THROWS_AS(evaluate(n, {{"a", true}}, {}), Error);

  auto loop = parse_bench("INPUT(a)\nOUTPUT(w)\nw = BUF(w)");
  CHECK_FALSE(is_acyclic(loop));
  CHECK(evaluate(loop, {{"a", false}}, {}).at("w") == Ternary::X);
  CHECK(evaluate(loop, {{"a", true}}, {}).at("w") == Ternary::X);
}

TEST_CASE("Kleene tables") {
  using T = Ternary;
  CHECK(t_and(T::Zero, T::X) == T::Zero);
  CHECK(t_or(T::One, T::X) == T::One);
  CHECK(t_not(T::X) == T::X);
  for (T a : {T::Zero, T::One, T::X}) CHECK(t_xor(a, T::X) == T::X);
  CHECK(t_mux(T::X, T::One, T::One) == T::One);
  CHECK(t_mux(T::X, T::Zero, T::One) == T::X);
}

TEST_CASE("toy lock under the correct key matches the original on every input") {
  auto locked = testing::load("toy_locked.bench");
  auto original = testing::load("toy_original.bench");
  CHECK_FALSE(is_acyclic(locked));
  for (unsigned m = 0; m < 8; ++m) {
    Assignment x{{"x1", m & 1}, {"x2", (m >> 1) & 1}, {"x3", (m >> 2) & 1}};
    auto got = evaluate(locked, x, {{"keyinput1", false}, {"keyinput2", false}, {"keyinput3", false}});
    auto want = evaluate(original, x, {});
    CHECK(got == want);
  }
}

TEST_CASE("ternary evaluation equals binary evaluation on acyclic netlists") {
  auto n = testing::load_bench("c880");
  std::mt19937_64 rng(5);
  std::vector<std::uint64_t> words(n.inputs().size());
  for (auto& w : words) w = rng();
  auto packed = simulate64(n, words, {});
  for (int bit = 0; bit < 64; bit += 7) {
    Bits x(n.inputs().size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (words[i] >> bit) & 1u;
    auto vals = simulate(n, x, {});
    for (WireId o : n.outputs()) {
      REQUIRE(is_binary(vals[o]));
      CHECK((vals[o] == Ternary::One) == (((packed[o] >> bit) & 1u) != 0));
    }
  }
}

TEST_CASE("ternary fixpoint is monotone and within the cap") {
  // Random cyclic netlists: every X->binary transition is final.
  std::mt19937 rng(17);
  for (int round = 0; round < 40; ++round) {
    NetlistBuilder b;
    for (int i = 0; i < 4; ++i) b.add_input("i" + std::to_string(i));
    const int G = 12;
    const GateKind kinds[] = {GateKind::And, GateKind::Or, GateKind::Nand, GateKind::Nor,
                              GateKind::Xor, GateKind::Mux, GateKind::Not};
    for (int g = 0; g < G; ++g) {
      auto pick = [&] {
        int r = static_cast<int>(rng() % (G + 4));
        return r < 4 ? "i" + std::to_string(r) : "g" + std::to_string(r - 4);
      };
      GateKind k = kinds[rng() % 7];
      std::vector<std::string> ins;
      int arity = k == GateKind::Mux ? 3 : k == GateKind::Not ? 1 : 2;
      for (int a = 0; a < arity; ++a) ins.push_back(pick());
      b.add_gate("g" + std::to_string(g), k, ins);
    }
    b.add_output("g0");
    auto n = b.build();
    Bits x{static_cast<std::uint8_t>(rng() & 1), static_cast<std::uint8_t>(rng() & 1),
           static_cast<std::uint8_t>(rng() & 1), static_cast<std::uint8_t>(rng() & 1)};
    // Replay the synchronous iteration step by step.
    std::vector<Ternary> cur(n.wire_count(), Ternary::X);
    for (std::size_t i = 0; i < 4; ++i) cur[n.inputs()[i]] = ternary(x[i] != 0);
    std::size_t rounds = 0;
    while (true) {
      auto next = cur;
      for (const auto& g : n.gates()) {
        std::vector<Ternary> in;
        for (WireId w : g.inputs) in.push_back(cur[w]);
        next[g.output] = eval_gate(g.kind, in);
      }
      for (std::size_t w = 0; w < cur.size(); ++w)
        if (is_binary(cur[w])) CHECK(next[w] == cur[w]);
      ++rounds;
      if (next == cur) break;
      cur = next;
      REQUIRE(rounds <= 2 * n.gate_count());
    }
    FixpointStats st;
    auto fast = simulate(n, x, {}, &st);
    CHECK(st.converged);
    CHECK(fast == cur);
  }
}

TEST_CASE("apply_key restores acyclicity for the correct toy lock key") {
  auto locked = testing::load("toy_locked.bench");
  auto keyed = apply_key(locked, {{"keyinput1", false}, {"keyinput2", false}, {"keyinput3", false}});
  CHECK(is_acyclic(keyed));
  CHECK(keyed.key_inputs().size() == 3);
}
