#pragma once

#include <cstdint>
#include <span>

#include "cyclo/netlist.hpp"

namespace cyclo {

/// Kleene three-valued logic. X means "unknown": state-holding or oscillating.
enum class Ternary : std::uint8_t { Zero = 0, One = 1, X = 2 };

constexpr Ternary ternary(bool b) { return b ? Ternary::One : Ternary::Zero; }
constexpr bool is_binary(Ternary t) { return t != Ternary::X; }
constexpr char to_char(Ternary t) { return t == Ternary::Zero ? '0' : t == Ternary::One ? '1' : 'X'; }

constexpr Ternary t_not(Ternary a) {
  return a == Ternary::X ? Ternary::X : ternary(a == Ternary::Zero);
}

constexpr Ternary t_and(Ternary a, Ternary b) {
  if (a == Ternary::Zero || b == Ternary::Zero) return Ternary::Zero;
  if (a == Ternary::One && b == Ternary::One) return Ternary::One;
  return Ternary::X;
}

constexpr Ternary t_or(Ternary a, Ternary b) { return t_not(t_and(t_not(a), t_not(b))); }

constexpr Ternary t_xor(Ternary a, Ternary b) {
  if (a == Ternary::X || b == Ternary::X) return Ternary::X;
  return ternary(a != b);
}

constexpr Ternary t_mux(Ternary sel, Ternary in0, Ternary in1) {
  if (sel == Ternary::Zero) return in0;
  if (sel == Ternary::One) return in1;
  return in0 == in1 ? in0 : Ternary::X;
}

/// Applies a gate function to ternary inputs (MUX order: select, in0, in1).
Ternary eval_gate(GateKind kind, std::span<const Ternary> in);

}  // namespace cyclo
