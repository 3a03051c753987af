#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace cyclo {

enum class SolveStatus { Sat, Unsat, Unknown };

/// Incremental CDCL solver: two watched literals, first-UIP learning, VSIDS,
/// phase saving, Luby restarts. Literals use DIMACS convention (+v / -v, v >= 1).
class CdclSolver {
 public:
  explicit CdclSolver(std::uint64_t seed = 0);

  int new_var();
  int var_count() const { return static_cast<int>(assigns_.size()); }

  /// Adds a clause between solve() calls. Returns false once the formula is
  /// known unsatisfiable at the root level.
  bool add_clause(std::span<const int> lits);

  SolveStatus solve(std::span<const int> assumptions = {});

  /// Model of the last Sat answer, indexed by variable (entry 0 unused).
  const std::vector<std::uint8_t>& model() const { return model_; }

  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
    deadline_ = deadline;
  }

  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }
  /// True when the last solve() gave up because the deadline passed.
  bool timed_out() const { return timed_out_; }

 private:
  using Lit = std::uint32_t;  // 2*var + sign, var 0-based
  static constexpr std::uint32_t kNoReason = ~0u;
  static constexpr std::uint8_t kTrue = 0, kFalse = 1, kUndef = 2;

  struct Clause {
    std::uint32_t start;  // offset into lits_
    std::uint32_t size;
    bool learnt;
    bool removed = false;
    float activity = 0;
  };
  struct Watch {
    std::uint32_t clause;
    Lit blocker;
  };

  static Lit to_lit(int dimacs) {
    int v = dimacs > 0 ? dimacs - 1 : -dimacs - 1;
    return static_cast<Lit>(2 * v + (dimacs < 0 ? 1 : 0));
  }
  static std::uint32_t var(Lit l) { return l >> 1; }
  static Lit neg(Lit l) { return l ^ 1u; }

  std::uint8_t value(Lit l) const {
    std::uint8_t a = assigns_[var(l)];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ (l & 1u));
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void assign(Lit l, std::uint32_t reason);
  std::uint32_t attach(const std::vector<Lit>& lits, bool learnt);
  std::uint32_t propagate();
  void analyze(std::uint32_t confl, std::vector<Lit>& out, int& back_level);
  bool redundant(Lit l, std::uint32_t abstract_levels);
  void backtrack(int lvl);
  Lit pick_branch();
  SolveStatus search(std::uint64_t conflict_budget, std::span<const Lit> assumptions);
  void reduce_learnts();
  void compact();
  void bump_var(std::uint32_t v);
  void bump_clause(std::uint32_t c);
  bool out_of_time();

  // heap keyed by activity
  void heap_insert(std::uint32_t v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::uint32_t heap_pop();
  bool heap_lt(std::uint32_t a, std::uint32_t b) const { return activity_[a] > activity_[b]; }

  std::vector<Lit> lits_;
  std::vector<Clause> clauses_;
  std::vector<std::uint32_t> learnts_;
  std::vector<std::vector<Watch>> watches_;

  std::vector<std::uint8_t> assigns_;
  std::vector<std::uint8_t> polarity_;
  std::vector<int> levels_;
  std::vector<std::uint32_t> reasons_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<std::uint32_t> heap_;
  std::vector<int> heap_pos_;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::size_t max_learnts_ = 0;
  bool ok_ = true;
  bool seed_randomizes_ = false;
  bool timed_out_ = false;
  std::size_t removed_lits_ = 0;

  std::mt19937_64 rng_;
  std::vector<std::uint8_t> model_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  std::vector<Lit> analyze_stack_;
  std::vector<Lit> analyze_clear_;
};

}  // namespace cyclo
