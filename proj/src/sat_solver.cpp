#include "cyclo/sat_solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace cyclo {

namespace {

// Luby sequence scaled by `y`: 1 1 2 1 1 2 4 ...
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

CdclSolver::CdclSolver(std::uint64_t seed) : seed_randomizes_(seed != 0), rng_(seed) {}

int CdclSolver::new_var() {
  auto v = static_cast<std::uint32_t>(assigns_.size());
  assigns_.push_back(kUndef);
  // Seed 0 keeps the classic negative-first phase; other seeds randomize the
  // initial phase and break activity ties differently.
  bool randomize = seed_randomizes_;
  polarity_.push_back(randomize ? static_cast<std::uint8_t>(rng_() & 1u) : 1);
  levels_.push_back(0);
  reasons_.push_back(kNoReason);
  activity_.push_back(randomize ? static_cast<double>(rng_() % 1000) * 1e-5 : 0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_pos_.push_back(-1);
  heap_insert(v);
  return static_cast<int>(v) + 1;
}

void CdclSolver::assign(Lit l, std::uint32_t reason) {
  std::uint32_t v = var(l);
  assigns_[v] = static_cast<std::uint8_t>(l & 1u);
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

std::uint32_t CdclSolver::attach(const std::vector<Lit>& lits, bool learnt) {
  auto idx = static_cast<std::uint32_t>(clauses_.size());
  clauses_.push_back({static_cast<std::uint32_t>(lits_.size()),
                      static_cast<std::uint32_t>(lits.size()), learnt});
  lits_.insert(lits_.end(), lits.begin(), lits.end());
  watches_[lits[0]].push_back({idx, lits[1]});
  watches_[lits[1]].push_back({idx, lits[0]});
  if (learnt) learnts_.push_back(idx);
  return idx;
}

bool CdclSolver::add_clause(std::span<const int> dimacs) {
  if (!ok_) return false;
  backtrack(0);
  std::vector<Lit> c;
  c.reserve(dimacs.size());
  for (int d : dimacs) {
    if (d == 0 || std::abs(d) > var_count())
      throw std::invalid_argument("literal " + std::to_string(d) + " out of range");
    c.push_back(to_lit(d));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i + 1] == neg(c[i])) return true;  // tautology
    auto val = value(c[i]);
    if (val == kTrue) return true;
    if (val == kUndef) kept.push_back(c[i]);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    assign(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  attach(kept, false);
  return true;
}

std::uint32_t CdclSolver::propagate() {
  std::uint32_t conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = neg(p);
    auto& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watch w = ws[i++];
      Clause& cl = clauses_[w.clause];
      if (cl.removed) continue;
      if (value(w.blocker) == kTrue) {
        ws[j++] = w;
        continue;
      }
      Lit* c = &lits_[cl.start];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      Lit first = c[0];
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = {w.clause, first};
        continue;
      }
      bool moved = false;
      for (std::uint32_t k = 2; k < cl.size; ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back({w.clause, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.clause, first};
      if (value(first) == kFalse) {
        conflict = w.clause;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        assign(first, w.clause);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

void CdclSolver::bump_var(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void CdclSolver::bump_clause(std::uint32_t c) {
  clauses_[c].activity += static_cast<float>(clause_inc_);
  if (clauses_[c].activity > 1e20f) {
    for (auto idx : learnts_) clauses_[idx].activity *= 1e-20f;
    clause_inc_ *= 1e-20;
  }
}

bool CdclSolver::redundant(Lit l, std::uint32_t abstract_levels) {
  // Literal is implied by the rest of the learnt clause if its reason's
  // antecedents are all already marked (one level of look-through, iterated).
  analyze_stack_.clear();
  analyze_stack_.push_back(l);
  std::size_t top = analyze_clear_.size();
  while (!analyze_stack_.empty()) {
    Lit q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const Clause& cl = clauses_[reasons_[var(q)]];
    const Lit* c = &lits_[cl.start];
    for (std::uint32_t k = 1; k < cl.size; ++k) {
      std::uint32_t v = var(c[k]);
      if (seen_[v] || levels_[v] == 0) continue;
      if (reasons_[v] != kNoReason && ((1u << (levels_[v] & 31)) & abstract_levels)) {
        seen_[v] = 1;
        analyze_stack_.push_back(c[k]);
        analyze_clear_.push_back(c[k]);
      } else {
        for (std::size_t m = top; m < analyze_clear_.size(); ++m) seen_[var(analyze_clear_[m])] = 0;
        analyze_clear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

void CdclSolver::analyze(std::uint32_t confl, std::vector<Lit>& out, int& back_level) {
  out.clear();
  out.push_back(0);
  int path = 0;
  bool have_p = false;
  Lit p = 0;
  std::size_t idx = trail_.size();
  do {
    Clause& cl = clauses_[confl];
    if (cl.learnt) bump_clause(confl);
    const Lit* c = &lits_[cl.start];
    for (std::uint32_t k = have_p ? 1 : 0; k < cl.size; ++k) {
      std::uint32_t v = var(c[k]);
      if (seen_[v] || levels_[v] == 0) continue;
      bump_var(v);
      seen_[v] = 1;
      if (levels_[v] >= level())
        ++path;
      else
        out.push_back(c[k]);
    }
    while (!seen_[var(trail_[--idx])]) {
    }
    p = trail_[idx];
    have_p = true;
    confl = reasons_[var(p)];
    seen_[var(p)] = 0;
    --path;
  } while (path > 0);
  out[0] = neg(p);

  analyze_clear_.assign(out.begin(), out.end());
  std::uint32_t abstract_levels = 0;
  for (std::size_t k = 1; k < out.size(); ++k) abstract_levels |= 1u << (levels_[var(out[k])] & 31);
  std::size_t keep = 1;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (reasons_[var(out[k])] == kNoReason || !redundant(out[k], abstract_levels))
      out[keep++] = out[k];
  }
  out.resize(keep);

  back_level = 0;
  if (out.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < out.size(); ++k)
      if (levels_[var(out[k])] > levels_[var(out[max_i])]) max_i = k;
    std::swap(out[1], out[max_i]);
    back_level = levels_[var(out[1])];
  }
  for (Lit l : analyze_clear_) seen_[var(l)] = 0;
  analyze_clear_.clear();
}

void CdclSolver::backtrack(int lvl) {
  if (level() <= lvl) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[lvl];) {
    std::uint32_t v = var(trail_[i]);
    polarity_[v] = static_cast<std::uint8_t>(trail_[i] & 1u);
    assigns_[v] = kUndef;
    reasons_[v] = kNoReason;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

CdclSolver::Lit CdclSolver::pick_branch() {
  while (!heap_.empty()) {
    std::uint32_t v = heap_pop();
    if (assigns_[v] == kUndef) return static_cast<Lit>(2 * v + polarity_[v]);
  }
  return ~0u;
}

void CdclSolver::reduce_learnts() {
  std::vector<std::uint32_t> sorted = learnts_;
  std::sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
    const Clause &ca = clauses_[a], &cb = clauses_[b];
    if ((ca.size > 2) != (cb.size > 2)) return ca.size > 2;
    return ca.activity < cb.activity;
  });
  std::size_t half = sorted.size() / 2;
  learnts_.clear();
  std::size_t freed = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    std::uint32_t idx = sorted[k];
    Clause& cl = clauses_[idx];
    Lit first = lits_[cl.start];
    bool locked = value(first) == kTrue && reasons_[var(first)] == idx;
    if (k < half && cl.size > 2 && !locked) {
      cl.removed = true;
      freed += cl.size;
    } else {
      learnts_.push_back(idx);
    }
  }
  removed_lits_ += freed;
  if (removed_lits_ * 2 > lits_.size()) compact();
}

void CdclSolver::compact() {
  std::vector<Lit> pool;
  pool.reserve(lits_.size() - removed_lits_);
  for (auto& cl : clauses_) {
    if (cl.removed) {
      cl.size = 0;
      continue;
    }
    auto start = static_cast<std::uint32_t>(pool.size());
    pool.insert(pool.end(), lits_.begin() + cl.start, lits_.begin() + cl.start + cl.size);
    cl.start = start;
  }
  lits_ = std::move(pool);
  removed_lits_ = 0;
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watch& w) { return clauses_[w.clause].removed; }),
             ws.end());
}

bool CdclSolver::out_of_time() {
  return deadline_ && std::chrono::steady_clock::now() > *deadline_;
}

SolveStatus CdclSolver::search(std::uint64_t conflict_budget, std::span<const Lit> assumptions) {
  std::vector<Lit> learnt;
  std::uint64_t local_conflicts = 0;
  while (true) {
    std::uint32_t confl = propagate();
    if (confl != kNoReason) {
      ++conflicts_;
      ++local_conflicts;
      if (level() == 0) {
        ok_ = false;
        return SolveStatus::Unsat;
      }
      int back_level = 0;
      analyze(confl, learnt, back_level);
      backtrack(back_level);
      if (learnt.size() == 1) {
        assign(learnt[0], kNoReason);
      } else {
        std::uint32_t c = attach(learnt, true);
        bump_clause(c);
        assign(learnt[0], c);
      }
      var_inc_ /= 0.95;
      clause_inc_ /= 0.999;
      if ((conflicts_ & 255u) == 0 && out_of_time()) {
        timed_out_ = true;
        return SolveStatus::Unknown;
      }
      continue;
    }
    if (local_conflicts >= conflict_budget) {
      backtrack(0);
      return SolveStatus::Unknown;
    }
    if (learnts_.size() >= max_learnts_ + trail_.size()) reduce_learnts();

    Lit next = ~0u;
    while (static_cast<std::size_t>(level()) < assumptions.size()) {
      Lit a = assumptions[static_cast<std::size_t>(level())];
      auto val = value(a);
      if (val == kTrue) {
        trail_lim_.push_back(trail_.size());
      } else if (val == kFalse) {
        return SolveStatus::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == ~0u) {
      next = pick_branch();
      if (next == ~0u) {
        model_.assign(assigns_.size() + 1, 0);
        for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v + 1] = assigns_[v] == kTrue;
        return SolveStatus::Sat;
      }
      ++decisions_;
    }
    trail_lim_.push_back(trail_.size());
    assign(next, kNoReason);
  }
}

SolveStatus CdclSolver::solve(std::span<const int> assumptions) {
  model_.clear();
  timed_out_ = false;
  if (!ok_) return SolveStatus::Unsat;
  backtrack(0);
  std::vector<Lit> assume;
  assume.reserve(assumptions.size());
  for (int d : assumptions) {
    if (d == 0 || std::abs(d) > var_count())
      throw std::invalid_argument("assumption " + std::to_string(d) + " out of range");
    assume.push_back(to_lit(d));
  }
  if (propagate() != kNoReason) {
    ok_ = false;
    return SolveStatus::Unsat;
  }
  max_learnts_ = std::max<std::size_t>(clauses_.size() / 3, 5000);
  SolveStatus status = SolveStatus::Unknown;
  for (int restart = 0; status == SolveStatus::Unknown; ++restart) {
    if (out_of_time()) timed_out_ = true;
    if (timed_out_) break;
    status = search(static_cast<std::uint64_t>(luby(2, restart) * 100), assume);
    max_learnts_ += max_learnts_ / 10;
  }
  backtrack(0);
  return status;
}

void CdclSolver::heap_insert(std::uint32_t v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void CdclSolver::heap_up(std::size_t i) {
  std::uint32_t v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_lt(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void CdclSolver::heap_down(std::size_t i) {
  std::uint32_t v = heap_[i];
  while (true) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_lt(heap_[child + 1], heap_[child])) ++child;
    if (!heap_lt(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

std::uint32_t CdclSolver::heap_pop() {
  std::uint32_t top = heap_[0];
  heap_pos_[top] = -1;
  std::uint32_t last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace cyclo
