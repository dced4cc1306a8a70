#include "pacs/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

// Shared clause preprocessing: dedupe literals, drop tautologies.
// Returns false if the clause is a tautology (x or -x both present).
bool normalize_clause(std::vector<int>& lits) {
  std::sort(lits.begin(), lits.end(), [](int a, int b) {
    int va = std::abs(a), vb = std::abs(b);
    return va != vb ? va < vb : a < b;
  });
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (size_t i = 1; i < lits.size(); ++i)
    if (lits[i] == -lits[i - 1]) return false;
  return true;
}

class Cdcl {
public:
  explicit Cdcl(const ClauseSet& cs) : nvars_(cs.num_vars) {
    assign_.assign(nvars_, -1);
    level_.assign(nvars_, 0);
    reason_.assign(nvars_, -1);
    activity_.assign(nvars_, 0.0);
    seen_.assign(nvars_, 0);
    watches_.assign(2 * static_cast<size_t>(nvars_), {});
    for (const auto& c : cs.clauses) {
      std::vector<int> lits = c.lits;
      if (!normalize_clause(lits)) continue;
      if (lits.empty()) {
        ok_ = false;
        return;
      }
      if (lits.size() == 1) {
        int v = value(lits[0]);
        if (v == 0) {
          ok_ = false;
          return;
        }
        if (v < 0) enqueue(lits[0], -1);
        continue;
      }
      watch(static_cast<int>(clauses_.size()), lits[0]);
      watch(static_cast<int>(clauses_.size()), lits[1]);
      clauses_.push_back(std::move(lits));
    }
  }

  bool solve(std::span<const int> assumptions) {
    if (!ok_) return false;
    if (propagate() >= 0) return false;
    for (int a : assumptions) {
      int v = value(a);
      if (v == 0) return false;
      if (v < 0) {
        enqueue(a, -1);
        if (propagate() >= 0) return false;
      }
    }
    while (true) {
      int confl = propagate();
      if (confl >= 0) {
        if (decision_level() == 0) return false;
        std::vector<int> learnt;
        int bt = analyze(confl, learnt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int ci = static_cast<int>(clauses_.size());
          watch(ci, learnt[0]);
          watch(ci, learnt[1]);
          clauses_.push_back(learnt);
          enqueue(learnt[0], ci);
        }
        var_inc_ *= 1.052;
        if (var_inc_ > 1e100) rescale();
      } else {
        int v = pick_branch();
        if (v < 0) return true;
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(-(v + 1), -1);
      }
    }
  }

  std::vector<bool> model() const {
    std::vector<bool> m(nvars_);
    for (int v = 0; v < nvars_; ++v) m[v] = assign_[v] == 1;
    return m;
  }

private:
  static size_t widx(int lit) {
    return 2 * static_cast<size_t>(std::abs(lit) - 1) + (lit > 0 ? 0 : 1);
  }

  int value(int lit) const {
    int8_t a = assign_[std::abs(lit) - 1];
    if (a < 0) return -1;
    return lit > 0 ? a : 1 - a;
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void watch(int ci, int lit) { watches_[widx(lit)].push_back(ci); }

  void enqueue(int lit, int reason) {
    int v = std::abs(lit) - 1;
    assign_[v] = lit > 0 ? 1 : 0;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  // Returns the index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int p = trail_[qhead_++];
      size_t wi = widx(-p);
      std::vector<int> ws = std::move(watches_[wi]);
      watches_[wi].clear();
      for (size_t i = 0; i < ws.size(); ++i) {
        int ci = ws[i];
        auto& lits = clauses_[ci];
        if (lits[0] == -p) std::swap(lits[0], lits[1]);
        if (value(lits[0]) == 1) {
          watches_[wi].push_back(ci);
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != 0) {
            std::swap(lits[1], lits[k]);
            watch(ci, lits[1]);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        watches_[wi].push_back(ci);
        if (value(lits[0]) == 0) {
          for (++i; i < ws.size(); ++i) watches_[wi].push_back(ws[i]);
          qhead_ = trail_.size();
          return ci;
        }
        enqueue(lits[0], ci);
      }
    }
    return -1;
  }

  // First-UIP learning. Returns the backtrack level; learnt[0] is the
  // asserting literal and learnt[1] (when present) sits at that level.
  int analyze(int confl, std::vector<int>& learnt) {
    learnt.assign(1, 0);
    int counter = 0;
    int p = 0;
    size_t idx = trail_.size();
    do {
      const auto& lits = clauses_[confl];
      for (size_t j = p == 0 ? 0 : 1; j < lits.size(); ++j) {
        int q = lits[j];
        int v = std::abs(q) - 1;
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        activity_[v] += var_inc_;
        if (level_[v] == decision_level())
          ++counter;
        else
          learnt.push_back(q);
      }
      while (!seen_[std::abs(trail_[--idx]) - 1]) {
      }
      p = trail_[idx];
      confl = reason_[std::abs(p) - 1];
      seen_[std::abs(p) - 1] = 0;
      --counter;
    } while (counter > 0);
    learnt[0] = -p;
    for (size_t j = 1; j < learnt.size(); ++j) seen_[std::abs(learnt[j]) - 1] = 0;
    int bt = 0;
    size_t at = 1;
    for (size_t j = 1; j < learnt.size(); ++j) {
      int lv = level_[std::abs(learnt[j]) - 1];
      if (lv > bt) {
        bt = lv;
        at = j;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[at]);
    return bt;
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl) return;
    int end = trail_lim_[lvl];
    for (size_t i = trail_.size(); i > static_cast<size_t>(end); --i)
      assign_[std::abs(trail_[i - 1]) - 1] = -1;
    trail_.resize(end);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
  }

  int pick_branch() const {
    int best = -1;
    double best_act = -1.0;
    for (int v = 0; v < nvars_; ++v)
      if (assign_[v] < 0 && activity_[v] > best_act) {
        best = v;
        best_act = activity_[v];
      }
    return best;
  }

  void rescale() {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }

  int nvars_;
  bool ok_ = true;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int8_t> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<int8_t> seen_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  double var_inc_ = 1.0;
};

class Counter {
public:
  explicit Counter(const ClauseSet& cs)
      : nvars_(cs.num_vars), norig_(cs.num_original) {
    if (norig_ > 62) throw VocabularyTooLarge("model count would overflow a 64-bit total");
    assign_.assign(nvars_, -1);
    for (const auto& c : cs.clauses) {
      std::vector<int> lits = c.lits;
      if (!normalize_clause(lits)) continue;
      clauses_.push_back(std::move(lits));
    }
  }

  std::uint64_t count() { return rec(); }

private:
  int value(int lit) const {
    int8_t a = assign_[std::abs(lit) - 1];
    if (a < 0) return -1;
    return lit > 0 ? a : 1 - a;
  }

  void push(int lit) {
    assign_[std::abs(lit) - 1] = lit > 0 ? 1 : 0;
    trail_.push_back(lit);
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      assign_[std::abs(trail_.back()) - 1] = -1;
      trail_.pop_back();
    }
  }

  // Assigns all forced literals; false on conflict.
  bool propagate_units() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& lits : clauses_) {
        int unassigned = 0;
        int free_lit = 0;
        bool sat = false;
        for (int l : lits) {
          int v = value(l);
          if (v == 1) {
            sat = true;
            break;
          }
          if (v == -1) {
            ++unassigned;
            free_lit = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          push(free_lit);
          changed = true;
        }
      }
    }
    return true;
  }

  std::uint64_t rec() {
    size_t mark = trail_.size();
    if (!propagate_units()) {
      undo_to(mark);
      return 0;
    }
    int branch_lit = 0;
    for (const auto& lits : clauses_) {
      bool sat = false;
      int free_lit = 0;
      for (int l : lits) {
        int v = value(l);
        if (v == 1) {
          sat = true;
          break;
        }
        if (v == -1 && free_lit == 0) free_lit = l;
      }
      if (!sat) {
        branch_lit = free_lit;
        break;
      }
    }
    std::uint64_t total;
    if (branch_lit == 0) {
      int free_orig = 0;
      for (int v = 0; v < nvars_; ++v) {
        if (assign_[v] >= 0) continue;
        if (v >= norig_)
          throw Error("internal: auxiliary variable unconstrained at a counting leaf");
        ++free_orig;
      }
      total = std::uint64_t{1} << free_orig;
    } else {
      size_t here = trail_.size();
      push(branch_lit);
      total = rec();
      undo_to(here);
      push(-branch_lit);
      total += rec();
    }
    undo_to(mark);
    return total;
  }

  int nvars_;
  int norig_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int8_t> assign_;
  std::vector<int> trail_;
};

}  // namespace

SatResult solve_cnf(const ClauseSet& cs, std::span<const int> assumptions) {
  Cdcl solver(cs);
  SatResult r;
  r.sat = solver.solve(assumptions);
  if (r.sat) r.model = solver.model();
  return r;
}

std::uint64_t count_models(const ClauseSet& cs) {
  Counter counter(cs);
  return counter.count();
}

}  // namespace pacs
