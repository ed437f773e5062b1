#include "aci/sat.hpp"

#include <algorithm>
#include <cassert>

namespace aci::sat {

namespace {

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

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;

}  // namespace

Var Solver::new_var() {
    const Var v = num_vars();
    assigns_.push_back(kUndef);
    levels_.push_back(0);
    reasons_.push_back(kNoReason);
    phase_.push_back(false);
    activity_.push_back(0.0);
    heap_index_.push_back(-1);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
}

void Solver::attach(int cref) {
    const auto& c = clauses_[cref].lits;
    watches_[c[0].code].push_back({cref, c[1]});
    watches_[c[1].code].push_back({cref, c[0]});
}

void Solver::enqueue(Lit l, int reason) {
    assigns_[l.var()] = l.negated() ? kFalse : kTrue;
    levels_[l.var()] = level();
    reasons_[l.var()] = reason;
    trail_.push_back(l);
}

bool Solver::add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    assert(level() == 0);
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        const Lit l = lits[i];
        if (i > 0 && l == lits[i - 1]) continue;
        if (i + 1 < lits.size() && lits[i + 1] == ~l) return true;  // tautology
        const auto v = value(l);
        if (v == kTrue) return true;
        if (v == kFalse) continue;
        kept.push_back(l);
    }
    if (kept.empty()) return ok_ = false;
    if (kept.size() == 1) {
        enqueue(kept[0], kNoReason);
        if (propagate() != kNoReason) ok_ = false;
        return ok_;
    }
    clauses_.push_back({std::move(kept), false, false, 0.0});
    ++num_original_;
    attach(static_cast<int>(clauses_.size()) - 1);
    return true;
}

int Solver::propagate() {
    while (qhead_ < trail_.size()) {
        const Lit p = trail_[qhead_++];
        const Lit false_lit = ~p;
        auto& ws = watches_[false_lit.code];
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            const Watcher w = ws[i++];
            if (value(w.blocker) == kTrue) {
                ws[j++] = w;
                continue;
            }
            auto& c = clauses_[w.cref].lits;
            if (c[0] == false_lit) std::swap(c[0], c[1]);
            const Lit first = c[0];
            if (first != w.blocker && value(first) == kTrue) {
                ws[j++] = {w.cref, first};
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (value(c[k]) != kFalse) {
                    std::swap(c[1], c[k]);
                    watches_[c[1].code].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[j++] = {w.cref, first};
            if (value(first) == kFalse) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return w.cref;
            }
            enqueue(first, w.cref);
        }
        ws.resize(j);
    }
    return kNoReason;
}

bool Solver::redundant(Lit l) const {
    const int r = reasons_[l.var()];
    if (r == kNoReason) return false;
    const auto& c = clauses_[r].lits;
    for (std::size_t k = 1; k < c.size(); ++k) {
        const Var v = c[k].var();
        if (!seen_[v] && levels_[v] > 0) return false;
    }
    return true;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(Lit{});
    int path = 0;
    Lit p{};
    bool have_p = false;
    std::size_t idx = trail_.size();
    std::vector<Var> touched;

    do {
        bump_clause(confl);
        const auto& c = clauses_[confl].lits;
        for (std::size_t k = have_p ? 1 : 0; k < c.size(); ++k) {
            const Lit q = c[k];
            const Var v = q.var();
            if (seen_[v] || levels_[v] == 0) continue;
            seen_[v] = 1;
            touched.push_back(v);
            bump_var(v);
            if (levels_[v] >= level())
                ++path;
            else
                learnt.push_back(q);
        }
        do {
            --idx;
        } while (!seen_[trail_[idx].var()]);
        p = trail_[idx];
        have_p = true;
        confl = reasons_[p.var()];
        seen_[p.var()] = 0;
        --path;
    } while (path > 0);
    learnt[0] = ~p;

    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i)
        if (!redundant(learnt[i])) learnt[j++] = learnt[i];
    learnt.resize(j);
    for (Var v : touched) seen_[v] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
        std::size_t max_i = 1;
        for (std::size_t i = 2; i < learnt.size(); ++i)
            if (levels_[learnt[i].var()] > levels_[learnt[max_i].var()]) max_i = i;
        std::swap(learnt[1], learnt[max_i]);
        bt_level = levels_[learnt[1].var()];
    }
}

void Solver::analyze_final(Lit failed) {
    conflict_.clear();
    conflict_.push_back(failed);
    if (level() == 0) return;
    seen_[failed.var()] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
        const Var v = trail_[i].var();
        if (!seen_[v]) continue;
        const int r = reasons_[v];
        if (r == kNoReason) {
            conflict_.push_back(trail_[i]);
        } else {
            const auto& c = clauses_[r].lits;
            for (std::size_t k = 1; k < c.size(); ++k)
                if (levels_[c[k].var()] > 0) seen_[c[k].var()] = 1;
        }
        seen_[v] = 0;
    }
    seen_[failed.var()] = 0;
    std::sort(conflict_.begin(), conflict_.end());
    conflict_.erase(std::unique(conflict_.begin(), conflict_.end()), conflict_.end());
}

void Solver::backtrack(int lvl) {
    if (level() <= lvl) return;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[lvl]; --i) {
        const Var v = trail_[i].var();
        phase_[v] = assigns_[v] == kTrue;
        assigns_[v] = kUndef;
        reasons_[v] = kNoReason;
        if (heap_index_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
    while (!heap_.empty()) {
        const Var v = heap_pop();
        if (assigns_[v] == kUndef) return lit(v, phase_[v]);
    }
    return Lit{};
}

void Solver::bump_var(Var v) {
    if ((activity_[v] += var_inc_) > 1e100) {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) heap_up(heap_index_[v]);
}

void Solver::bump_clause(int cref) {
    auto& c = clauses_[cref];
    if (!c.learnt) return;
    if ((c.activity += clause_inc_) > 1e20) {
        for (auto& cl : clauses_)
            if (cl.learnt) cl.activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

// Called at the root only: drops half of the learnt clauses and rebuilds the database.
void Solver::reduce_db() {
    assert(level() == 0);
    for (const Lit l : trail_) reasons_[l.var()] = kNoReason;

    std::vector<std::pair<double, int>> learnts;
    for (int i = 0; i < static_cast<int>(clauses_.size()); ++i)
        if (clauses_[i].learnt && clauses_[i].lits.size() > 2) learnts.push_back({clauses_[i].activity, i});
    std::sort(learnts.begin(), learnts.end());
    std::vector<bool> drop(clauses_.size(), false);
    for (std::size_t k = 0; k < learnts.size() / 2; ++k) drop[learnts[k].second] = true;

    std::vector<Clause> kept;
    kept.reserve(clauses_.size());
    num_learnts_ = 0;
    num_original_ = 0;
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
        if (drop[i]) continue;
        Clause c = std::move(clauses_[i]);
        bool satisfied = false;
        std::vector<Lit> lits;
        for (const Lit l : c.lits) {
            const auto v = value(l);
            if (v == kTrue) satisfied = true;
            if (v == kUndef) lits.push_back(l);
        }
        if (satisfied) continue;
        assert(lits.size() >= 2);
        c.lits = std::move(lits);
        (c.learnt ? num_learnts_ : num_original_) += 1;
        kept.push_back(std::move(c));
    }
    clauses_ = std::move(kept);
    for (auto& w : watches_) w.clear();
    for (int i = 0; i < static_cast<int>(clauses_.size()); ++i) attach(i);
}

Result Solver::search(std::int64_t conflict_limit, std::span<const Lit> assumptions, const Budget& budget,
                      bool& out_of_budget) {
    std::int64_t local_conflicts = 0;
    std::vector<Lit> learnt;
    for (;;) {
        const int confl = propagate();
        if (confl != kNoReason) {
            ++stats_conflicts_;
            ++local_conflicts;
            if (level() == 0) {
                ok_ = false;
                conflict_.clear();
                return Result::Unsat;
            }
            int bt = 0;
            analyze(confl, learnt, bt);
            backtrack(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], kNoReason);
            } else {
                clauses_.push_back({learnt, true, false, 0.0});
                const int cref = static_cast<int>(clauses_.size()) - 1;
                ++num_learnts_;
                attach(cref);
                bump_clause(cref);
                enqueue(learnt[0], cref);
            }
            var_inc_ /= kVarDecay;
            clause_inc_ /= kClauseDecay;
            continue;
        }

        if (local_conflicts >= conflict_limit) return Result::Unknown;
        if (budget.max_conflicts >= 0 && stats_conflicts_ >= budget.max_conflicts) {
            out_of_budget = true;
            return Result::Unknown;
        }
        if (budget.deadline != std::chrono::steady_clock::time_point::max() && (++decisions_ & 1023) == 0 &&
            std::chrono::steady_clock::now() > budget.deadline) {
            out_of_budget = true;
            return Result::Unknown;
        }

        Lit next{};
        bool decided = false;
        while (level() < static_cast<int>(assumptions.size())) {
            const Lit a = assumptions[level()];
            const auto v = value(a);
            if (v == kTrue) {
                trail_lim_.push_back(static_cast<int>(trail_.size()));
            } else if (v == kFalse) {
                analyze_final(a);
                return Result::Unsat;
            } else {
                next = a;
                decided = true;
                break;
            }
        }
        if (!decided) {
            next = pick_branch();
            if (next.code < 0) return Result::Sat;
        }
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(next, kNoReason);
    }
}

Result Solver::solve(std::span<const Lit> assumptions, const Budget& budget) {
    conflict_.clear();
    if (!ok_) return Result::Unsat;
    if (max_learnts_ == 0) max_learnts_ = static_cast<double>(num_original_) / 3.0 + 2000.0;
    const std::int64_t start_conflicts = stats_conflicts_;
    Budget local = budget;
    if (budget.max_conflicts >= 0) local.max_conflicts = start_conflicts + budget.max_conflicts;

    Result status = Result::Unknown;
    bool out_of_budget = false;
    for (int restart = 0; status == Result::Unknown; ++restart) {
        const auto limit = static_cast<std::int64_t>(luby(2.0, restart) * kRestartBase);
        status = search(limit, assumptions, local, out_of_budget);
        if (status == Result::Sat) {
            model_.assign(num_vars(), false);
            for (Var v = 0; v < num_vars(); ++v) model_[v] = assigns_[v] == kTrue;
        }
        backtrack(0);
        if (out_of_budget && status == Result::Unknown) return status;
        if (status == Result::Unknown && static_cast<double>(num_learnts_) > max_learnts_) {
            if (propagate() != kNoReason) {
                ok_ = false;
                return Result::Unsat;
            }
            reduce_db();
            max_learnts_ *= 1.1;
        }
    }
    return status;
}

// ---------------------------------------------------------------------------

void Solver::heap_insert(Var v) {
    heap_index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_index_[v]);
}

void Solver::heap_up(int i) {
    const Var v = heap_[i];
    while (i > 0) {
        const int parent = (i - 1) >> 1;
        // ties broken by lower variable index for determinism
        const Var pv = heap_[parent];
        if (!(heap_less(v, pv) || (activity_[v] == activity_[pv] && v < pv))) break;
        heap_[i] = pv;
        heap_index_[pv] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = i;
}

void Solver::heap_down(int i) {
    const Var v = heap_[i];
    const int size = static_cast<int>(heap_.size());
    for (;;) {
        int child = 2 * i + 1;
        if (child >= size) break;
        auto better = [&](Var a, Var b) { return heap_less(a, b) || (activity_[a] == activity_[b] && a < b); };
        if (child + 1 < size && better(heap_[child + 1], heap_[child])) ++child;
        if (!better(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_index_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_index_[v] = i;
}

Var Solver::heap_pop() {
    const Var top = heap_[0];
    heap_index_[top] = -1;
    const Var last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_index_[last] = 0;
        heap_down(0);
    }
    return top;
}

}  // namespace aci::sat
