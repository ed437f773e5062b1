#pragma once

// Small deterministic CDCL SAT solver with assumption-based core extraction.
// Internal to the optimizer; not part of the public surface.

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

namespace aci::sat {

using Var = int;

struct Lit {
    int code = -2;  // 2 * var + negated

    constexpr Var var() const { return code >> 1; }
    constexpr bool negated() const { return code & 1; }
    constexpr Lit operator~() const { return Lit{code ^ 1}; }
    friend constexpr bool operator==(Lit, Lit) = default;
    friend constexpr auto operator<=>(Lit, Lit) = default;
};

constexpr Lit pos(Var v) { return Lit{2 * v}; }
constexpr Lit neg(Var v) { return Lit{2 * v + 1}; }
constexpr Lit lit(Var v, bool value) { return value ? pos(v) : neg(v); }

enum class Result { Sat, Unsat, Unknown };

struct Budget {
    std::int64_t max_conflicts = -1;  // negative: unlimited
    std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

class Solver {
public:
    Var new_var();
    int num_vars() const { return static_cast<int>(assigns_.size()); }

    /// Adds a permanent clause. Returns false once the clause set is unsatisfiable at the root.
    bool add_clause(std::vector<Lit> lits);

    /// Solves under assumptions. On Unsat, conflict() holds a subset of the assumptions that
    /// cannot all be true (empty when the clauses alone are unsatisfiable).
    Result solve(std::span<const Lit> assumptions, const Budget& budget = {});

    bool model_value(Var v) const { return model_[v]; }
    bool model_value(Lit l) const { return model_[l.var()] != l.negated(); }
    const std::vector<bool>& model() const { return model_; }
    const std::vector<Lit>& conflict() const { return conflict_; }

    std::int64_t conflicts() const { return stats_conflicts_; }

private:
    enum : std::uint8_t { kTrue = 0, kFalse = 1, kUndef = 2 };
    static constexpr int kNoReason = -1;

    struct Clause {
        std::vector<Lit> lits;
        bool learnt = false;
        bool deleted = false;
        double activity = 0.0;
    };
    struct Watcher {
        int cref;
        Lit blocker;
    };

    std::uint8_t value(Lit l) const {
        const std::uint8_t a = assigns_[l.var()];
        return a == kUndef ? static_cast<std::uint8_t>(kUndef) : static_cast<std::uint8_t>(a ^ static_cast<std::uint8_t>(l.negated()));
    }
    int level() const { return static_cast<int>(trail_lim_.size()); }

    void attach(int cref);
    void enqueue(Lit l, int reason);
    int propagate();
    void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
    bool redundant(Lit l) const;
    void analyze_final(Lit failed);
    void backtrack(int lvl);
    Lit pick_branch();
    void bump_var(Var v);
    void bump_clause(int cref);
    void reduce_db();
    Result search(std::int64_t conflict_limit, std::span<const Lit> assumptions, const Budget& budget,
                  bool& out_of_budget);

    // heap on activity
    void heap_insert(Var v);
    void heap_up(int i);
    void heap_down(int i);
    Var heap_pop();
    bool heap_less(Var a, Var b) const { return activity_[a] > activity_[b]; }

    std::vector<Clause> clauses_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<std::uint8_t> assigns_;
    std::vector<int> levels_;
    std::vector<int> reasons_;
    std::vector<bool> phase_;
    std::vector<double> activity_;
    std::vector<int> heap_;
    std::vector<int> heap_index_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    std::vector<std::uint8_t> seen_;

    std::vector<bool> model_;
    std::vector<Lit> conflict_;

    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    std::size_t num_learnts_ = 0;
    std::size_t num_original_ = 0;
    double max_learnts_ = 0;
    bool ok_ = true;
    std::int64_t stats_conflicts_ = 0;
    std::uint64_t decisions_ = 0;
};

}  // namespace aci::sat
