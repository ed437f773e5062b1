#pragma once

// Clause encoding of the ancestral rule system and an exact implicit-hitting-set optimizer
// on top of it. Shared by the solver and scoring front ends.

#include <chrono>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "aci/core.hpp"
#include "aci/rules.hpp"
#include "aci/sat.hpp"

namespace aci::detail {

/// Cores are sets of soft indices that cannot all be satisfied under some set of hard
/// assumptions. A pool is only valid for that set of assumptions (or any superset of it).
using CorePool = std::vector<std::vector<int>>;

struct Outcome {
    enum class Status { Optimal, Infeasible, ExceedsBound };
    Status status = Status::Infeasible;
    std::int64_t cost = 0;
    std::vector<bool> model;

    bool optimal() const { return status == Status::Optimal; }
};

class Optimizer {
public:
    using Clock = std::chrono::steady_clock;

    Optimizer(const std::vector<WeightedInput>& inputs, int n, Clock::time_point deadline);

    /// Minimum total soft weight violated with every literal of `hard` forced true.
    /// With a bound, stops with ExceedsBound once the optimum is known to be above it.
    /// A floor is a lower bound already known to the caller; a model reaching it ends the search.
    /// Throws TimeoutError at the deadline.
    Outcome minimize(const std::vector<sat::Lit>& hard, CorePool& cores,
                     std::optional<std::int64_t> bound = std::nullopt,
                     std::optional<std::int64_t> floor = std::nullopt);

    /// Re-solves to the lexicographically smallest model with the same optimal cost.
    std::vector<bool> smallest_optimal_model(const std::vector<sat::Lit>& hard, const CorePool& cores,
                                             std::int64_t cost, std::vector<bool> model);

    /// Literal that is true exactly when the ancestral statement holds.
    sat::Lit feature_lit(const AncStatement& f) const;
    bool holds(const std::vector<bool>& model, const AncStatement& f) const;

    JointAssignment decode(const std::vector<bool>& model) const;

    void set_deadline(Clock::time_point deadline) { deadline_ = deadline; }

    int n() const { return n_; }
    std::size_t num_softs() const { return softs_.size(); }
    int num_vars() const { return solver_.num_vars(); }

private:
    struct Soft {
        sat::Lit lit;
        std::int64_t weight;
    };

    sat::Var causes_var(VarIndex a, VarIndex b) const { return causes_[a * n_ + b]; }
    std::optional<sat::Var> fact_var(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) const;
    sat::Var new_fact_var(VarIndex a, VarIndex b, CondSet cond, CiPolarity p);

    void build_structure_clauses();
    void build_fact_vars(int max_order);
    void build_rule_clauses(int max_order);
    void add(std::vector<sat::Lit> clause);
    void add_soft(sat::Lit l, std::int64_t w);

    std::vector<int> core_of(const std::vector<sat::Lit>& conflict,
                             const std::unordered_map<int, bool>& hard_codes) const;
    std::vector<int> shrink_core(std::vector<int> core, const std::vector<sat::Lit>& hard,
                                 const std::unordered_map<int, bool>& hard_codes);
    [[noreturn]] void timeout(std::optional<std::int64_t> upper_bound) const;

    int n_;
    Clock::time_point deadline_;
    sat::Solver solver_;
    std::vector<sat::Var> causes_;
    std::unordered_map<std::uint64_t, sat::Var> facts_;
    std::vector<CiTriple> input_triples_;  // sorted, distinct
    std::vector<sat::Var> input_dep_var_;
    std::vector<Soft> softs_;
    std::unordered_map<int, int> soft_by_code_;
    bool hard_conflict_ = false;
};

}  // namespace aci::detail
