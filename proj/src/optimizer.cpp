#include "optimizer.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <limits>
#include <set>
#include <stdexcept>

#include "aci/solver.hpp"
#include "hitting_set.hpp"

namespace aci::detail {

namespace {

using sat::Lit;

std::uint64_t fact_key(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(cond.bits()) |
           (static_cast<std::uint64_t>(p == CiPolarity::Dependent) << 31) |
           (static_cast<std::uint64_t>(b) << 32) | (static_cast<std::uint64_t>(a) << 37);
}

// Calls fn(subset) for every subset of `mask` with at most max_size members.
template <typename Fn>
void for_each_small_subset(std::uint32_t mask, int max_size, std::uint32_t acc, Fn& fn) {
    fn(CondSet(acc));
    if (max_size == 0) return;
    for (std::uint32_t b = mask; b != 0; b &= b - 1) {
        const std::uint32_t bit = b & (~b + 1);
        // members strictly above the chosen one keep each subset unique
        const std::uint32_t rest = mask & ~((bit << 1) - 1);
        for_each_small_subset(rest, max_size - 1, acc | bit, fn);
    }
}

}  // namespace

Optimizer::Optimizer(const std::vector<WeightedInput>& inputs, int n, Clock::time_point deadline)
    : n_(n), deadline_(deadline) {
    validate_inputs(inputs, n);
    total_finite_weight(inputs);  // throws OverflowError

    causes_.assign(n * n, -1);
    for (VarIndex a = 0; a < n; ++a)
        for (VarIndex b = 0; b < n; ++b)
            if (a != b) causes_[a * n + b] = solver_.new_var();
    build_structure_clauses();

    int max_order = -1;
    std::set<CiTriple> triples;
    for (const auto& in : inputs)
        if (in.is_ci()) {
            triples.insert(in.ci().triple);
            max_order = std::max(max_order, in.ci().triple.order());
        }
    if (max_order >= 0) {
        build_fact_vars(max_order);
        build_rule_clauses(max_order);
    }
    input_triples_.assign(triples.begin(), triples.end());
    for (const auto& t : input_triples_) {
        const sat::Var d = *fact_var(t.x, t.y, t.cond, CiPolarity::Dependent);
        const sat::Var i = *fact_var(t.x, t.y, t.cond, CiPolarity::Independent);
        input_dep_var_.push_back(d);
        add({sat::pos(d), sat::pos(i)});
        add({sat::neg(d), sat::neg(i)});
    }

    std::vector<std::pair<Lit, std::int64_t>> soft;
    for (const auto& in : inputs) {
        Lit l;
        if (in.is_ci()) {
            const auto& s = in.ci();
            l = sat::pos(*fact_var(s.triple.x, s.triple.y, s.triple.cond, s.polarity));
        } else {
            l = feature_lit(in.anc());
        }
        if (in.weight.is_hard())
            add({l});
        else if (in.weight.value() > 0)
            add_soft(l, in.weight.value());
    }
}

void Optimizer::add(std::vector<Lit> clause) {
    if (!solver_.add_clause(std::move(clause))) hard_conflict_ = true;
}

void Optimizer::add_soft(Lit l, std::int64_t w) {
    auto it = soft_by_code_.find(l.code);
    if (it != soft_by_code_.end()) {
        softs_[it->second].weight = checked_add(softs_[it->second].weight, w);
        return;
    }
    soft_by_code_[l.code] = static_cast<int>(softs_.size());
    softs_.push_back({l, w});
}

void Optimizer::build_structure_clauses() {
    for (VarIndex a = 0; a < n_; ++a)
        for (VarIndex b = a + 1; b < n_; ++b) add({sat::neg(causes_var(a, b)), sat::neg(causes_var(b, a))});
    for (VarIndex a = 0; a < n_; ++a)
        for (VarIndex b = 0; b < n_; ++b)
            for (VarIndex d = 0; d < n_; ++d)
                if (a != b && b != d && a != d)
                    add({sat::neg(causes_var(a, b)), sat::neg(causes_var(b, d)), sat::pos(causes_var(a, d))});
}

std::optional<sat::Var> Optimizer::fact_var(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) const {
    auto it = facts_.find(fact_key(a, b, cond, p));
    if (it == facts_.end()) return std::nullopt;
    return it->second;
}

sat::Var Optimizer::new_fact_var(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) {
    const sat::Var v = solver_.new_var();
    facts_[fact_key(a, b, cond, p)] = v;
    return v;
}

// Independence facts never exceed the largest input order; dependence facts exceed it by at
// most one (only the collider rule adds a conditioning variable).
void Optimizer::build_fact_vars(int max_order) {
    const std::uint32_t all = (n_ >= 32) ? ~0u : ((1u << n_) - 1);
    for (VarIndex x = 0; x < n_; ++x)
        for (VarIndex y = x + 1; y < n_; ++y) {
            const std::uint32_t others = all & ~((1u << x) | (1u << y));
            auto make = [&](CondSet w) {
                new_fact_var(x, y, w, CiPolarity::Dependent);
                if (w.size() <= max_order) new_fact_var(x, y, w, CiPolarity::Independent);
            };
            for_each_small_subset(others, max_order + 1, 0u, make);
        }
}

void Optimizer::build_rule_clauses(int max_order) {
    using P = CiPolarity;
    const std::uint32_t all = (n_ >= 32) ? ~0u : ((1u << n_) - 1);
    auto need = [&](VarIndex a, VarIndex b, CondSet s, P p) {
        auto v = fact_var(a, b, s, p);
        if (!v) throw std::logic_error("derived fact outside the encoded universe");
        return *v;
    };

    for (VarIndex x = 0; x < n_; ++x)
        for (VarIndex y = x + 1; y < n_; ++y) {
            const std::uint32_t others = all & ~((1u << x) | (1u << y));
            auto per_set = [&](CondSet w) {
                const auto dw = fact_var(x, y, w, P::Dependent);
                const auto iw = fact_var(x, y, w, P::Independent);
                if (iw) {
                    // independence excludes x => y unless x causes part of the conditioning set
                    for (auto [a, b] : {std::pair{x, y}, std::pair{y, x}}) {
                        std::vector<Lit> c{sat::neg(*iw), sat::neg(causes_var(a, b))};
                        for_each_member(w, [&](VarIndex u) { c.push_back(sat::pos(causes_var(a, u))); });
                        add(std::move(c));
                    }
                }
                for (std::uint32_t zb = others & ~w.bits(); zb != 0; zb &= zb - 1) {
                    const VarIndex z = std::countr_zero(zb);
                    const CondSet u = w.with(z);
                    const auto du = fact_var(x, y, u, P::Dependent);
                    const auto iu = fact_var(x, y, u, P::Independent);

                    if (dw && iu) {
                        // minimal independence: z causes x, y or a member of w
                        std::vector<Lit> c{sat::neg(*dw), sat::neg(*iu), sat::pos(causes_var(z, x)),
                                           sat::pos(causes_var(z, y))};
                        for_each_member(w, [&](VarIndex m) { c.push_back(sat::pos(causes_var(z, m))); });
                        add(std::move(c));
                        add({sat::neg(*dw), sat::neg(*iu), sat::pos(need(x, z, w, P::Dependent))});
                        add({sat::neg(*dw), sat::neg(*iu), sat::pos(need(y, z, w, P::Dependent))});
                        for (auto [xx, yy] : {std::pair{x, y}, std::pair{y, x}}) {
                            for (std::uint32_t bb = others & ~w.bits() & ~(1u << z); bb != 0; bb &= bb - 1) {
                                const CondSet wb = w.with(std::countr_zero(bb));
                                const auto ixz = fact_var(xx, z, wb, P::Independent);
                                const auto ixy = fact_var(xx, yy, wb, P::Independent);
                                if (ixz && ixy)
                                    add({sat::neg(*dw), sat::neg(*iu), sat::neg(*ixz), sat::pos(*ixy)});
                            }
                        }
                    }
                    if (iw && du) {
                        // minimal dependence: z causes none of x, y, w
                        for (VarIndex t : {x, y}) add({sat::neg(*iw), sat::neg(*du), sat::neg(causes_var(z, t))});
                        for_each_member(w, [&](VarIndex m) {
                            add({sat::neg(*iw), sat::neg(*du), sat::neg(causes_var(z, m))});
                        });
                        add({sat::neg(*iw), sat::neg(*du), sat::pos(need(x, z, w, P::Dependent))});
                        add({sat::neg(*iw), sat::neg(*du), sat::pos(need(y, z, w, P::Dependent))});
                        // collider
                        const auto dzx = fact_var(z, x, w, P::Dependent);
                        const auto dzy = fact_var(z, y, w, P::Dependent);
                        if (dzx && dzy) add({sat::neg(*dzx), sat::neg(*dzy), sat::neg(*iw), sat::pos(*du)});
                    }
                }
            };
            for_each_small_subset(others, max_order + 1, 0u, per_set);
        }
}

Lit Optimizer::feature_lit(const AncStatement& f) const {
    const sat::Var v = causes_var(f.cause, f.effect);
    return f.polarity == AncPolarity::Causes ? sat::pos(v) : sat::neg(v);
}

bool Optimizer::holds(const std::vector<bool>& model, const AncStatement& f) const {
    const Lit l = feature_lit(f);
    return model[l.var()] != l.negated();
}

JointAssignment Optimizer::decode(const std::vector<bool>& model) const {
    std::vector<std::uint32_t> rows(n_);
    for (VarIndex a = 0; a < n_; ++a) {
        rows[a] = 1u << a;
        for (VarIndex b = 0; b < n_; ++b)
            if (a != b && model[causes_var(a, b)]) rows[a] |= 1u << b;
    }
    std::map<CiTriple, CiPolarity> truth;
    for (std::size_t k = 0; k < input_triples_.size(); ++k)
        truth[input_triples_[k]] = model[input_dep_var_[k]] ? CiPolarity::Dependent : CiPolarity::Independent;
    return {AncestralStructure::from_rows(std::move(rows)), make_ci_assignment(n_, std::move(truth))};
}

void Optimizer::timeout(std::optional<std::int64_t> upper_bound) const {
    std::optional<Weight> ub;
    if (upper_bound) ub = Weight::finite(*upper_bound);
    throw TimeoutError("time limit reached before the optimum was proven", ub);
}

std::vector<int> Optimizer::core_of(const std::vector<Lit>& conflict,
                                    const std::unordered_map<int, bool>& hard_codes) const {
    std::vector<int> core;
    for (const Lit l : conflict) {
        if (hard_codes.count(l.code)) continue;
        auto it = soft_by_code_.find(l.code);
        if (it != soft_by_code_.end()) core.push_back(it->second);
    }
    std::sort(core.begin(), core.end());
    return core;
}

// Deletion-based shrinking with a small conflict budget per probe.
std::vector<int> Optimizer::shrink_core(std::vector<int> core, const std::vector<Lit>& hard,
                                        const std::unordered_map<int, bool>& hard_codes) {
    constexpr std::int64_t kProbeConflicts = 200;
    std::vector<int> order = core;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return softs_[a].weight > softs_[b].weight; });
    for (int e : order) {
        if (core.size() <= 1) break;
        if (!std::binary_search(core.begin(), core.end(), e)) continue;
        std::vector<Lit> assumptions = hard;
        for (int k : core)
            if (k != e) assumptions.push_back(softs_[k].lit);
        const auto r = solver_.solve(assumptions, sat::Budget{kProbeConflicts, deadline_});
        if (r == sat::Result::Unsat) {
            auto smaller = core_of(solver_.conflict(), hard_codes);
            if (smaller.empty()) return smaller;
            core = std::move(smaller);
        }
    }
    return core;
}

Outcome Optimizer::minimize(const std::vector<Lit>& hard, CorePool& cores, std::optional<std::int64_t> bound,
                            std::optional<std::int64_t> floor) {
    Outcome out;
    if (hard_conflict_) return out;

    std::unordered_map<int, bool> hard_codes;
    for (const Lit l : hard) hard_codes[l.code] = true;

    std::vector<ElementState> state(softs_.size(), ElementState::Free);
    std::vector<std::int64_t> weights(softs_.size());
    std::int64_t fixed_cost = 0;
    for (std::size_t k = 0; k < softs_.size(); ++k) {
        weights[k] = softs_[k].weight;
        if (hard_codes.count(softs_[k].lit.code)) state[k] = ElementState::NeverIn;
        if (hard_codes.count((~softs_[k].lit).code)) {
            state[k] = ElementState::AlwaysIn;
            fixed_cost += softs_[k].weight;
        }
    }

    std::optional<std::int64_t> upper;
    std::vector<bool> best_model;
    auto model_cost = [&](const std::vector<bool>& m) {
        std::int64_t c = 0;
        for (const auto& s : softs_)
            if (m[s.lit.var()] == s.lit.negated()) c += s.weight;
        return c;
    };

    // Cheap phases hit the cores greedily and only harvest more cores; an exact hitting set is
    // computed once a greedy one turns out satisfiable. Only exact sets give lower bounds.
    bool exact = true;
    for (;;) {
        if (Clock::now() > deadline_) timeout(upper);
        std::optional<HittingSet> hs;
        try {
            hs = min_hitting_set(cores, weights, state, deadline_, exact);
        } catch (const std::runtime_error&) {
            timeout(upper);
        }
        if (!hs) return out;  // some core consists of satisfied-by-force softs only
        if (exact) {
            const std::int64_t lower = fixed_cost + hs->cost;
            if (bound && lower > *bound) {
                out.status = Outcome::Status::ExceedsBound;
                return out;
            }
            if (upper && lower >= *upper) break;
        }

        std::vector<bool> relaxed(softs_.size(), false);
        for (int e : hs->elements) relaxed[e] = true;
        bool new_cores = false;
        for (;;) {
            std::vector<Lit> assumptions = hard;
            for (std::size_t k = 0; k < softs_.size(); ++k)
                if (state[k] == ElementState::Free && !relaxed[k]) assumptions.push_back(softs_[k].lit);
            const auto r = solver_.solve(assumptions, sat::Budget{-1, deadline_});
            if (r == sat::Result::Unknown) timeout(upper);
            if (r == sat::Result::Sat) {
                const std::int64_t c = model_cost(solver_.model());
                if (!upper || c < *upper) {
                    upper = c;
                    best_model = solver_.model();
                }
                break;
            }
            auto core = core_of(solver_.conflict(), hard_codes);
            if (core.empty()) return out;  // hard assumptions alone are contradictory
            core = shrink_core(std::move(core), hard, hard_codes);
            if (core.empty()) return out;
            cores.push_back(core);
            new_cores = true;
            // keep going without the cheapest member to harvest more cores per hitting set
            int cheapest = core.front();
            for (int e : core)
                if (weights[e] < weights[cheapest]) cheapest = e;
            relaxed[cheapest] = true;
        }
        if (floor && *upper <= *floor) break;
        if (!new_cores) {
            if (exact) break;  // the optimal hitting set was directly satisfiable
            exact = true;
        } else {
            exact = false;
        }
    }

    out.status = Outcome::Status::Optimal;
    out.cost = *upper;
    out.model = std::move(best_model);
    if (bound && out.cost > *bound) out.status = Outcome::Status::ExceedsBound;
    return out;
}

std::vector<bool> Optimizer::smallest_optimal_model(const std::vector<Lit>& hard, const CorePool& cores,
                                                    std::int64_t cost, std::vector<bool> model) {
    std::vector<Lit> prefix = hard;
    CorePool pool = cores;
    std::vector<sat::Var> bits;
    for (VarIndex a = 0; a < n_; ++a)
        for (VarIndex b = 0; b < n_; ++b)
            if (a != b) bits.push_back(causes_var(a, b));
    bits.insert(bits.end(), input_dep_var_.begin(), input_dep_var_.end());

    for (const sat::Var v : bits) {
        if (!model[v]) {
            prefix.push_back(sat::neg(v));
            continue;
        }
        std::vector<Lit> trial = prefix;
        trial.push_back(sat::neg(v));
        CorePool trial_pool = pool;
        // forcing more literals can only raise the optimum, so `cost` is a floor here
        Outcome r = minimize(trial, trial_pool, cost, cost);
        if (r.optimal() && r.cost == cost) {
            prefix = std::move(trial);
            pool = std::move(trial_pool);
            model = std::move(r.model);
        } else {
            prefix.push_back(sat::pos(v));
        }
    }
    return model;
}

}  // namespace aci::detail
