#include "aci/solver.hpp"

#include <chrono>
#include <set>

#include "optimizer.hpp"

namespace aci {

namespace {

std::chrono::steady_clock::time_point deadline_after(double seconds) {
    const auto now = std::chrono::steady_clock::now();
    if (!(seconds < 1e9)) return std::chrono::steady_clock::time_point::max();
    return now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(std::max(seconds, 0.0)));
}

}  // namespace

int compare_witness(const JointAssignment& a, const JointAssignment& b) {
    const auto s = compare_row_major(a.structure, b.structure);
    if (s != 0) return s < 0 ? -1 : 1;
    auto ia = a.ci.truth.begin();
    auto ib = b.ci.truth.begin();
    for (; ia != a.ci.truth.end() && ib != b.ci.truth.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        if (ia->second != ib->second) return ia->second == CiPolarity::Independent ? -1 : 1;
    }
    if (ia != a.ci.truth.end()) return 1;
    if (ib != b.ci.truth.end()) return -1;
    return 0;
}

SolveResult solve_min_loss(const std::vector<WeightedInput>& inputs, int n, const SolveOptions& options) {
    if (n < 1 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    if (n > kSolverVariableGuard && !options.allow_large_n)
        throw GuardError("more than " + std::to_string(kSolverVariableGuard) +
                         " variables; set allow_large_n to proceed");
    for (const auto& [f, holds] : options.forced_features)
        if (f.cause < 0 || f.effect < 0 || f.cause >= n || f.effect >= n || f.cause == f.effect)
            throw InvalidArgument("forced feature references an invalid pair");

    detail::Optimizer opt(inputs, n, deadline_after(options.time_limit_seconds));
    std::vector<sat::Lit> hard;
    for (const auto& [f, holds] : options.forced_features) {
        const sat::Lit l = opt.feature_lit(f);
        hard.push_back(holds ? l : ~l);
    }
    detail::CorePool cores;
    auto out = opt.minimize(hard, cores);
    if (!out.optimal()) return {Weight::hard(), std::nullopt};
    auto model = options.canonical_witness ? opt.smallest_optimal_model(hard, cores, out.cost, out.model)
                                           : out.model;
    return {Weight::finite(out.cost), opt.decode(model)};
}

SolveResult brute_force_min_loss(const std::vector<WeightedInput>& inputs, int n) {
    if (n < 1 || n > kBruteForceMaxVariables)
        throw GuardError("brute force is limited to " + std::to_string(kBruteForceMaxVariables) + " variables");
    validate_inputs(inputs, n);
    total_finite_weight(inputs);

    std::set<CiTriple> distinct;
    for (const auto& in : inputs)
        if (in.is_ci()) distinct.insert(in.ci().triple);
    if (distinct.size() > kBruteForceMaxInputs)
        throw GuardError("brute force is limited to " + std::to_string(kBruteForceMaxInputs) + " distinct triples");
    const std::vector<CiTriple> triples(distinct.begin(), distinct.end());
    const auto structures = enumerate_ancestral_structures(n);

    std::optional<JointAssignment> best;
    Weight best_loss = Weight::hard();
    const std::uint32_t choices = 1u << triples.size();
    for (std::uint32_t mask = 0; mask < choices; ++mask) {
        std::map<CiTriple, CiPolarity> truth;
        for (std::size_t k = 0; k < triples.size(); ++k)
            truth[triples[k]] = ((mask >> k) & 1u) ? CiPolarity::Dependent : CiPolarity::Independent;
        FactSet seeds;
        for (const auto& [t, p] : truth) seeds.insert({t, p});
        const auto closure = derive_closure(n, seeds);
        const auto constraints = constraints_from_facts(n, truth, closure);
        if (constraints.incoherent) continue;

        std::optional<CiAssignment> ci;
        for (const auto& s : structures) {
            if (!constraints.satisfied_by(s)) continue;
            if (!ci) ci = make_ci_assignment(n, truth);
            JointAssignment joint{s, *ci};
            const Weight l = loss(joint, inputs);
            if (l.is_hard()) continue;
            if (!best || l < best_loss || (l == best_loss && compare_witness(joint, *best) < 0)) {
                best_loss = l;
                best = std::move(joint);
            }
        }
    }
    return {best_loss, best};
}

}  // namespace aci
