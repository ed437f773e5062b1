#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aci/core.hpp"
#include "aci/rules.hpp"

namespace aci {

/// Instances above this many variables are refused unless SolveOptions::allow_large_n is set.
inline constexpr int kSolverVariableGuard = 12;

struct SolveOptions {
    /// Each (feature, holds) pair is imposed as a hard constraint: the feature when holds is
    /// true, its negation otherwise.
    std::vector<std::pair<AncStatement, bool>> forced_features;
    double time_limit_seconds = 3600.0;
    /// Worker threads for independent solves (used by pair scoring).
    int thread_count = 1;
    bool allow_large_n = false;
    /// Refine the witness to the lexicographically smallest optimum. Costs extra solves.
    bool canonical_witness = true;
};

struct SolveResult {
    /// Hard when no consistent assignment satisfies the hard inputs.
    Weight min_loss;
    std::optional<JointAssignment> witness;

    bool feasible() const { return !min_loss.is_hard(); }
};

class TimeoutError : public Error {
public:
    TimeoutError(const std::string& what, std::optional<Weight> upper_bound)
        : Error(what), upper_bound_(upper_bound) {}
    /// Best loss found before the time limit, if any.
    std::optional<Weight> upper_bound() const { return upper_bound_; }

private:
    std::optional<Weight> upper_bound_;
};

/// Exact minimum loss over all consistent joint assignments.
///
/// Ties are broken towards the lexicographically smallest witness: the structure matrix read
/// row-major (false before true), then the chosen polarity of each distinct input triple in
/// ascending triple order (Independent before Dependent).
///
/// Throws TimeoutError when time_limit_seconds elapses, OverflowError when the finite weights
/// do not sum within 64 bits, GuardError for n above the guard, InvalidArgument on bad inputs.
SolveResult solve_min_loss(const std::vector<WeightedInput>& inputs, int n, const SolveOptions& options = {});

inline constexpr int kBruteForceMaxVariables = 4;
inline constexpr int kBruteForceMaxInputs = 16;

/// Exhaustive reference: every ancestral structure times every polarity choice for the
/// distinct input triples, filtered by check_consistency. Same tie-breaking as solve_min_loss.
SolveResult brute_force_min_loss(const std::vector<WeightedInput>& inputs, int n);

/// Ordering used for witness tie-breaking. Negative when a precedes b.
int compare_witness(const JointAssignment& a, const JointAssignment& b);

}  // namespace aci
