#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aci/core.hpp"
#include "aci/solver.hpp"

namespace aci {

/// Difference of two minimum losses: finite milli-units, or +/- infinity when one side is
/// infeasible.
class Score {
public:
    static Score finite(std::int64_t v) { return Score(Kind::Finite, v); }
    static Score pos_inf() { return Score(Kind::PosInf, 0); }
    static Score neg_inf() { return Score(Kind::NegInf, 0); }

    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_pos_inf() const { return kind_ == Kind::PosInf; }
    bool is_neg_inf() const { return kind_ == Kind::NegInf; }
    std::int64_t value() const;
    /// Finite value as a double, +/- infinity otherwise.
    double as_double() const;

    Score operator-() const;
    friend bool operator==(Score, Score) = default;
    friend std::strong_ordering operator<=>(Score a, Score b);

    /// "inf", "-inf" or the integer value.
    std::string to_string() const;
    /// Inverse of to_string; throws InvalidArgument.
    static Score parse(const std::string& text);

private:
    enum class Kind : std::uint8_t { NegInf, Finite, PosInf };
    Score(Kind k, std::int64_t v) : kind_(k), value_(v) {}
    Kind kind_;
    std::int64_t value_;
};

struct Prediction {
    VarIndex cause = 0;
    VarIndex effect = 1;
    Score score = Score::finite(0);
};

/// Both forced solves are infeasible: the Hard inputs contradict each other.
class BothInfeasibleError : public Error {
public:
    using Error::Error;
};

class NoConsistentModelError : public Error {
public:
    using Error::Error;
};

/// minLoss(inputs + Hard not f) - minLoss(inputs + Hard f).
/// options.forced_features is ignored; the time limit applies to each solve.
Score confidence(const std::vector<WeightedInput>& inputs, int n, const AncStatement& feature,
                 const SolveOptions& options = {});

/// Score of causes(x, y) for every ordered pair, sorted by score descending, ties by
/// (cause, effect). Throws TimeoutError when any pair runs out of time.
std::vector<Prediction> score_all_pairs(const std::vector<WeightedInput>& inputs, int n,
                                        const SolveOptions& options = {});

struct PairScores {
    std::vector<Prediction> predictions;  // sorted as in score_all_pairs
    std::vector<std::pair<VarIndex, VarIndex>> timed_out;
};

/// Like score_all_pairs but keeps the pairs that finished when others time out.
/// Throws BothInfeasibleError when the inputs themselves are infeasible.
PairScores score_all_pairs_partial(const std::vector<WeightedInput>& inputs, int n,
                                   const SolveOptions& options = {});

enum class Identifiability { True, False, Unknown };

std::string to_string(Identifiability v);

inline constexpr int kOracleMaxVariables = 5;

/// Enumerates every consistent joint assignment of the Hard inputs and reports whether the
/// feature holds in all (True), none (False) or some (Unknown) of them.
/// Throws InvalidArgument for finite-weight inputs, GuardError above kOracleMaxVariables and
/// NoConsistentModelError when nothing is consistent.
Identifiability identifiability_oracle(const std::vector<WeightedInput>& hard_inputs, int n,
                                       const AncStatement& feature);

}  // namespace aci
