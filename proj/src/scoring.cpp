#include "aci/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "optimizer.hpp"

namespace aci {

std::int64_t Score::value() const {
    if (!is_finite()) throw std::logic_error("value() called on an infinite score");
    return value_;
}

double Score::as_double() const {
    if (is_pos_inf()) return std::numeric_limits<double>::infinity();
    if (is_neg_inf()) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(value_);
}

Score Score::operator-() const {
    switch (kind_) {
        case Kind::PosInf: return neg_inf();
        case Kind::NegInf: return pos_inf();
        default: return finite(-value_);
    }
}

std::strong_ordering operator<=>(Score a, Score b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.value_ <=> b.value_;
}

std::string Score::to_string() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    return std::to_string(value_);
}

Score Score::parse(const std::string& text) {
    if (text == "inf" || text == "+inf") return pos_inf();
    if (text == "-inf") return neg_inf();
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return finite(v);
    } catch (const std::exception&) {
    }
    throw InvalidArgument("not a score: '" + text + "'");
}

std::string to_string(Identifiability v) {
    switch (v) {
        case Identifiability::True: return "true";
        case Identifiability::False: return "false";
        default: return "unknown";
    }
}

namespace {

using Clock = std::chrono::steady_clock;

Clock::time_point deadline_after(double seconds) {
    if (!(seconds < 1e9)) return Clock::time_point::max();
    return Clock::now() +
           std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(std::max(seconds, 0.0)));
}

void check_size(int n, const SolveOptions& options) {
    if (n < 1 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    if (n > kSolverVariableGuard && !options.allow_large_n)
        throw GuardError("more than " + std::to_string(kSolverVariableGuard) +
                         " variables; set allow_large_n to proceed");
}

// The unconstrained optimum. One of the two forced solves of every feature coincides with it:
// the side the optimal model already satisfies.
struct Baseline {
    std::int64_t cost = 0;
    std::vector<bool> model;
    detail::CorePool cores;
};

Baseline solve_baseline(detail::Optimizer& opt, double time_limit) {
    opt.set_deadline(deadline_after(time_limit));
    Baseline base;
    auto out = opt.minimize({}, base.cores);
    if (!out.optimal()) throw BothInfeasibleError("the Hard inputs admit no consistent model");
    base.cost = out.cost;
    base.model = std::move(out.model);
    return base;
}

Score score_feature(detail::Optimizer& opt, const Baseline& base, const AncStatement& f, double time_limit) {
    const sat::Lit l = opt.feature_lit(f);
    const bool holds = opt.holds(base.model, f);
    opt.set_deadline(deadline_after(time_limit));
    detail::CorePool pool = base.cores;  // still valid under the extra assumption
    const auto other = opt.minimize({holds ? ~l : l}, pool);
    if (!other.optimal()) return holds ? Score::pos_inf() : Score::neg_inf();
    // loss with f forced false minus loss with f forced true
    return holds ? Score::finite(other.cost - base.cost) : Score::finite(base.cost - other.cost);
}

void sort_predictions(std::vector<Prediction>& p) {
    std::sort(p.begin(), p.end(), [](const Prediction& a, const Prediction& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::pair(a.cause, a.effect) < std::pair(b.cause, b.effect);
    });
}

}  // namespace

Score confidence(const std::vector<WeightedInput>& inputs, int n, const AncStatement& feature,
                 const SolveOptions& options) {
    check_size(n, options);
    if (feature.cause < 0 || feature.effect < 0 || feature.cause >= n || feature.effect >= n ||
        feature.cause == feature.effect)
        throw InvalidArgument("feature references an invalid pair");
    detail::Optimizer opt(inputs, n, Clock::time_point::max());
    const auto base = solve_baseline(opt, options.time_limit_seconds);
    return score_feature(opt, base, feature, options.time_limit_seconds);
}

PairScores score_all_pairs_partial(const std::vector<WeightedInput>& inputs, int n, const SolveOptions& options) {
    check_size(n, options);
    std::vector<std::pair<VarIndex, VarIndex>> pairs;
    for (VarIndex x = 0; x < n; ++x)
        for (VarIndex y = 0; y < n; ++y)
            if (x != y) pairs.push_back({x, y});

    PairScores result;
    auto first = std::make_unique<detail::Optimizer>(inputs, n, Clock::time_point::max());
    Baseline base;
    try {
        base = solve_baseline(*first, options.time_limit_seconds);
    } catch (const TimeoutError&) {
        result.timed_out = pairs;
        return result;
    }

    std::vector<std::optional<Score>> scores(pairs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto work = [&](detail::Optimizer* opt) {
        std::unique_ptr<detail::Optimizer> own;
        try {
            if (!opt) {
                own = std::make_unique<detail::Optimizer>(inputs, n, Clock::time_point::max());
                opt = own.get();
            }
            for (std::size_t k = next++; k < pairs.size(); k = next++) {
                try {
                    scores[k] = score_feature(*opt, base, causes(pairs[k].first, pairs[k].second),
                                              options.time_limit_seconds);
                } catch (const TimeoutError&) {
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    const int threads = std::clamp(options.thread_count, 1, static_cast<int>(std::max<std::size_t>(pairs.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work, nullptr);
    work(first.get());
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);

    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (scores[k])
            result.predictions.push_back({pairs[k].first, pairs[k].second, *scores[k]});
        else
            result.timed_out.push_back(pairs[k]);
    }
    sort_predictions(result.predictions);
    return result;
}

std::vector<Prediction> score_all_pairs(const std::vector<WeightedInput>& inputs, int n, const SolveOptions& options) {
    auto r = score_all_pairs_partial(inputs, n, options);
    if (!r.timed_out.empty())
        throw TimeoutError(std::to_string(r.timed_out.size()) + " pair(s) ran out of time", std::nullopt);
    return std::move(r.predictions);
}

Identifiability identifiability_oracle(const std::vector<WeightedInput>& hard_inputs, int n,
                                       const AncStatement& feature) {
    if (n < 1 || n > kOracleMaxVariables)
        throw GuardError("the identifiability oracle is limited to " + std::to_string(kOracleMaxVariables) +
                         " variables");
    validate_inputs(hard_inputs, n);
    if (feature.cause < 0 || feature.effect < 0 || feature.cause >= n || feature.effect >= n ||
        feature.cause == feature.effect)
        throw InvalidArgument("feature references an invalid pair");

    // With every input Hard, each input triple must take its stated polarity.
    std::map<CiTriple, CiPolarity> truth;
    std::vector<AncStatement> anc;
    for (const auto& in : hard_inputs) {
        if (!in.weight.is_hard()) throw InvalidArgument("the identifiability oracle takes Hard inputs only");
        if (!in.is_ci()) {
            anc.push_back(in.anc());
            continue;
        }
        auto [it, fresh] = truth.emplace(in.ci().triple, in.ci().polarity);
        if (!fresh && it->second != in.ci().polarity)
            throw NoConsistentModelError("an input triple is stated with both polarities");
    }
    const CiAssignment ci = make_ci_assignment(n, truth);

    bool some_true = false;
    bool some_false = false;
    for_each_ancestral_structure(n, [&](const AncestralStructure& s) {
        for (const auto& a : anc)
            if (s.reaches(a.cause, a.effect) != (a.polarity == AncPolarity::Causes)) return true;
        if (!check_consistency(s, ci)) return true;
        const bool holds = s.reaches(feature.cause, feature.effect) == (feature.polarity == AncPolarity::Causes);
        (holds ? some_true : some_false) = true;
        return !(some_true && some_false);
    });
    if (!some_true && !some_false) throw NoConsistentModelError("no consistent joint assignment");
    if (some_true && some_false) return Identifiability::Unknown;
    return some_true ? Identifiability::True : Identifiability::False;
}

}  // namespace aci
