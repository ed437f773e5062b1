// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "aci/eval.hpp"
#include "aci/rules.hpp"
#include "aci/scoring.hpp"
#include "aci/simulate.hpp"
#include "aci/solver.hpp"
#include "aci/stats.hpp"

using namespace aci;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

// 1 -------------------------------------------------------------------------

Outcome weight_reproduction() {
    const auto v = frequentist_weight(0.01, 0.05);
    const bool ok = v.reject && v.weight == Weight::finite(1609);
    return {ok, "weight(p=0.01, alpha=0.05) = " + v.weight.to_string()};
}

// 2 -------------------------------------------------------------------------

Outcome structure_counts() {
    const auto start = Clock::now();
    const auto c4 = count_ancestral_structures(4);
    const auto c5 = count_ancestral_structures(5);
    const auto c7 = count_ancestral_structures(7);
    const double t = seconds_since(start);
    const bool ok = c4 == 219 && c5 == 4231 && c7 >= 6'000'000 && c7 <= 6'200'000 && t < 300.0;
    return {ok, "n=4: " + std::to_string(c4) + ", n=5: " + std::to_string(c5) + ", n=7: " + std::to_string(c7) +
                    " in " + fmt(t) + " s"};
}

// 3 -------------------------------------------------------------------------

Outcome rule_soundness() {
    const auto start = Clock::now();
    int good = 0;
    std::string first_failure;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const int n = 2 + static_cast<int>(rng() % 5);
        const int latent = static_cast<int>(rng() % 3);
        const int c = std::min(n - 2, static_cast<int>(rng() % 3));
        const double p = 0.2 + 0.1 * static_cast<double>(rng() % 4);
        const Scm scm = random_linear_model(n, latent, p, seed);
        const auto oracle = oracle_inputs(scm, c);

        std::map<CiTriple, CiPolarity> truth;
        for (const auto& in : oracle) truth[in.ci().triple] = in.ci().polarity;
        const JointAssignment joint{true_ancestral_structure(scm), make_ci_assignment(n, truth)};

        const bool ok = check_consistency(joint.structure, joint.ci) && loss(joint, oracle) == Weight::zero() &&
                        solve_min_loss(oracle, n).min_loss == Weight::zero();
        if (ok)
            ++good;
        else if (first_failure.empty())
            first_failure = ", first failure at seed " + std::to_string(seed);
    }
    const double t = seconds_since(start);
    return {good == 100 && t < 600.0, std::to_string(good) + "/100 models sound in " + fmt(t) + " s" + first_failure};
}

// 4 -------------------------------------------------------------------------

Outcome soundness_of_infinite_scores() {
    const auto start = Clock::now();
    int agree = 0;
    int total = 0;
    int identified = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Scm scm = random_linear_model(4, 1 + static_cast<int>(seed % 2), 0.4, 1000 + seed);
        const auto oracle = oracle_inputs(scm, 1);
        for (const auto& p : score_all_pairs(oracle, 4)) {
            const auto expected = identifiability_oracle(oracle, 4, causes(p.cause, p.effect));
            const auto got = p.score.is_pos_inf()   ? Identifiability::True
                             : p.score.is_neg_inf() ? Identifiability::False
                                                    : Identifiability::Unknown;
            ++total;
            agree += got == expected;
            identified += expected != Identifiability::Unknown;
        }
    }
    const double t = seconds_since(start);
    return {agree == total && t < 600.0, std::to_string(agree) + "/" + std::to_string(total) + " pairs agree (" +
                                             std::to_string(identified) + " identifiable) in " + fmt(t) + " s"};
}

// 5 -------------------------------------------------------------------------

Outcome solver_equivalence() {
    std::mt19937_64 rng(5);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4;
        std::vector<WeightedInput> inputs;
        const int count = 1 + static_cast<int>(rng() % 10);
        for (int k = 0; k < count; ++k) {
            const Weight w = Weight::finite(1 + static_cast<std::int64_t>(rng() % 5000));
            const int x = static_cast<int>(rng() % n);
            const int y = (x + 1 + static_cast<int>(rng() % (n - 1))) % n;
            if (rng() % 4 == 0) {
                inputs.push_back(weighted(rng() % 2 ? causes(x, y) : not_causes(x, y), w));
                continue;
            }
            CondSet cond;
            if (rng() % 2) {
                int z = static_cast<int>(rng() % n);
                while (z == x || z == y) z = (z + 1) % n;
                cond = CondSet::of({z});
            }
            inputs.push_back(
                weighted(canonicalize(x, y, cond, rng() % 2 ? CiPolarity::Dependent : CiPolarity::Independent), w));
        }
        // a repeated triple or statement is allowed; both solvers sum it
        const auto fast = solve_min_loss(inputs, n);
        const auto slow = brute_force_min_loss(inputs, n);
        bool ok = fast.min_loss == slow.min_loss && fast.witness && slow.witness;
        if (ok) {
            ok = loss(*fast.witness, inputs) == fast.min_loss && loss(*slow.witness, inputs) == slow.min_loss &&
                 check_consistency(fast.witness->structure, fast.witness->ci);
        }
        agree += ok;
    }
    return {agree == 100, std::to_string(agree) + "/100 instances match the exhaustive solver"};
}

// 6 -------------------------------------------------------------------------

Outcome antisymmetry() {
    int agree = 0;
    int total = 0;
    TestConfig cfg;
    for (int m = 0; m < 25; ++m) {
        const Scm scm = random_linear_model(5, 1, 0.3, model_seed(600, m));
        const auto data = sample_data(scm, 500, sample_seed(600, m));
        const auto inputs = ci_inputs_from_data(data, cfg).inputs;
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y) {
                if (x == y) continue;
                ++total;
                agree += confidence(inputs, 5, causes(x, y)) == -confidence(inputs, 5, not_causes(x, y));
            }
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " pairs antisymmetric"};
}

// 7 -------------------------------------------------------------------------

Outcome consistency_trend() {
    const auto start = Clock::now();
    const std::vector<int> sizes = {500, 5000, 50000};
    int improving = 0;
    std::ostringstream rates;
    for (int m = 0; m < 20; ++m) {
        const Scm scm = random_linear_model(5, 1, 0.3, model_seed(700, m));
        const auto truth = true_ancestral_structure(scm);
        std::vector<double> err;
        for (int N : sizes) {
            TestConfig cfg;
            cfg.alpha = 0.05 * 500.0 / N;
            const auto data = sample_data(scm, N, sample_seed(700, m));
            const auto preds = score_all_pairs(ci_inputs_from_data(data, cfg).inputs, 5);
            err.push_back(confident_error_rate(preds, truth, 0.75));
        }
        const bool ok = err[1] <= err[0] && err[2] <= err[1];
        improving += ok;
        rates << (m ? " " : "") << fmt(err[0]) << '/' << fmt(err[1]) << '/' << fmt(err[2]);
    }
    const double t = seconds_since(start);
    std::cout << "  error rates per model (N=500/5000/50000): " << rates.str() << '\n';
    return {3 * improving >= 2 * 20 && t < 1800.0,
            std::to_string(improving) + "/20 models non-increasing, " + fmt(t) + " s"};
}

// 8 -------------------------------------------------------------------------

Outcome performance() {
    BenchmarkConfig cfg;
    cfg.n_obs = 7;
    cfg.max_order = 1;
    cfg.models = 20;
    cfg.seed = 800;
    cfg.time_limit_seconds = 600.0;
    const auto report = run_benchmark(cfg);
    std::vector<double> times;
    int ok = 0;
    for (const auto& r : report.models) {
        times.push_back(r.status == "ok" ? r.time_seconds : std::numeric_limits<double>::infinity());
        ok += r.status == "ok";
    }
    std::sort(times.begin(), times.end());
    const double median = 0.5 * (times[9] + times[10]);

    std::cout << "  n  c  measured mean (s)  reference mean (s)\n";
    for (const auto& ref : reference_times()) {
        std::cout << "  " << ref.n << "  " << ref.c << "  ";
        if (ref.n == 7 && ref.c == 1)
            std::cout << std::setw(17) << fmt(report.mean_time_seconds);
        else
            std::cout << std::setw(17) << "-";
        std::cout << "  " << std::setw(18) << fmt(ref.seconds) << '\n';
    }
    return {median <= 60.0 && ok == 20, "n=7 c=1: median " + fmt(median) + " s, mean " +
                                            fmt(report.mean_time_seconds) + " s, max " + fmt(times.back()) +
                                            " s, " + std::to_string(ok) + "/20 finished"};
}

// 9 -------------------------------------------------------------------------

Outcome statistical_front_end() {
    std::mt19937_64 rng(9);
    boost::math::normal std_normal;
    double worst_p = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double r = std::uniform_real_distribution<double>(-0.97, 0.97)(rng);
        const int order = static_cast<int>(rng() % 4);
        const long N = order + 4 + static_cast<long>(rng() % 10000);
        const double stat = std::sqrt(static_cast<double>(N - order - 3)) * 0.5 * std::log((1 + r) / (1 - r));
        const double ref = 2.0 * boost::math::cdf(boost::math::complement(std_normal, std::abs(stat)));
        worst_p = std::max(worst_p, std::abs(fisher_z_pvalue(r, N, order) - ref));
    }

    double worst_r = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = 3 + static_cast<int>(rng() % 4);
        const Scm scm = random_linear_model(n, 1, 0.5, rng());
        const auto data = sample_data(scm, 200 + static_cast<int>(rng() % 800), rng());
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                const std::uint32_t others = ((1u << n) - 1) & ~((1u << x) | (1u << y));
                for (std::uint32_t s = others;; s = (s - 1) & others) {
                    const double a = partial_correlation(data, x, y, CondSet(s), PartialCorrelationMethod::Regression);
                    const double b = partial_correlation(data, x, y, CondSet(s), PartialCorrelationMethod::Recursion);
                    worst_r = std::max(worst_r, std::abs(a - b));
                    if (s == 0) break;
                }
            }
    }
    std::ostringstream d;
    d << "max |p - reference| = " << worst_p << ", max |recursion - regression| = " << worst_r;
    return {worst_p <= 1e-9 && worst_r <= 1e-10, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"weight reproduction", weight_reproduction},
        {"structure counting", structure_counts},
        {"rule soundness", rule_soundness},
        {"infinite scores match identifiability", soundness_of_infinite_scores},
        {"solver matches exhaustive search", solver_equivalence},
        {"score antisymmetry", antisymmetry},
        {"error rate falls with sample size", consistency_trend},
        {"performance envelope", performance},
        {"statistical front end", statistical_front_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
