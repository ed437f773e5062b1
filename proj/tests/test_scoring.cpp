#include "doctest.h"

#include <random>

#include "aci/scoring.hpp"

using namespace aci;

namespace {

// Chain 0 -> 2 -> 1 read off by hand: the only independence up to order 1 is 0 _||_ 1 | 2.
std::vector<WeightedInput> chain_oracle() {
    return {weighted(dependent(0, 1), Weight::hard()), weighted(dependent(0, 2), Weight::hard()),
            weighted(dependent(1, 2), Weight::hard()), weighted(independent(0, 1, CondSet::of({2})), Weight::hard()),
            weighted(dependent(0, 2, CondSet::of({1})), Weight::hard()),
            weighted(dependent(1, 2, CondSet::of({0})), Weight::hard())};
}

std::vector<WeightedInput> random_instance(std::mt19937_64& rng, int n, int count) {
    std::vector<WeightedInput> inputs;
    for (int k = 0; k < count; ++k) {
        const Weight w = Weight::finite(static_cast<std::int64_t>(rng() % 3000));
        const int x = static_cast<int>(rng() % n);
        int y = static_cast<int>(rng() % (n - 1));
        if (y >= x) ++y;
        if (rng() % 4 == 0) {
            inputs.push_back(weighted(rng() % 2 ? causes(x, y) : not_causes(x, y), w));
            continue;
        }
        std::uint32_t cond = 0;
        if (rng() % 2) {
            const int v = static_cast<int>(rng() % n);
            if (v != x && v != y) cond = 1u << v;
        }
        inputs.push_back(
            weighted(canonicalize(x, y, CondSet(cond), rng() % 2 ? CiPolarity::Dependent : CiPolarity::Independent), w));
    }
    return inputs;
}

// Independent route for the same quantity: two brute-force solves with the feature as a Hard input.
Score brute_confidence(std::vector<WeightedInput> inputs, int n, const AncStatement& f) {
    auto with_f = inputs;
    with_f.push_back(weighted(f, Weight::hard()));
    inputs.push_back(weighted(f.negated(), Weight::hard()));
    const auto lf = brute_force_min_loss(with_f, n).min_loss;
    const auto lnf = brute_force_min_loss(inputs, n).min_loss;
    if (lf.is_hard() && lnf.is_hard()) throw BothInfeasibleError("both");
    if (lnf.is_hard()) return Score::pos_inf();
    if (lf.is_hard()) return Score::neg_inf();
    return Score::finite(lnf.value() - lf.value());
}

}  // namespace

TEST_CASE("score arithmetic and text") {
    CHECK(-Score::pos_inf() == Score::neg_inf());
    CHECK(-Score::finite(5) == Score::finite(-5));
    CHECK(Score::neg_inf() < Score::finite(-1000000));
    CHECK(Score::finite(1000000) < Score::pos_inf());
    CHECK(Score::pos_inf().to_string() == "inf");
    CHECK(Score::neg_inf().to_string() == "-inf");
    CHECK(Score::parse("-inf") == Score::neg_inf());
    CHECK(Score::parse("-42") == Score::finite(-42));
    CHECK_THROWS_AS(Score::parse("4x"), InvalidArgument);
}

TEST_CASE("single ancestral input") {
    std::vector<WeightedInput> in = {weighted(causes(0, 1), Weight::finite(2000))};
    CHECK(confidence(in, 2, causes(0, 1)) == Score::finite(2000));
    CHECK(confidence(in, 2, not_causes(0, 1)) == Score::finite(-2000));
}

TEST_CASE("contradictory pair") {
    std::vector<WeightedInput> in = {weighted(causes(0, 1), Weight::finite(3000)),
                                     weighted(causes(1, 0), Weight::finite(1000))};
    CHECK(confidence(in, 2, causes(0, 1)) == Score::finite(2000));
    CHECK(brute_confidence(in, 2, causes(0, 1)) == Score::finite(2000));
    auto all = score_all_pairs(in, 2);
    REQUIRE(all.size() == 2);
    CHECK(all[0].cause == 0);
    CHECK(all[0].score == Score::finite(2000));
    CHECK(all[1].cause == 1);
    CHECK(all[1].score == Score::finite(-2000));
}

TEST_CASE("no inputs") {
    CHECK(confidence({}, 3, causes(2, 0)) == Score::finite(0));
    auto all = score_all_pairs({}, 3);
    REQUIRE(all.size() == 6);
    for (const auto& p : all) CHECK(p.score == Score::finite(0));
    // ties broken by (cause, effect)
    CHECK(all.front().cause == 0);
    CHECK(all.front().effect == 1);
    CHECK(all.back().cause == 2);
    CHECK(all.back().effect == 1);
}

TEST_CASE("chain oracle identifies no single pair") {
    const auto in = chain_oracle();
    for (const auto& p : score_all_pairs(in, 3)) CHECK(p.score == Score::finite(0));
    CHECK(identifiability_oracle(in, 3, causes(2, 0)) == Identifiability::Unknown);
}

TEST_CASE("identifiability oracle basics") {
    CHECK(identifiability_oracle({weighted(causes(0, 1), Weight::hard())}, 3, causes(0, 1)) == Identifiability::True);
    CHECK(identifiability_oracle({weighted(causes(0, 1), Weight::hard()), weighted(causes(1, 2), Weight::hard())}, 3,
                                 causes(0, 2)) == Identifiability::True);
    CHECK(identifiability_oracle({weighted(causes(0, 1), Weight::hard())}, 3, causes(1, 0)) == Identifiability::False);
    CHECK_THROWS_AS(identifiability_oracle({weighted(causes(0, 1), Weight::finite(3))}, 3, causes(0, 1)),
                    InvalidArgument);
    CHECK_THROWS_AS(identifiability_oracle({weighted(causes(0, 1), Weight::hard()), weighted(causes(1, 0), Weight::hard())},
                                           2, causes(0, 1)),
                    NoConsistentModelError);
    CHECK_THROWS_AS(identifiability_oracle({}, 6, causes(0, 1)), GuardError);
}

TEST_CASE("hard features give infinite scores") {
    std::vector<WeightedInput> in = {weighted(not_causes(0, 1), Weight::hard()),
                                     weighted(causes(0, 1), Weight::finite(500))};
    CHECK(confidence(in, 3, causes(0, 1)) == Score::neg_inf());
    CHECK(confidence(in, 3, not_causes(0, 1)) == Score::pos_inf());
    std::vector<WeightedInput> bad = {weighted(causes(0, 1), Weight::hard()), weighted(causes(1, 0), Weight::hard())};
    CHECK_THROWS_AS(confidence(bad, 2, causes(0, 1)), BothInfeasibleError);
    CHECK_THROWS_AS(score_all_pairs(bad, 2), BothInfeasibleError);
}

TEST_CASE("scores match two brute-force solves and are antisymmetric") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto in = random_instance(rng, 4, 8);
        const int x = static_cast<int>(rng() % 4);
        const int y = (x + 1 + static_cast<int>(rng() % 3)) % 4;
        const auto c = confidence(in, 4, causes(x, y));
        CHECK(c == brute_confidence(in, 4, causes(x, y)));
        CHECK(confidence(in, 4, not_causes(x, y)) == -c);
    }
}

TEST_CASE("more evidence for a feature never lowers its score") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        auto in = random_instance(rng, 4, 8);
        const auto before = confidence(in, 4, causes(1, 3));
        in.push_back(weighted(causes(1, 3), Weight::finite(static_cast<std::int64_t>(rng() % 2000))));
        CHECK(confidence(in, 4, causes(1, 3)) >= before);
    }
}

TEST_CASE("pair scores ignore input order and thread count") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 8; ++trial) {
        auto in = random_instance(rng, 5, 12);
        const auto a = score_all_pairs(in, 5);
        std::shuffle(in.begin(), in.end(), rng);
        SolveOptions opt;
        opt.thread_count = 3;
        const auto b = score_all_pairs(in, 5, opt);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].cause == b[k].cause);
            CHECK(a[k].effect == b[k].effect);
            CHECK(a[k].score == b[k].score);
        }
    }
}
