#include "doctest.h"

#include <random>

#include "aci/solver.hpp"

using namespace aci;

namespace {

std::vector<WeightedInput> random_instance(std::mt19937_64& rng, int n, int max_inputs, int max_order,
                                           bool allow_hard = false) {
    std::vector<WeightedInput> inputs;
    const int count = static_cast<int>(rng() % (max_inputs + 1));
    for (int k = 0; k < count; ++k) {
        const Weight w = (allow_hard && rng() % 8 == 0) ? Weight::hard()
                                                        : Weight::finite(static_cast<std::int64_t>(rng() % 3000));
        const int x = static_cast<int>(rng() % n);
        int y = static_cast<int>(rng() % (n - 1));
        if (y >= x) ++y;
        if (rng() % 4 == 0) {
            inputs.push_back(weighted(rng() % 2 ? causes(x, y) : not_causes(x, y), w));
            continue;
        }
        std::uint32_t cond = 0;
        const int order = static_cast<int>(rng() % (max_order + 1));
        for (int tries = 0; std::popcount(cond) < order && tries < 20; ++tries) {
            const int v = static_cast<int>(rng() % n);
            if (v != x && v != y) cond |= 1u << v;
        }
        inputs.push_back(weighted(
            canonicalize(x, y, CondSet(cond), rng() % 2 ? CiPolarity::Dependent : CiPolarity::Independent), w));
    }
    return inputs;
}

}  // namespace

TEST_CASE("empty input") {
    auto r = solve_min_loss({}, 3);
    CHECK(r.min_loss == Weight::zero());
    REQUIRE(r.witness);
    CHECK(r.witness->structure == AncestralStructure::identity(3));

    auto b = brute_force_min_loss({}, 4);
    CHECK(b.min_loss == Weight::zero());
    CHECK(b.witness->structure == AncestralStructure::identity(4));
}

TEST_CASE("contradictory ancestral pair") {
    std::vector<WeightedInput> in = {weighted(causes(0, 1), Weight::finite(3000)),
                                     weighted(causes(1, 0), Weight::finite(1000))};
    auto r = solve_min_loss(in, 2);
    CHECK(r.min_loss == Weight::finite(1000));
    CHECK(r.witness->structure.reaches(0, 1));
    CHECK(brute_force_min_loss(in, 2).min_loss == Weight::finite(1000));
}

TEST_CASE("hard input") {
    std::vector<WeightedInput> in = {weighted(causes(0, 1), Weight::hard())};
    auto r = solve_min_loss(in, 3);
    CHECK(r.min_loss == Weight::zero());
    CHECK(r.witness->structure.reaches(0, 1));
    auto b = brute_force_min_loss(in, 3);
    CHECK(b.witness->structure.reaches(0, 1));

    std::vector<WeightedInput> bad = {weighted(causes(0, 1), Weight::hard()), weighted(causes(1, 0), Weight::hard())};
    CHECK_FALSE(solve_min_loss(bad, 2).feasible());
    CHECK_FALSE(brute_force_min_loss(bad, 2).feasible());
}

TEST_CASE("forced features") {
    std::vector<WeightedInput> in = {weighted(causes(0, 1), Weight::finite(2000))};
    SolveOptions opt;
    opt.forced_features = {{causes(0, 1), false}};
    CHECK(solve_min_loss(in, 2, opt).min_loss == Weight::finite(2000));
    opt.forced_features = {{causes(0, 1), true}};
    CHECK(solve_min_loss(in, 2, opt).min_loss == Weight::zero());
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(solve_min_loss({}, 13), GuardError);
    SolveOptions big;
    big.allow_large_n = true;
    CHECK(solve_min_loss({}, 13, big).min_loss == Weight::zero());
    CHECK_THROWS_AS(brute_force_min_loss({}, 5), GuardError);
    std::vector<WeightedInput> overflow = {
        weighted(causes(0, 1), Weight::finite(std::numeric_limits<std::int64_t>::max() / 2 + 1)),
        weighted(causes(1, 0), Weight::finite(std::numeric_limits<std::int64_t>::max() / 2 + 1))};
    CHECK_THROWS_AS(solve_min_loss(overflow, 2), OverflowError);
}

TEST_CASE("agrees with brute force, including witnesses") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 2);
        const auto inputs = random_instance(rng, n, 10, 1, trial % 3 == 0);
        const auto fast = solve_min_loss(inputs, n);
        const auto slow = brute_force_min_loss(inputs, n);
        INFO("trial " << trial);
        REQUIRE(fast.min_loss == slow.min_loss);
        if (!fast.feasible()) continue;
        REQUIRE(fast.witness);
        CHECK(check_consistency(fast.witness->structure, fast.witness->ci));
        CHECK(loss(*fast.witness, inputs) == fast.min_loss);
        CHECK(compare_witness(*fast.witness, *slow.witness) == 0);
    }
}

TEST_CASE("agrees with brute force on order-2 inputs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inputs = random_instance(rng, 4, 8, 2);
        INFO("trial " << trial);
        CHECK(solve_min_loss(inputs, 4).min_loss == brute_force_min_loss(inputs, 4).min_loss);
    }
}

TEST_CASE("scaling weights scales the optimum") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        auto inputs = random_instance(rng, 4, 10, 1);
        auto scaled = inputs;
        for (auto& in : scaled) in.weight = Weight::finite(in.weight.value() * 7);
        const auto a = solve_min_loss(inputs, 4);
        const auto b = solve_min_loss(scaled, 4);
        CHECK(b.min_loss == Weight::finite(a.min_loss.value() * 7));
        CHECK(loss(*a.witness, scaled) == b.min_loss);
    }
}

TEST_CASE("adding an input raises the optimum by at most its weight") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        auto inputs = random_instance(rng, 4, 8, 1);
        const auto base = solve_min_loss(inputs, 4);
        auto extra = random_instance(rng, 4, 1, 1);
        if (extra.empty()) continue;
        inputs.push_back(extra.front());
        const auto after = solve_min_loss(inputs, 4);
        CHECK(after.min_loss >= base.min_loss);
        CHECK(after.min_loss <= base.min_loss + extra.front().weight);
    }
}

TEST_CASE("deterministic across runs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inputs = random_instance(rng, 5, 14, 2);
        const auto a = solve_min_loss(inputs, 5);
        const auto b = solve_min_loss(inputs, 5);
        CHECK(a.min_loss == b.min_loss);
        CHECK(compare_witness(*a.witness, *b.witness) == 0);
    }
}
