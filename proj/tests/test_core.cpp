#include "doctest.h"

#include <random>
#include <set>

#include "aci/core.hpp"

using namespace aci;

namespace {

// Independent oracle: every n x n boolean matrix, filtered by the three axioms written out here.
std::uint64_t count_by_matrices(int n) {
    const int cells = n * n;
    std::uint64_t count = 0;
    std::vector<std::uint32_t> row(n);
    for (std::uint64_t m = 0; m < (1ull << cells); ++m) {
        for (int i = 0; i < n; ++i) row[i] = static_cast<std::uint32_t>((m >> (i * n)) & ((1u << n) - 1));
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (!((row[i] >> i) & 1u)) ok = false;
            for (int j = 0; j < n && ok; ++j) {
                if (i == j || !((row[i] >> j) & 1u)) continue;
                if ((row[j] >> i) & 1u) ok = false;  // antisymmetry
                if ((row[j] & ~row[i]) != 0) ok = false;  // transitivity
            }
        }
        if (ok) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("canonicalize orders endpoints and keeps polarity") {
    auto s = canonicalize(3, 1, CondSet::of({0}), CiPolarity::Independent);
    CHECK(s.triple.x == 1);
    CHECK(s.triple.y == 3);
    CHECK(s.triple.cond == CondSet::of({0}));
    CHECK(s.polarity == CiPolarity::Independent);

    auto t = canonicalize(0, 2, {}, CiPolarity::Dependent);
    CHECK(t.triple.x == 0);
    CHECK(t.triple.y == 2);
    CHECK(t.polarity == CiPolarity::Dependent);

    CHECK_THROWS_AS(canonicalize(1, 1, {}, CiPolarity::Dependent), InvalidArgument);
    CHECK_THROWS_AS(canonicalize(0, 1, CondSet::of({1}), CiPolarity::Dependent), InvalidArgument);

    auto again = canonicalize(s.triple.x, s.triple.y, s.triple.cond, s.polarity);
    CHECK(again == s);
}

TEST_CASE("axiom checks") {
    CHECK(is_ancestral_structure(AncestralStructure::identity(3).matrix()));

    BoolMatrix no_trans = {{true, true, false}, {false, true, true}, {false, false, true}};
    CHECK_FALSE(is_ancestral_structure(no_trans));

    BoolMatrix cyc = {{true, true}, {true, true}};
    CHECK_FALSE(is_ancestral_structure(cyc));

    BoolMatrix no_diag = {{false, false}, {false, true}};
    CHECK_FALSE(is_ancestral_structure(no_diag));
}

TEST_CASE("transitive closure") {
    auto s = transitive_close({{0, 1}, {1, 2}}, 3);
    CHECK(s.reaches(0, 2));
    CHECK(s.reaches(0, 1));
    CHECK_FALSE(s.reaches(2, 0));
    CHECK(transitive_close({}, 3) == AncestralStructure::identity(3));
    CHECK_THROWS_AS(transitive_close({{0, 1}, {1, 0}}, 2), CycleError);

    // idempotent: closing the edges of a closed structure gives it back
    std::vector<std::pair<VarIndex, VarIndex>> edges;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b && s.reaches(a, b)) edges.push_back({a, b});
    CHECK(transitive_close(edges, 3) == s);
}

TEST_CASE("enumeration small cases") {
    CHECK(enumerate_ancestral_structures(1).size() == 1);
    auto two = enumerate_ancestral_structures(2);
    REQUIRE(two.size() == 3);
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& s : two) seen.insert(s.rows());
    CHECK(seen.size() == 3);
}

TEST_CASE("enumeration agrees with the matrix filter for n = 4 and n = 5") {
    for (int n : {3, 4, 5}) {
        const auto oracle = count_by_matrices(n);
        std::set<std::vector<std::uint32_t>> seen;
        bool all_valid = true;
        for_each_ancestral_structure(n, [&](const AncestralStructure& s) {
            all_valid = all_valid && is_ancestral_structure(s.matrix());
            seen.insert(s.rows());
            return true;
        });
        CHECK(all_valid);
        CHECK(seen.size() == oracle);
        CHECK(count_ancestral_structures(n) == oracle);
    }
    CHECK(count_by_matrices(4) == 219);
}

TEST_CASE("enumeration order is deterministic") {
    auto a = enumerate_ancestral_structures(4);
    auto b = enumerate_ancestral_structures(4);
    CHECK(a == b);
}

TEST_CASE("counts for larger n") {
    CHECK(count_ancestral_structures(6) == enumerate_ancestral_structures(6).size());
    const auto c7 = count_ancestral_structures(7);
    CHECK(c7 >= 6000000);
    CHECK(c7 <= 6200000);
    CHECK_THROWS_AS(count_ancestral_structures(8), GuardError);
    CHECK_THROWS_AS(enumerate_ancestral_structures(7), GuardError);
}

TEST_CASE("weights") {
    CHECK((Weight::finite(2) + Weight::finite(3)) == Weight::finite(5));
    CHECK((Weight::finite(2) + Weight::hard()).is_hard());
    CHECK(Weight::finite(1000000) < Weight::hard());
    CHECK_THROWS_AS(Weight::finite(-1), InvalidArgument);
    CHECK_THROWS_AS(Weight::finite(std::numeric_limits<std::int64_t>::max() - 1) + Weight::finite(5),
                    OverflowError);
    CHECK(Weight::hard().to_string() == "inf");
    CHECK(Weight::finite(42).to_string() == "42");

    std::vector<WeightedInput> big = {
        weighted(causes(0, 1), Weight::finite(std::numeric_limits<std::int64_t>::max() / 2 + 1)),
        weighted(causes(1, 0), Weight::finite(std::numeric_limits<std::int64_t>::max() / 2 + 1))};
    CHECK_THROWS_AS(total_finite_weight(big), OverflowError);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(validate_inputs({weighted(causes(0, 3), Weight::finite(1))}, 3), InvalidArgument);
    CHECK_THROWS_AS(validate_inputs({weighted(independent(0, 1, CondSet::of({4})), Weight::finite(1))}, 3),
                    InvalidArgument);
    CHECK_NOTHROW(validate_inputs({weighted(independent(0, 1, CondSet::of({2})), Weight::finite(1))}, 3));
}

TEST_CASE("random closures are ancestral structures") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::pair<VarIndex, VarIndex>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 3 == 0) edges.push_back({order[i], order[j]});
        auto s = transitive_close(edges, n);
        CHECK(is_ancestral_structure(s.matrix()));
        CHECK(AncestralStructure::from_matrix(s.matrix()) == s);
    }
}
