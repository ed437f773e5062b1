#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "aci/facts.hpp"
#include "aci/simulate.hpp"
#include "aci/stats.hpp"

using namespace aci;

namespace {

FactFile parse(const std::string& text) {
    std::istringstream in(text);
    return read_facts(in);
}

int error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::vector<std::string> sorted_lines(const std::vector<std::string>& names, const std::vector<WeightedInput>& in) {
    std::ostringstream out;
    write_facts(out, names, in);
    std::istringstream lines(out.str());
    std::vector<std::string> v;
    for (std::string l; std::getline(lines, l);) v.push_back(l);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("reading statements") {
    auto f = parse(
        "# background\n"
        "vars A B C\n"
        "indep A B | C : 1609\n"
        "dep C A : 250   # reversed endpoints\n"
        "\n"
        "causes A B : inf\n"
        "notcauses B A : 3000\n"
        "indep A C | : 7\n");
    REQUIRE(f.variables() == 3);
    REQUIRE(f.inputs.size() == 5);
    CHECK(f.inputs[0].ci() == independent(0, 1, CondSet::of({2})));
    CHECK(f.inputs[0].weight == Weight::finite(1609));
    CHECK(f.inputs[1].ci() == dependent(0, 2));
    CHECK(f.inputs[2].anc() == causes(0, 1));
    CHECK(f.inputs[2].weight.is_hard());
    CHECK(f.inputs[3].anc() == not_causes(1, 0));
    CHECK(f.inputs[4].ci() == independent(0, 2));
}

TEST_CASE("empty files need no vars line") {
    auto f = parse("# nothing here\n\n");
    CHECK(f.names.empty());
    CHECK(f.inputs.empty());
}

TEST_CASE("malformed lines report their line") {
    CHECK(error_line("indep A B : 1\n") == 1);
    CHECK(error_line("vars A B\nindep A Q : 1\n") == 2);
    CHECK(error_line("vars A B\nindep A B : -1\n") == 2);
    CHECK(error_line("vars A B\nindep A B : 1.5\n") == 2);
    CHECK(error_line("vars A B\nindep A B\n") == 2);
    CHECK(error_line("vars A B\nindep A A : 1\n") == 2);
    CHECK(error_line("vars A B\ncauses A B | C : 1\n") == 2);
    CHECK(error_line("vars A B C\nindep A B | A : 1\n") == 2);
    CHECK(error_line("vars A B C\nindep A B | C C : 1\n") == 2);
    CHECK(error_line("vars A B\nlinks A B : 1\n") == 2);
    CHECK(error_line("vars A A\n") == 1);
    CHECK(error_line("vars A B\nvars A B\n") == 2);
    CHECK(error_line("vars A B\nindep A B : 1 2\n") == 2);
    CHECK(error_line("vars A B\nindep A B : 99999999999999999999\n") == 2);
}

TEST_CASE("duplicate canonical statements are rejected") {
    CHECK(error_line("vars A B C\nindep A B | C : 1\nindep B A | C : 2\n") == 3);
    CHECK(error_line("vars A B\ncauses A B : 1\ncauses A B : inf\n") == 3);
    // opposite polarities are distinct statements
    CHECK(parse("vars A B\nindep A B : 1\ndep A B : 2\ncauses A B : 1\nnotcauses A B : 1\n").inputs.size() == 4);
}

TEST_CASE("merging files") {
    auto a = parse("vars A B\ncauses A B : 5\n");
    auto b = parse("vars A B\ncauses B A : 5\n");
    auto empty = parse("");
    auto m = merge_facts({a, empty, b});
    CHECK(m.names == a.names);
    CHECK(m.inputs.size() == 2);
    CHECK_THROWS_AS(merge_facts({a, a}), ParseError);
    CHECK_THROWS_AS(merge_facts({a, parse("vars B A\n")}), ParseError);
}

TEST_CASE("written facts parse back to the same inputs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto scm = random_linear_model(4, 1, 0.4, rng());
        auto data = sample_data(scm, 300, rng());
        TestConfig cfg;
        cfg.max_order = 2;
        auto inputs = ci_inputs_from_data(data, cfg).inputs;
        inputs.push_back(weighted(causes(1, 3), Weight::hard()));
        inputs.push_back(weighted(not_causes(3, 1), Weight::finite(0)));

        std::ostringstream out;
        write_facts(out, data.names, inputs);
        auto back = parse(out.str());
        CHECK(back.names == data.names);
        REQUIRE(back.inputs.size() == inputs.size());
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            CHECK(back.inputs[i].statement == inputs[i].statement);
            CHECK(back.inputs[i].weight == inputs[i].weight);
        }
        std::ostringstream again;
        write_facts(again, back.names, back.inputs);
        CHECK(again.str() == out.str());
        CHECK(sorted_lines(back.names, back.inputs) == sorted_lines(data.names, inputs));
    }
}

TEST_CASE("names that cannot be written are refused") {
    std::ostringstream out;
    CHECK_THROWS_AS(write_facts(out, {"a:b", "c"}, {}), InvalidArgument);
    CHECK(default_names(3) == std::vector<std::string>{"X0", "X1", "X2"});
}
