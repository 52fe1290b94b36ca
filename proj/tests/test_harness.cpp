#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace skyblock;
using fixtures::pred;

namespace {

RunOutcome outcome(const std::string& id, std::uint64_t used = 10) { return {id, id != kNoScheme, used, {}, {}}; }

CsReport cs_of(std::vector<std::string> ids) {
    return run_cs([&](std::uint64_t seed) { return outcome(ids[seed - 1]); }, ids.size(), 1);
}

fixtures::Fixture six() {
    return fixtures::from_rows({"name", "city"},
                               {{"a", "Gale", "perth"},
                                {"b", "Gaile", "perth"},
                                {"c", "Smith", "hobart"},
                                {"d", "Smyth", "darwin"},
                                {"e", "Jones", "hobart"},
                                {"f", "Brown", "perth"}},
                               {{"a", "b"}, {"c", "d"}, {"c", "e"}},
                               {pred("name", BlockingFunction::soundex()), pred("city", BlockingFunction::exact())});
}

} // namespace

TEST(Algorithms, NamesRoundTrip) {
    for (auto a : {Algorithm::asl, Algorithm::rsl, Algorithm::naive, Algorithm::active, Algorithm::pro}) {
        EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
    }
    EXPECT_THROW(parse_algorithm("greedy"), ConfigError);
    EXPECT_TRUE(is_skyline_algorithm(Algorithm::pro));
    EXPECT_FALSE(is_skyline_algorithm(Algorithm::rsl));
}

TEST(Identity, SortedAndEmpty) {
    const std::vector<std::string> names{"p1", "p2"};
    const SchemePoint a{Scheme::predicate(1, 2), 0.5, 0.5, Provenance::empirical};
    const SchemePoint b{Scheme::predicate(0, 2), 0.9, 0.1, Provenance::empirical};
    EXPECT_EQ(skyline_identity({a, b}, names), "p1 | p2");
    EXPECT_EQ(skyline_identity({b, a}, names), "p1 | p2");
    EXPECT_EQ(skyline_identity({}, names), kNoScheme);
}

TEST(Stability, CountsFractions) {
    const auto r = cs_of({"x", "y", "x", "x", "z"});
    EXPECT_EQ(r.runs, 5u);
    ASSERT_EQ(r.groups.size(), 3u);
    EXPECT_EQ(r.groups[0].identity, "x");
    EXPECT_DOUBLE_EQ(r.groups[0].cs, 0.6);
    EXPECT_DOUBLE_EQ(r.max_cs(), 0.6);
    EXPECT_DOUBLE_EQ(r.mean_labels_used, 10.0);
}

TEST(Stability, FailedRunsNeverCountAsStable) {
    EXPECT_DOUBLE_EQ(cs_of({kNoScheme, kNoScheme, kNoScheme, "x"}).max_cs(), 0.25);
    EXPECT_DOUBLE_EQ(cs_of({kNoScheme, kNoScheme}).max_cs(), 0.0);
}

TEST(Stability, RejectsZeroRepetitions) {
    EXPECT_THROW(run_cs([](std::uint64_t) { return outcome("x"); }, 0, 1), ConfigError);
    ExperimentPlan plan;
    plan.repetitions = 0;
    EXPECT_THROW(validate(plan), ConfigError);
}

TEST(Stability, SeedsAreConsecutive) {
    std::vector<std::uint64_t> seen;
    run_cs(
        [&](std::uint64_t s) {
            seen.push_back(s);
            return outcome("x");
        },
        4, 7);
    EXPECT_EQ(seen, (std::vector<std::uint64_t>{7, 8, 9, 10}));
}

TEST(Sweep, StopsAtFirstBudgetReachingTarget) {
    // CS climbs by 0.25 every 100 labels.
    std::vector<std::uint64_t> asked;
    SweepOptions opt{100, 100, 1000, 0.75};
    const auto r = sweep_label_cost(
        [&](std::uint64_t b) {
            asked.push_back(b);
            const std::size_t stable = std::min<std::size_t>(b / 100, 4);
            std::vector<std::string> ids(4, kNoScheme);
            for (std::size_t i = 0; i < stable; ++i) {
                ids[i] = "x";
            }
            return cs_of(ids);
        },
        opt);
    ASSERT_TRUE(r.budget.has_value());
    EXPECT_EQ(*r.budget, 300u);
    EXPECT_EQ(r.text(), "300");
    EXPECT_EQ(asked, (std::vector<std::uint64_t>{100, 200, 300}));
    EXPECT_EQ(r.curve.size(), 3u);
}

TEST(Sweep, CapIsReported) {
    const auto r = sweep_label_cost([](std::uint64_t) { return cs_of({"x", "y"}); }, SweepOptions{50, 50, 200, 0.9});
    EXPECT_TRUE(r.capped());
    EXPECT_EQ(r.text(), "200+");
    EXPECT_EQ(r.curve.size(), 4u);
    EXPECT_THROW(sweep_label_cost([](std::uint64_t) { return cs_of({"x"}); }, SweepOptions{0, 50, 200, 0.9}),
                 ConfigError);
    EXPECT_THROW(sweep_label_cost([](std::uint64_t) { return cs_of({"x"}); }, SweepOptions{50, 50, 200, 0.0}),
                 ConfigError);
}

TEST(Runs, FreshSessionPerRunAndSeedDeterminism) {
    const auto f = fixtures::planted_people();
    for (auto algo : {Algorithm::asl, Algorithm::rsl, Algorithm::naive, Algorithm::active, Algorithm::pro}) {
        ExperimentPlan plan;
        plan.algorithm = algo;
        plan.budget = 600;
        plan.epsilon = 0.7;
        const auto a = run_once(*f.index, f.truth, plan, 5);
        const auto b = run_once(*f.index, f.truth, plan, 5);
        EXPECT_EQ(a.identity, b.identity) << algorithm_name(algo);
        EXPECT_LE(a.labels_used, 600u);
        EXPECT_TRUE(a.ok) << algorithm_name(algo);
        EXPECT_EQ(a.asl.has_value(), !is_skyline_algorithm(algo));
    }
}

TEST(Runs, TinyBudgetIsNoScheme) {
    const auto f = fixtures::planted_people();
    ExperimentPlan plan;
    plan.algorithm = Algorithm::pro;
    plan.budget = 5;
    const auto r = run_once(*f.index, f.truth, plan, 1);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.identity, kNoScheme);
}

TEST(Runs, DerivedK) {
    ExperimentPlan plan;
    plan.budget = 600;
    plan.expected_depth = 3;
    EXPECT_EQ(derived_asl_k(plan, 6), 33u);
    plan.budget = 5;
    EXPECT_EQ(derived_asl_k(plan, 6), 1u);
    plan.k = 4;
    EXPECT_EQ(derived_asl_k(plan, 6), 4u);
}

TEST(Baselines, ExactMeasuresAndDominance) {
    auto f = six();
    const auto s0 = Scheme::predicate(0, 2), s1 = Scheme::predicate(1, 2);
    const auto both = disjoin(s0, s1);
    const auto c = compare_baselines(*f.index, f.truth, {s0, both}, {{"city", s1}, {"name", s0}});
    ASSERT_EQ(c.skyline.size(), 2u);
    for (const auto& row : c.skyline) {
        EXPECT_EQ(row.counts, oracles::brute_confusion(row.scheme, f.index->predicates(), f.dataset(), f.truth));
    }
    // name: pc 2/3, pq 1. city: pc 2/3, pq 1/2 -> dominated by name.
    ASSERT_EQ(c.presets.size(), 2u);
    EXPECT_TRUE(c.presets[0].dominated);
    EXPECT_FALSE(c.presets[0].contained);
    ASSERT_TRUE(c.presets[0].at_preset_pc.has_value());
    EXPECT_EQ(c.presets[0].at_preset_pc->scheme, s0);
    EXPECT_FALSE(c.presets[1].dominated);
    EXPECT_TRUE(c.presets[1].contained);
    // fm of name = 0.8; fm of the union (pc 1, pq 3/5) = 0.75.
    ASSERT_TRUE(c.best_fm.has_value());
    EXPECT_EQ(c.best_fm->scheme, s0);
    EXPECT_DOUBLE_EQ(c.best_fm->fm, 0.8);
}
