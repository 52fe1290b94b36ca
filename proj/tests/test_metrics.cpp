#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace skyblock;
using fixtures::pred;

namespace {

// Six records, three known matches. p0 = name.soundex, p1 = city.exact.
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

Scheme s0() { return Scheme::predicate(0, 2); }
Scheme s1() { return Scheme::predicate(1, 2); }

FeatureVector fv(std::initializer_list<std::size_t> on, std::size_t universe, RecordIndex id) {
    PredicateSet s;
    for (auto i : on) {
        s.insert(i);
    }
    return {{0, id}, s, universe};
}

} // namespace

TEST(Coblocked, Examples) {
    auto f = six();
    const auto& ds = f.dataset();
    EXPECT_TRUE(coblocked(s0(), ds.resolve("a", "b"), *f.index));
    EXPECT_FALSE(coblocked(s0(), ds.resolve("a", "c"), *f.index));
    EXPECT_TRUE(coblocked(disjoin(s0(), s1()), ds.resolve("c", "e"), *f.index));
}

TEST(Coblocked, DisjunctionIsUnionOfAgreeingPairs) {
    auto f = six();
    std::set<std::uint64_t> p0, p1, both;
    for (const auto& pair : oracles::all_pairs(f.dataset())) {
        if (oracles::agrees_raw(f.index->predicates()[0], f.dataset(), pair)) {
            p0.insert(pair.key());
        }
        if (oracles::agrees_raw(f.index->predicates()[1], f.dataset(), pair)) {
            p1.insert(pair.key());
        }
        if (coblocked(disjoin(s0(), s1()), pair, *f.index)) {
            both.insert(pair.key());
        }
    }
    std::set<std::uint64_t> uni = p0;
    uni.insert(p1.begin(), p1.end());
    EXPECT_EQ(both, uni);
    // Hand count: soundex pairs {a,b} {c,d}; city pairs {a,b} {a,f} {b,f} {c,e}.
    EXPECT_EQ(p0.size(), 2u);
    EXPECT_EQ(p1.size(), 4u);
    EXPECT_EQ(uni.size(), 5u);
}

TEST(Confusion, SixRecordFixtureByHand) {
    auto f = six();
    // p0 blocks {a,b} (match) and {c,d} (match); misses {c,e}.
    const auto c0 = confusion(s0(), *f.index, f.truth);
    EXPECT_EQ(c0, (ConfusionCounts{2, 0, 1, 12}));
    EXPECT_DOUBLE_EQ(pc(c0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(pq(c0), 1.0);
    // p1 blocks {a,b} {c,e} (matches) and {a,f} {b,f}.
    const auto c1 = confusion(s1(), *f.index, f.truth);
    EXPECT_EQ(c1, (ConfusionCounts{2, 2, 1, 10}));
    EXPECT_DOUBLE_EQ(pq(c1), 0.5);
    EXPECT_DOUBLE_EQ(rr(c1), 1.0 - 4.0 / 15.0);
    EXPECT_EQ(confusion(s0(), *f.index, f.truth), oracles::brute_confusion(s0(), f.index->predicates(), f.dataset(), f.truth));
}

TEST(Confusion, IndexMatchesBruteForce) {
    std::mt19937_64 rng(4);
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto f = fixtures::planted_people(seed, 120);
        const auto exact = exact_histogram(*f.index, f.truth);
        const auto schemes = oracles::all_schemes(f.index->size(), 2);
        for (const auto& s : schemes) {
            const auto want = oracles::brute_confusion(s, f.index->predicates(), f.dataset(), f.truth);
            ASSERT_EQ(confusion(s, *f.index, f.truth), want) << s.to_string(f.index->predicate_names());
            ASSERT_EQ(confusion(s, exact), want);
            ASSERT_EQ(want.tp + want.fn, f.truth.size());
            ASSERT_EQ(want.total(), f.dataset().total_pairs());
        }
    }
}

TEST(Confusion, LinkageMatchesBruteForce) {
    auto ds = Dataset::linkage(
        Source({"name", "city"}, {{"a1", {"Gale", "perth"}}, {"a2", {"Smith", "hobart"}}, {"a3", {"Jones", "perth"}}}),
        Source({"name", "city"}, {{"b1", {"Gaile", "perth"}}, {"b2", {"Smyth", "darwin"}}, {"b3", {"Gail", "hobart"}}}));
    auto index = std::make_shared<PredicateIndex>(
        ds, std::vector<BlockingPredicate>{pred("name", BlockingFunction::soundex()), pred("city", BlockingFunction::exact())});
    GroundTruth t;
    t.add(index->dataset().resolve("a1", "b1"));
    t.add(index->dataset().resolve("a2", "b2"));
    for (const auto& s : oracles::all_schemes(2, 2)) {
        EXPECT_EQ(confusion(s, *index, t), oracles::brute_confusion(s, index->predicates(), index->dataset(), t));
        EXPECT_EQ(confusion(s, exact_histogram(*index, t)), confusion(s, *index, t));
    }
}

TEST(Ratios, Conventions) {
    EXPECT_THROW(pc(ConfusionCounts{0, 3, 0, 10}), UndefinedMetricError);
    EXPECT_DOUBLE_EQ(pq(ConfusionCounts{0, 0, 5, 10}), 0.0);
    // Shape of a high-precision, low-recall scheme.
    const ConfusionCounts c{31, 0, 69, 900};
    EXPECT_DOUBLE_EQ(pc(c), 0.31);
    EXPECT_DOUBLE_EQ(pq(c), 1.0);
    EXPECT_DOUBLE_EQ(rr(ConfusionCounts{0, 0, 2, 8}), 1.0);
    EXPECT_DOUBLE_EQ(rr(ConfusionCounts{2, 8, 0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(fm(0.5, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(fm(0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(fm(1.0, 0.5), 2.0 / 3.0);
}

TEST(Empirical, HandBuiltTrainingSet) {
    TrainingSet one;
    one.add(fv({0}, 2, 1), Label::match);
    one.add(fv({1}, 2, 2), Label::non_match);
    EXPECT_DOUBLE_EQ(empirical_pc(s0(), one), 1.0);
    EXPECT_DOUBLE_EQ(empirical_pq(s0(), one), 1.0);

    // Ten vectors over p0, p1: matches {0}, {0,1}, {1}, {}; non-matches {0} x2, {1} x3, {} .
    TrainingSet t;
    RecordIndex id = 0;
    for (auto on : std::vector<std::vector<std::size_t>>{{0}, {0, 1}, {1}, {}}) {
        PredicateSet s;
        for (auto i : on) {
            s.insert(i);
        }
        t.add({{0, ++id}, s, 2}, Label::match);
    }
    for (auto on : std::vector<std::vector<std::size_t>>{{0}, {0}, {1}, {1}, {1}, {}}) {
        PredicateSet s;
        for (auto i : on) {
            s.insert(i);
        }
        t.add({{0, ++id}, s, 2}, Label::non_match);
    }
    EXPECT_EQ(t.size(), 10u);
    EXPECT_DOUBLE_EQ(empirical_pc(s0(), t), 2.0 / 4.0);
    EXPECT_DOUBLE_EQ(empirical_pq(s0(), t), 2.0 / 4.0);
    EXPECT_DOUBLE_EQ(empirical_pc(disjoin(s0(), s1()), t), 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(empirical_pq(disjoin(s0(), s1()), t), 3.0 / 8.0);
    EXPECT_DOUBLE_EQ(empirical_pc(conjoin(s0(), s1()), t), 1.0 / 4.0);
    EXPECT_DOUBLE_EQ(empirical_pq(conjoin(s0(), s1()), t), 1.0);
    // The histogram view agrees with direct counting.
    const auto h = SignatureHistogram::of(t);
    EXPECT_DOUBLE_EQ(pq(confusion(disjoin(s0(), s1()), h)), 3.0 / 8.0);
}

TEST(Empirical, NothingCoveredAndNoMatches) {
    TrainingSet t;
    t.add(fv({}, 2, 1), Label::match);
    EXPECT_DOUBLE_EQ(empirical_pq(s0(), t), 0.0);
    TrainingSet none;
    none.add(fv({0}, 2, 1), Label::non_match);
    EXPECT_THROW(empirical_pc(s0(), none), UndefinedMetricError);
}

TEST(Blocks, ConjunctionGroupsByKeyTuple) {
    auto f = six();
    const auto part = materialize_blocks(conjoin(s0(), s1()), *f.index);
    std::set<std::set<std::string>> got;
    for (const auto& b : part.blocks) {
        std::set<std::string> ids;
        for (const auto& r : b) {
            ids.insert(f.dataset().left_source()[r.index].id);
        }
        got.insert(ids);
    }
    // Only a and b share both the soundex code and the city.
    EXPECT_EQ(got, (std::set<std::set<std::string>>{{"a", "b"}, {"c"}, {"d"}, {"e"}, {"f"}}));
}

TEST(Blocks, DisjunctionTakesComponentsAndStaysAPartition) {
    auto f = six();
    const auto part = materialize_blocks(disjoin(s0(), s1()), *f.index);
    std::set<std::set<std::string>> got;
    std::size_t members = 0;
    for (const auto& b : part.blocks) {
        std::set<std::string> ids;
        for (const auto& r : b) {
            ids.insert(f.dataset().left_source()[r.index].id);
        }
        members += b.size();
        got.insert(ids);
    }
    // a-b-f by city, c-d by soundex, c-e by city.
    EXPECT_EQ(got, (std::set<std::set<std::string>>{{"a", "b", "f"}, {"c", "d", "e"}}));
    EXPECT_EQ(members, 6u);
}

TEST(Blocks, NoAgreementGivesSingletons) {
    auto f = fixtures::from_rows({"x"}, {{"1", "a"}, {"2", "b"}, {"3", "c"}}, {}, {pred("x", BlockingFunction::exact())});
    EXPECT_EQ(materialize_blocks(Scheme::predicate(0, 1), *f.index).blocks.size(), 3u);
}

TEST(Monotonicity, DisjunctionRaisesAndConjunctionLowersPc) {
    const auto f = fixtures::planted_people(2, 150);
    const auto exact = exact_histogram(*f.index, f.truth);
    const auto all = oracles::all_schemes(f.index->size(), 2);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int i = 0; i < 500; ++i) {
        const auto& s = all[pick(rng)];
        const auto& t = all[pick(rng)];
        const double a = pc(confusion(s, exact)), b = pc(confusion(t, exact));
        EXPECT_GE(pc(confusion(disjoin(s, t), exact)), std::max(a, b));
        EXPECT_LE(pc(confusion(conjoin(s, t), exact)), std::min(a, b));
    }
}
