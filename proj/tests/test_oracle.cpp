#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace skyblock;
using fixtures::pred;

namespace {

fixtures::Fixture tiny() {
    return fixtures::from_rows({"name"}, {{"a", "Gale"}, {"b", "Gaile"}, {"c", "Smith"}, {"d", "Jones"}},
                               {{"a", "b"}}, {pred("name", BlockingFunction::soundex())});
}

// Says "match" to everything, whatever the ground truth holds.
class Yes : public LabelSource {
public:
    Label answer(const Dataset&, const RecordPair&) override { return Label::match; }
    OracleKind kind() const override { return OracleKind::interactive; }
};

} // namespace

TEST(Session, AnswersFromGroundTruthAndCharges) {
    auto f = tiny();
    const auto& ds = f.dataset();
    OracleSession s(ds, std::make_shared<GroundTruthSource>(f.truth), 3);
    EXPECT_EQ(s.label(ds.resolve("a", "b")), Label::match);
    EXPECT_EQ(s.label(ds.resolve("a", "c")), Label::non_match);
    EXPECT_EQ(s.used(), 2u);
    EXPECT_EQ(s.remaining(), 1u);
    EXPECT_EQ(s.kind(), OracleKind::ground_truth);
}

TEST(Session, BudgetExhaustion) {
    auto f = tiny();
    const auto& ds = f.dataset();
    OracleSession s(ds, std::make_shared<GroundTruthSource>(f.truth), 2);
    s.label(ds.resolve("a", "b"));
    s.label(ds.resolve("c", "d"));
    EXPECT_THROW(s.label(ds.resolve("a", "d")), BudgetExhaustedError);
    EXPECT_EQ(s.used(), 2u);
    EXPECT_EQ(s.log().size(), 2u);

    OracleSession zero(ds, std::make_shared<GroundTruthSource>(f.truth), 0);
    EXPECT_THROW(zero.label(ds.resolve("a", "b")), BudgetExhaustedError);
}

TEST(Session, RepeatedPairIsChargedAgain) {
    auto f = tiny();
    const auto& ds = f.dataset();
    OracleSession s(ds, std::make_shared<GroundTruthSource>(f.truth), 5);
    s.label(ds.resolve("a", "b"));
    s.label(ds.resolve("a", "b"));
    EXPECT_EQ(s.used(), 2u);
}

TEST(Session, SourceAnswerIsFinal) {
    auto f = tiny();
    const auto& ds = f.dataset();
    OracleSession s(ds, std::make_shared<Yes>(), 5);
    EXPECT_EQ(s.label(ds.resolve("c", "d")), Label::match);
    EXPECT_FALSE(f.truth.contains(ds.resolve("c", "d")));
    EXPECT_EQ(s.kind(), OracleKind::interactive);
}

TEST(Session, NullSourceRejected) {
    auto f = tiny();
    EXPECT_THROW(OracleSession(f.dataset(), nullptr, 1), ConfigError);
}

TEST(Log, RecordsIdsInOrder) {
    auto f = tiny();
    const auto& ds = f.dataset();
    OracleSession s(ds, std::make_shared<GroundTruthSource>(f.truth), 10);
    s.label(ds.resolve("b", "a"));
    s.label(ds.resolve("d", "c"));
    const auto log = s.log();
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[0], (LabelLogEntry{1, "a", "b", Label::match}));
    EXPECT_EQ(log[1], (LabelLogEntry{2, "c", "d", Label::non_match}));
}

TEST(Log, CsvRoundTrip) {
    const std::vector<LabelLogEntry> log{{1, "a", "b", Label::match}, {2, "x,y", "c", Label::non_match}};
    std::stringstream io;
    write_label_log(io, log);
    EXPECT_EQ(io.str().substr(0, io.str().find('\n')), "sequence,left_id,right_id,label");
    EXPECT_EQ(read_label_log(io), log);
}

TEST(Log, FileRoundTrip) {
    const std::vector<LabelLogEntry> log{{1, "a", "b", Label::match}};
    const auto path = testing::TempDir() + "skyblock_oracle_log.csv";
    save_label_log(path, log);
    EXPECT_EQ(load_label_log(path), log);
    EXPECT_THROW(load_label_log(path + ".missing"), IngestionError);
}

TEST(Log, MalformedInput) {
    std::istringstream fields("sequence,left_id,right_id,label\n1,a,b\n");
    EXPECT_THROW(read_label_log(fields), IngestionError);
    std::istringstream order("1,a,b,M\n3,a,c,N\n");
    EXPECT_THROW(read_label_log(order), IngestionError);
    std::istringstream label("1,a,b,maybe\n");
    EXPECT_THROW(read_label_log(label), IngestionError);
    std::istringstream seq("x,a,b,M\n");
    EXPECT_THROW(read_label_log(seq), IngestionError);
    std::istringstream empty("sequence,left_id,right_id,label\n");
    EXPECT_TRUE(read_label_log(empty).empty());
}

TEST(Replay, ReturnsLoggedLabels) {
    auto f = tiny();
    const auto& ds = f.dataset();
    // The log overrides ground truth: c-d is replayed as a match.
    auto s = replay(ds, {{1, "c", "d", Label::match}, {2, "a", "b", Label::non_match}});
    EXPECT_EQ(s.budget(), 2u);
    EXPECT_EQ(s.label(ds.resolve("c", "d")), Label::match);
    EXPECT_EQ(s.label(ds.resolve("a", "b")), Label::non_match);
    EXPECT_EQ(s.kind(), OracleKind::replay);
    EXPECT_THROW(s.label(ds.resolve("a", "b")), BudgetExhaustedError);
}

TEST(Replay, DivergenceIsReported) {
    auto f = tiny();
    const auto& ds = f.dataset();
    auto s = replay(ds, {{1, "c", "d", Label::match}});
    try {
        s.label(ds.resolve("a", "b"));
        FAIL() << "expected divergence";
    } catch (const ReplayDivergenceError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("(c, d)"), std::string::npos) << msg;
        EXPECT_NE(msg.find("(a, b)"), std::string::npos) << msg;
    }
    auto longer = replay(ds, {{1, "c", "d", Label::match}}, 5);
    longer.label(ds.resolve("c", "d"));
    EXPECT_THROW(longer.label(ds.resolve("a", "b")), ReplayDivergenceError);
}

TEST(Replay, ReproducesARecordedSession) {
    const auto f = fixtures::planted_people(3, 60);
    const auto& ds = f.dataset();
    OracleSession live(ds, std::make_shared<GroundTruthSource>(f.truth), 100);
    std::vector<Label> first;
    for (RecordIndex i = 1; i < 40; ++i) {
        first.push_back(live.label(ds.make_pair(0, i)));
    }
    auto again = replay(ds, live.log());
    for (RecordIndex i = 1; i < 40; ++i) {
        EXPECT_EQ(again.label(ds.make_pair(0, i)), first[i - 1]);
    }
    EXPECT_EQ(again.log(), live.log());
}
