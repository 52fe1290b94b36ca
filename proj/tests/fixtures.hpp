// Synthetic datasets with planted ground truth, shared by the unit and
// acceptance tests.
#ifndef SKYBLOCK_TESTS_FIXTURES_HPP
#define SKYBLOCK_TESTS_FIXTURES_HPP

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "skyblock/skyblock.hpp"

namespace fixtures {

using namespace skyblock;

struct Fixture {
    std::shared_ptr<PredicateIndex> index;
    GroundTruth truth;

    const Dataset& dataset() const { return index->dataset(); }
};

inline BlockingPredicate pred(const std::string& attribute, BlockingFunction fn) { return {attribute, fn}; }

/// Small dedup dataset from literal rows (first column is the id).
inline Fixture from_rows(const std::vector<std::string>& schema, const std::vector<std::vector<std::string>>& rows,
                         const std::vector<std::pair<std::string, std::string>>& matches,
                         std::vector<BlockingPredicate> predicates) {
    std::vector<Record> records;
    for (const auto& r : rows) {
        records.push_back({r.front(), std::vector<std::string>(r.begin() + 1, r.end())});
    }
    auto ds = Dataset::dedup(Source(schema, std::move(records)));
    Fixture f{std::make_shared<PredicateIndex>(ds, std::move(predicates)), {}};
    for (const auto& [a, b] : matches) {
        f.truth.add(f.dataset().resolve(a, b));
    }
    return f;
}

namespace detail {

inline std::string pick(const std::vector<std::string>& pool, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
}

inline bool chance(double p, std::mt19937_64& rng) { return std::bernoulli_distribution(p)(rng); }

/// Swaps one interior vowel, which usually keeps the Soundex code.
inline std::string vowel_typo(std::string s, std::mt19937_64& rng) {
    std::vector<std::size_t> at;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (std::string("aeiou").find(s[i]) != std::string::npos) {
            at.push_back(i);
        }
    }
    if (at.empty()) {
        return s + "e";
    }
    const char* vowels = "aeiou";
    const auto i = at[std::uniform_int_distribution<std::size_t>(0, at.size() - 1)(rng)];
    char c = s[i];
    while (c == s[i]) {
        c = vowels[std::uniform_int_distribution<int>(0, 4)(rng)];
    }
    s[i] = c;
    return s;
}

inline const std::vector<std::string>& surnames() {
    static const std::vector<std::string> v{
        "smith",   "smyth",    "schmidt", "johnson", "jonson",  "brown",   "braun",   "miller", "muller",
        "wilson",  "willson",  "taylor",  "tailor",  "thomas",  "tomas",   "moore",   "more",   "martin",
        "martini", "jackson",  "jaxon",   "white",   "wight",   "harris",  "harries", "clark",  "clarke",
        "lewis",   "louis",    "walker",  "wolker",  "hall",    "hale",    "allen",   "allan",  "young",
        "king",    "kingsley", "wright",  "right",   "scott",   "skot",    "green",   "greene", "baker",
        "adams",   "adam",     "nelson",  "neilson", "hill",    "campbell", "mitchell", "roberts", "carter"};
    return v;
}

inline const std::vector<std::string>& given_names() {
    static const std::vector<std::string> v{"anna",  "ben",   "carla", "david", "ella",  "frank", "grace", "henry",
                                            "ivy",   "jack",  "kate",  "liam",  "mia",   "noah",  "olga",  "paul",
                                            "quinn", "rosa",  "sam",   "tina",  "uma",   "victor", "wendy", "xavier",
                                            "yara",  "zach",  "alice", "bruno", "chloe", "dylan"};
    return v;
}

inline const std::vector<std::string>& cities() {
    static const std::vector<std::string> v{"canberra", "sydney", "melbourne", "perth", "hobart", "darwin"};
    return v;
}

} // namespace detail

/**
 * 200 person records from 70 planted entities (1 to 5 records each) with
 * noisy copies. Six predicates over surname, given name, city, postcode and
 * birth year. Every true match agrees on at least one predicate.
 */
inline Fixture planted_people(std::uint64_t seed = 7, std::size_t n_records = 200, double city_noise = 0.15) {
    std::mt19937_64 rng(seed);
    struct Entity {
        std::string surname, given, city, postcode, year;
    };
    std::vector<Entity> entities;
    std::vector<Record> records;
    std::vector<std::pair<std::size_t, std::size_t>> members;  // (entity, record)
    std::uniform_int_distribution<int> postcode(2600, 2680);
    std::uniform_int_distribution<int> year(1950, 1989);
    std::uniform_int_distribution<int> copies(1, 5);
    while (records.size() < n_records) {
        Entity e{detail::pick(detail::surnames(), rng), detail::pick(detail::given_names(), rng),
                 detail::pick(detail::cities(), rng), std::to_string(postcode(rng)), std::to_string(year(rng))};
        const auto eid = entities.size();
        entities.push_back(e);
        const int n = copies(rng);
        for (int c = 0; c < n && records.size() < n_records; ++c) {
            Record r;
            r.id = "r" + std::to_string(1000 + records.size());
            auto surname = e.surname;
            if (detail::chance(0.25, rng)) {
                surname = detail::vowel_typo(surname, rng);
            } else if (detail::chance(0.08, rng)) {
                surname = detail::pick(detail::surnames(), rng);
            }
            auto given = detail::chance(0.2, rng) ? detail::pick(detail::given_names(), rng) : e.given;
            auto city = detail::chance(city_noise, rng) ? detail::pick(detail::cities(), rng) : e.city;
            auto pc = detail::chance(0.3, rng) ? std::to_string(postcode(rng)) : e.postcode;
            auto yr = detail::chance(0.2, rng) ? std::to_string(year(rng)) : e.year;
            r.values = {surname, given, city, pc, yr};
            members.push_back({eid, records.size()});
            records.push_back(std::move(r));
        }
    }
    auto ds = Dataset::dedup(Source({"surname", "given", "city", "postcode", "year"}, records));
    std::vector<BlockingPredicate> preds{
        pred("surname", BlockingFunction::soundex()), pred("surname", BlockingFunction::exact()),
        pred("given", BlockingFunction::exact()),     pred("city", BlockingFunction::exact()),
        pred("postcode", BlockingFunction::exact()),  pred("year", BlockingFunction::exact())};
    Fixture f{std::make_shared<PredicateIndex>(ds, preds), {}};
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (members[i].first == members[j].first) {
                f.truth.add(f.dataset().make_pair(static_cast<RecordIndex>(members[i].second),
                                                  static_cast<RecordIndex>(members[j].second)));
            }
        }
    }
    return f;
}

/**
 * Person registry with a household city that never varies inside an entity
 * and an e-mail address that is unique per entity but often retyped. Every
 * true match agrees on city; e-mail agreement is always a match.
 */
inline Fixture registry_people(std::uint64_t seed = 11, std::size_t n_records = 200, double email_noise = 0.15) {
    std::mt19937_64 rng(seed);
    std::vector<Record> records;
    std::vector<std::size_t> entity;
    std::uniform_int_distribution<int> postcode(2600, 2680);
    std::uniform_int_distribution<int> copies(1, 5);
    std::size_t retyped = 0;
    for (std::size_t e = 0; records.size() < n_records; ++e) {
        const auto surname = detail::pick(detail::surnames(), rng);
        const auto given = detail::pick(detail::given_names(), rng);
        const auto city = detail::pick(detail::cities(), rng);
        const auto pc = std::to_string(postcode(rng));
        const auto email = given + "." + surname + std::to_string(e) + "@example.org";
        const int n = copies(rng);
        for (int c = 0; c < n && records.size() < n_records; ++c) {
            Record r;
            r.id = "r" + std::to_string(1000 + records.size());
            auto s = surname;
            if (detail::chance(0.25, rng)) {
                s = detail::vowel_typo(s, rng);
            } else if (detail::chance(0.08, rng)) {
                s = detail::pick(detail::surnames(), rng);
            }
            r.values = {s, detail::chance(0.2, rng) ? detail::pick(detail::given_names(), rng) : given, city,
                        detail::chance(0.3, rng) ? std::to_string(postcode(rng)) : pc,
                        detail::chance(email_noise, rng) ? "x" + std::to_string(retyped++) + "@mail.test" : email};
            entity.push_back(e);
            records.push_back(std::move(r));
        }
    }
    auto ds = Dataset::dedup(Source({"surname", "given", "city", "postcode", "email"}, records));
    std::vector<BlockingPredicate> preds{
        pred("surname", BlockingFunction::soundex()), pred("surname", BlockingFunction::exact()),
        pred("given", BlockingFunction::exact()),     pred("city", BlockingFunction::exact()),
        pred("postcode", BlockingFunction::exact()),  pred("email", BlockingFunction::exact())};
    Fixture f{std::make_shared<PredicateIndex>(ds, preds), {}};
    for (std::size_t i = 0; i < entity.size(); ++i) {
        for (std::size_t j = i + 1; j < entity.size(); ++j) {
            if (entity[i] == entity[j]) {
                f.truth.add(f.dataset().make_pair(static_cast<RecordIndex>(i), static_cast<RecordIndex>(j)));
            }
        }
    }
    return f;
}

/**
 * 200 records over two hierarchical six-letter codes (three two-letter
 * segments each). Corruption hits the later segments more often, so the
 * exact, first-4 and first-2 predicates on one attribute are nested.
 * Every scheme of ary <= 3 then mixes at most two independent attributes.
 */
inline Fixture nested_codes(std::uint64_t seed = 2, std::size_t n_records = 200) {
    std::mt19937_64 rng(seed);
    const std::vector<std::vector<int>> pools{{6, 5, 5}, {8, 6, 6}};
    const std::vector<std::vector<double>> noise{{0.05, 0.15, 0.35}, {0.1, 0.2, 0.3}};
    auto segment = [](int v) { return std::string{char('a' + v / 26), char('a' + v % 26)}; };
    std::vector<Record> records;
    std::vector<std::size_t> entity;
    std::uniform_int_distribution<int> copies(1, 4);
    for (std::size_t e = 0; records.size() < n_records; ++e) {
        std::vector<std::vector<int>> base(pools.size());
        for (std::size_t a = 0; a < pools.size(); ++a) {
            for (int p : pools[a]) {
                base[a].push_back(std::uniform_int_distribution<int>(0, p - 1)(rng));
            }
        }
        const int n = copies(rng);
        for (int c = 0; c < n && records.size() < n_records; ++c) {
            Record r;
            r.id = "r" + std::to_string(1000 + records.size());
            for (std::size_t a = 0; a < pools.size(); ++a) {
                std::string v;
                for (std::size_t g = 0; g < 3; ++g) {
                    int x = base[a][g];
                    if (detail::chance(noise[a][g], rng)) {
                        x = std::uniform_int_distribution<int>(0, pools[a][g] - 1)(rng);
                    }
                    v += segment(x);
                }
                r.values.push_back(v);
            }
            entity.push_back(e);
            records.push_back(std::move(r));
        }
    }
    auto ds = Dataset::dedup(Source({"region", "code"}, records));
    std::vector<BlockingPredicate> preds;
    for (const auto* a : {"region", "code"}) {
        preds.push_back(pred(a, BlockingFunction::exact()));
        preds.push_back(pred(a, BlockingFunction::substring(4)));
        preds.push_back(pred(a, BlockingFunction::substring(2)));
    }
    Fixture f{std::make_shared<PredicateIndex>(ds, preds), {}};
    for (std::size_t i = 0; i < entity.size(); ++i) {
        for (std::size_t j = i + 1; j < entity.size(); ++j) {
            if (entity[i] == entity[j]) {
                f.truth.add(f.dataset().make_pair(static_cast<RecordIndex>(i), static_cast<RecordIndex>(j)));
            }
        }
    }
    return f;
}

/**
 * 2000 person records in 95 large households (21 or 22 records each), so
 * roughly one comparable pair in 101 is a match. Values drift inside a
 * household; surnames and cities are shared across households. The default
 * e-mail noise puts email.exact at an exact PC of about 0.705.
 */
inline Fixture imbalanced_people(std::uint64_t seed = 5, double email_noise = 0.163) {
    std::mt19937_64 rng(seed);
    std::vector<Record> records;
    std::vector<std::size_t> entity;
    std::uniform_int_distribution<int> postcode(2600, 2680);
    for (std::size_t e = 0; e < 95; ++e) {
        const auto surname = detail::pick(detail::surnames(), rng);
        const auto given = detail::pick(detail::given_names(), rng);
        const auto city = detail::pick(detail::cities(), rng);
        const auto pc = std::to_string(postcode(rng));
        const auto email = given + "." + surname + std::to_string(e) + "@example.org";
        const std::size_t n = e < 90 ? 21 : 22;
        for (std::size_t c = 0; c < n; ++c) {
            Record r;
            r.id = "r" + std::to_string(10000 + records.size());
            auto s = surname;
            if (detail::chance(0.25, rng)) {
                s = detail::vowel_typo(s, rng);
            } else if (detail::chance(0.08, rng)) {
                s = detail::pick(detail::surnames(), rng);
            }
            r.values = {s, detail::chance(0.2, rng) ? detail::pick(detail::given_names(), rng) : given,
                        detail::chance(0.1, rng) ? detail::pick(detail::cities(), rng) : city,
                        detail::chance(0.3, rng) ? std::to_string(postcode(rng)) : pc,
                        detail::chance(email_noise, rng) ? "x" + std::to_string(records.size()) + "@mail.test" : email};
            entity.push_back(e);
            records.push_back(std::move(r));
        }
    }
    auto ds = Dataset::dedup(Source({"surname", "given", "city", "postcode", "email"}, records));
    std::vector<BlockingPredicate> preds{
        pred("surname", BlockingFunction::soundex()), pred("surname", BlockingFunction::exact()),
        pred("given", BlockingFunction::exact()),     pred("city", BlockingFunction::exact()),
        pred("postcode", BlockingFunction::exact()),  pred("email", BlockingFunction::exact())};
    Fixture f{std::make_shared<PredicateIndex>(ds, preds), {}};
    for (std::size_t i = 0; i < entity.size(); ++i) {
        for (std::size_t j = i + 1; j < entity.size() && entity[j] == entity[i]; ++j) {
            f.truth.add(f.dataset().make_pair(static_cast<RecordIndex>(i), static_cast<RecordIndex>(j)));
        }
    }
    return f;
}

} // namespace fixtures

#endif
