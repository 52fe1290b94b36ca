#ifndef SKYBLOCK_BLOCKING_HPP
#define SKYBLOCK_BLOCKING_HPP

#include <bitset>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skyblock/datamodel.hpp"
#include "skyblock/error.hpp"
#include "skyblock/phonetic.hpp"

namespace skyblock {

enum class FunctionKind { exact_match, soundex, double_metaphone, get_substring };

struct BlockingFunction {
    FunctionKind kind = FunctionKind::exact_match;
    /// Prefix length for get_substring; ignored otherwise.
    std::size_t substring_length = 4;

    static BlockingFunction exact() { return {FunctionKind::exact_match, 4}; }
    static BlockingFunction soundex() { return {FunctionKind::soundex, 4}; }
    static BlockingFunction double_metaphone() { return {FunctionKind::double_metaphone, 4}; }
    static BlockingFunction substring(std::size_t k = 4) { return {FunctionKind::get_substring, k}; }

    /// Short name used in scheme text: exact, soundex, dmetaphone, substr<k>.
    std::string name() const {
        switch (kind) {
        case FunctionKind::exact_match:
            return "exact";
        case FunctionKind::soundex:
            return "soundex";
        case FunctionKind::double_metaphone:
            return "dmetaphone";
        case FunctionKind::get_substring:
            return "substr" + std::to_string(substring_length);
        }
        return "?";
    }

    /// Accepts the short names and the long forms exact_match, double_metaphone, get_substring.
    static BlockingFunction parse(std::string_view text, std::size_t default_substring = 4) {
        if (text == "exact" || text == "exact_match") {
            return exact();
        }
        if (text == "soundex") {
            return soundex();
        }
        if (text == "dmetaphone" || text == "double_metaphone") {
            return double_metaphone();
        }
        if (text == "get_substring" || text == "substr") {
            return substring(default_substring);
        }
        if (text.starts_with("substr") && text.size() > 6) {
            std::size_t k = 0;
            for (char c : text.substr(6)) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    throw ConfigError("unknown blocking function '" + std::string(text) + "'");
                }
                k = k * 10 + static_cast<std::size_t>(c - '0');
            }
            if (k == 0) {
                throw ConfigError("substring length must be positive");
            }
            return substring(k);
        }
        throw ConfigError("unknown blocking function '" + std::string(text) + "'");
    }

    bool operator==(const BlockingFunction& o) const {
        return kind == o.kind && (kind != FunctionKind::get_substring || substring_length == o.substring_length);
    }
};

/// Trim surrounding whitespace and lower-case ASCII letters.
inline std::string normalize_value(std::string_view value) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0;
    std::size_t e = value.size();
    while (b < e && is_space(value[b])) {
        ++b;
    }
    while (e > b && is_space(value[e - 1])) {
        --e;
    }
    std::string out(value.substr(b, e - b));
    for (char& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 128) {
            c = static_cast<char>(std::tolower(u));
        }
    }
    return out;
}

/// Blocking key of one value. Single-code functions set both fields equal.
struct BlockingCode {
    std::string primary;
    std::string alternate;

    bool operator==(const BlockingCode&) const = default;
};

/// Two codes agree when any key of one equals any key of the other.
inline bool codes_agree(const BlockingCode& a, const BlockingCode& b) {
    return a.primary == b.primary || a.primary == b.alternate || a.alternate == b.primary ||
           a.alternate == b.alternate;
}

namespace detail {

inline std::string utf8_prefix(std::string_view s, std::size_t chars) {
    std::size_t i = 0;
    std::size_t count = 0;
    while (i < s.size() && count < chars) {
        const auto lead = static_cast<unsigned char>(s[i]);
        std::size_t width = 1;
        if (lead >= 0xF0) {
            width = 4;
        } else if (lead >= 0xE0) {
            width = 3;
        } else if (lead >= 0xC0) {
            width = 2;
        }
        i = std::min(s.size(), i + width);
        ++count;
    }
    return std::string(s.substr(0, i));
}

} // namespace detail

/// Encodes a raw attribute value. The value is normalized first; the empty
/// value (or one with no letters, for the phonetic functions) yields "".
inline BlockingCode encode(const BlockingFunction& function, std::string_view value) {
    const std::string v = normalize_value(value);
    switch (function.kind) {
    case FunctionKind::exact_match:
        return {v, v};
    case FunctionKind::soundex: {
        auto c = skyblock::soundex(v);
        return {c, c};
    }
    case FunctionKind::double_metaphone: {
        auto c = skyblock::double_metaphone(v);
        return {c.primary, c.alternate};
    }
    case FunctionKind::get_substring: {
        auto c = detail::utf8_prefix(v, function.substring_length);
        return {c, c};
    }
    }
    return {};
}

struct BlockingPredicate {
    std::string attribute;
    BlockingFunction function;

    std::string name() const { return attribute + "." + function.name(); }
    bool operator==(const BlockingPredicate&) const = default;
};

/// Whether a predicate holds for two records of `dataset`.
inline bool predicate_agrees(const BlockingPredicate& predicate, const Dataset& dataset, const Record& left,
                             const Record& right) {
    const auto a = dataset.attribute_index(predicate.attribute);
    return codes_agree(encode(predicate.function, left.values[a]), encode(predicate.function, right.values[a]));
}

/// Schema order times function order.
inline std::vector<BlockingPredicate> predicate_universe(const std::vector<std::string>& schema,
                                                         const std::vector<BlockingFunction>& functions) {
    std::vector<BlockingPredicate> out;
    out.reserve(schema.size() * functions.size());
    for (const auto& attribute : schema) {
        for (const auto& f : functions) {
            out.push_back({attribute, f});
        }
    }
    return out;
}

inline constexpr std::size_t kMaxPredicates = 128;

/// A set of predicate indexes; doubles as a feature vector's agreement bits.
class PredicateSet {
public:
    PredicateSet() = default;
    PredicateSet(std::initializer_list<std::size_t> indexes) {
        for (auto i : indexes) {
            insert(i);
        }
    }

    void insert(std::size_t i) {
        if (i >= kMaxPredicates) {
            throw ConfigError("predicate index " + std::to_string(i) + " exceeds the supported maximum");
        }
        bits_.set(i);
    }
    bool contains(std::size_t i) const { return i < kMaxPredicates && bits_.test(i); }
    std::size_t count() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }
    bool subset_of(const PredicateSet& o) const { return (bits_ & ~o.bits_).none(); }

    PredicateSet operator|(const PredicateSet& o) const {
        PredicateSet r;
        r.bits_ = bits_ | o.bits_;
        return r;
    }

    /// Smallest index not below `from`, or kMaxPredicates.
    std::size_t next(std::size_t from) const {
        for (std::size_t i = from; i < kMaxPredicates; ++i) {
            if (bits_.test(i)) {
                return i;
            }
        }
        return kMaxPredicates;
    }

    std::vector<std::size_t> indexes() const {
        std::vector<std::size_t> out;
        for (auto i = next(0); i < kMaxPredicates; i = next(i + 1)) {
            out.push_back(i);
        }
        return out;
    }

    /// Lexicographic order of the ascending index lists.
    std::strong_ordering operator<=>(const PredicateSet& o) const {
        std::size_t a = next(0);
        std::size_t b = o.next(0);
        while (a < kMaxPredicates && b < kMaxPredicates) {
            if (a != b) {
                return a <=> b;
            }
            a = next(a + 1);
            b = o.next(b + 1);
        }
        const bool a_done = a == kMaxPredicates;
        const bool b_done = b == kMaxPredicates;
        if (a_done && b_done) {
            return std::strong_ordering::equal;
        }
        return a_done ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    bool operator==(const PredicateSet& o) const { return bits_ == o.bits_; }

    std::size_t hash() const { return std::hash<std::bitset<kMaxPredicates>>{}(bits_); }

private:
    std::bitset<kMaxPredicates> bits_;
};

struct PredicateSetHash {
    std::size_t operator()(const PredicateSet& s) const { return s.hash(); }
};

/**
 * Blocking codes of every record under every predicate, interned to integer
 * ids, plus the inverted index (code id -> records) per predicate.
 *
 * Built once in O(|D| * |P|) encodings. A record sits in one bucket per
 * distinct key, so two buckets for a double_metaphone value with an
 * alternate key.
 */
class PredicateIndex {
public:
    struct CodeIds {
        std::uint32_t primary = 0;
        std::uint32_t alternate = 0;
    };

    struct Bucket {
        std::vector<RecordIndex> left;
        /// Linkage mode only; dedup buckets keep every member in `left`.
        std::vector<RecordIndex> right;
    };

    PredicateIndex(Dataset dataset, std::vector<BlockingPredicate> predicates)
        : dataset_(std::move(dataset)), predicates_(std::move(predicates)) {
        if (predicates_.empty()) {
            throw ConfigError("predicate universe is empty");
        }
        if (predicates_.size() > kMaxPredicates) {
            throw ConfigError("at most " + std::to_string(kMaxPredicates) + " predicates are supported");
        }
        const bool linkage = dataset_.mode() == DatasetMode::linkage;
        codes_.resize(predicates_.size());
        buckets_.resize(predicates_.size());
        for (std::size_t p = 0; p < predicates_.size(); ++p) {
            const auto attr = dataset_.attribute_index(predicates_[p].attribute);
            std::unordered_map<std::string, std::uint32_t> interned;
            auto intern = [&](const std::string& code) {
                auto [it, fresh] = interned.emplace(code, static_cast<std::uint32_t>(interned.size()));
                if (fresh) {
                    buckets_[p].emplace_back();
                }
                return it->second;
            };
            codes_[p].resize(dataset_.source_count());
            for (std::size_t side = 0; side < dataset_.source_count(); ++side) {
                const auto& src = dataset_.source(side);
                auto& ids = codes_[p][side];
                ids.resize(src.size());
                for (RecordIndex r = 0; r < src.size(); ++r) {
                    const auto code = encode(predicates_[p].function, src[r].values[attr]);
                    ids[r].primary = intern(code.primary);
                    ids[r].alternate = intern(code.alternate);
                    const auto members = (linkage && side == 1) ? &Bucket::right : &Bucket::left;
                    (buckets_[p][ids[r].primary].*members).push_back(r);
                    if (ids[r].alternate != ids[r].primary) {
                        (buckets_[p][ids[r].alternate].*members).push_back(r);
                    }
                }
            }
        }
    }

    const Dataset& dataset() const { return dataset_; }
    const std::vector<BlockingPredicate>& predicates() const { return predicates_; }
    std::size_t size() const { return predicates_.size(); }

    std::vector<std::string> predicate_names() const {
        std::vector<std::string> names;
        for (const auto& p : predicates_) {
            names.push_back(p.name());
        }
        return names;
    }

    const CodeIds& left_code(std::size_t predicate, RecordIndex r) const { return codes_[predicate].front()[r]; }
    const CodeIds& right_code(std::size_t predicate, RecordIndex r) const { return codes_[predicate].back()[r]; }
    const std::vector<Bucket>& buckets(std::size_t predicate) const { return buckets_[predicate]; }

    bool agrees(std::size_t predicate, const RecordPair& pair) const {
        const auto& a = left_code(predicate, pair.left);
        const auto& b = right_code(predicate, pair.right);
        return a.primary == b.primary || a.primary == b.alternate || a.alternate == b.primary ||
               a.alternate == b.alternate;
    }

    /// Agreement bits of every predicate for the pair.
    PredicateSet signature(const RecordPair& pair) const {
        PredicateSet bits;
        for (std::size_t p = 0; p < predicates_.size(); ++p) {
            if (agrees(p, pair)) {
                bits.insert(p);
            }
        }
        return bits;
    }

    /// Lowest bucket id shared by the pair under a predicate; used to count
    /// a pair once when it co-occurs in two buckets.
    std::uint32_t first_shared_bucket(std::size_t predicate, const RecordPair& pair) const {
        const auto& a = left_code(predicate, pair.left);
        const auto& b = right_code(predicate, pair.right);
        std::uint32_t best = UINT32_MAX;
        for (auto x : {a.primary, a.alternate}) {
            if (x == b.primary || x == b.alternate) {
                best = std::min(best, x);
            }
        }
        return best;
    }

    /// Number of pairs that share bucket `b` of predicate `p` (pairs shared
    /// through two buckets are counted in both).
    std::uint64_t bucket_pairs(std::size_t p, std::size_t b) const {
        const auto& bucket = buckets_[p][b];
        if (dataset_.mode() == DatasetMode::linkage) {
            return static_cast<std::uint64_t>(bucket.left.size()) * bucket.right.size();
        }
        const std::uint64_t n = bucket.left.size();
        return n < 2 ? 0 : n * (n - 1) / 2;
    }

    /// Calls `fn(pair, bucket_id)` for every pair inside each bucket of predicate `p`.
    template <typename Fn>
    void for_each_bucket_pair(std::size_t p, Fn&& fn) const {
        const bool linkage = dataset_.mode() == DatasetMode::linkage;
        const auto& bs = buckets_[p];
        for (std::size_t b = 0; b < bs.size(); ++b) {
            const auto& bucket = bs[b];
            if (linkage) {
                for (auto l : bucket.left) {
                    for (auto r : bucket.right) {
                        fn(RecordPair{l, r}, static_cast<std::uint32_t>(b));
                    }
                }
            } else {
                for (std::size_t i = 0; i < bucket.left.size(); ++i) {
                    for (std::size_t j = i + 1; j < bucket.left.size(); ++j) {
                        fn(dataset_.make_pair(bucket.left[i], bucket.left[j]), static_cast<std::uint32_t>(b));
                    }
                }
            }
        }
    }

private:
    Dataset dataset_;
    std::vector<BlockingPredicate> predicates_;
    // codes_[predicate][source][record]
    std::vector<std::vector<std::vector<CodeIds>>> codes_;
    std::vector<std::vector<Bucket>> buckets_;
};

} // namespace skyblock

#endif
