#ifndef SKYBLOCK_TRAINING_HPP
#define SKYBLOCK_TRAINING_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "skyblock/blocking.hpp"
#include "skyblock/datamodel.hpp"
#include "skyblock/error.hpp"
#include "skyblock/scheme.hpp"

namespace skyblock {

enum class Label { match, non_match };

inline char label_char(Label l) { return l == Label::match ? 'M' : 'N'; }

inline Label parse_label(std::string_view text) {
    if (text == "M" || text == "m") {
        return Label::match;
    }
    if (text == "N" || text == "n") {
        return Label::non_match;
    }
    throw ConfigError("label must be M or N, got '" + std::string(text) + "'");
}

struct FeatureVector {
    RecordPair pair;
    PredicateSet bits;
    /// Size of the predicate universe the bits were computed against.
    std::size_t dimension = 0;
};

inline FeatureVector make_feature_vector(const PredicateIndex& index, const RecordPair& pair) {
    return {pair, index.signature(pair), index.size()};
}

inline bool covers(const Scheme& scheme, const FeatureVector& fv) {
    if (fv.dimension != scheme.universe()) {
        throw ConfigError("feature vector has dimension " + std::to_string(fv.dimension) + ", scheme universe is " +
                          std::to_string(scheme.universe()));
    }
    return scheme.covers(fv.bits);
}

struct LabeledVector {
    FeatureVector x;
    Label y;
};

/// Labeled feature vectors with at most one entry per pair.
class TrainingSet {
public:
    /// Returns false (and ignores the entry) when the pair is already present.
    bool add(const FeatureVector& x, Label y) {
        if (!keys_.insert(x.pair.key()).second) {
            return false;
        }
        entries_.push_back({x, y});
        if (y == Label::match) {
            ++matches_;
        }
        return true;
    }

    void merge(const TrainingSet& other) {
        for (const auto& e : other.entries_) {
            add(e.x, e.y);
        }
    }

    bool contains(const RecordPair& p) const { return keys_.count(p.key()) > 0; }
    const std::vector<LabeledVector>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t matches() const { return matches_; }

private:
    std::vector<LabeledVector> entries_;
    std::unordered_set<std::uint64_t> keys_;
    std::size_t matches_ = 0;
};

/**
 * Pair counts grouped by agreement signature. Any monotone scheme either
 * covers every pair of a signature or none, so confusion counts of a scheme
 * are sums over signatures. Pairs agreeing on no predicate are only counted
 * in the totals.
 */
class SignatureHistogram {
public:
    struct Cell {
        PredicateSet signature;
        std::uint64_t matches = 0;
        std::uint64_t non_matches = 0;
    };

    void add(const PredicateSet& signature, bool is_match, std::uint64_t count = 1) {
        if (is_match) {
            total_matches_ += count;
        }
        total_pairs_ += count;
        if (signature.empty()) {
            return;
        }
        auto [it, fresh] = slots_.emplace(signature, cells_.size());
        if (fresh) {
            cells_.push_back({signature, 0, 0});
        }
        auto& cell = cells_[it->second];
        (is_match ? cell.matches : cell.non_matches) += count;
    }

    /// Adds pairs not individually listed (their signature is empty).
    void add_unlisted(std::uint64_t pairs, std::uint64_t matches) {
        total_pairs_ += pairs;
        total_matches_ += matches;
    }

    const std::vector<Cell>& cells() const { return cells_; }
    std::uint64_t total_pairs() const { return total_pairs_; }
    std::uint64_t total_matches() const { return total_matches_; }

    static SignatureHistogram of(const TrainingSet& t) {
        SignatureHistogram h;
        for (const auto& e : t.entries()) {
            h.add(e.x.bits, e.y == Label::match);
        }
        return h;
    }

private:
    std::vector<Cell> cells_;
    std::unordered_map<PredicateSet, std::size_t, PredicateSetHash> slots_;
    std::uint64_t total_pairs_ = 0;
    std::uint64_t total_matches_ = 0;
};

} // namespace skyblock

#endif
