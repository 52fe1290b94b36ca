#ifndef SKYBLOCK_SAMPLING_HPP
#define SKYBLOCK_SAMPLING_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "skyblock/blocking.hpp"
#include "skyblock/error.hpp"
#include "skyblock/metrics.hpp"
#include "skyblock/scheme.hpp"
#include "skyblock/training.hpp"

namespace skyblock {

/// (covered - uncovered) / |X| for scheme s over the vectors X.
inline double balance_rate(const Scheme& scheme, const std::vector<FeatureVector>& xs) {
    if (xs.empty()) {
        throw ConfigError("balance rate needs a non-empty vector set");
    }
    std::int64_t diff = 0;
    for (const auto& x : xs) {
        diff += covers(scheme, x) ? 1 : -1;
    }
    return static_cast<double>(diff) / static_cast<double>(xs.size());
}

/// Sum of squared balance rates, the quantity balanced sampling drives down.
inline double sampling_objective(const std::vector<Scheme>& schemes, const std::vector<FeatureVector>& xs) {
    double total = 0.0;
    for (const auto& s : schemes) {
        const double g = balance_rate(s, xs);
        total += g * g;
    }
    return total;
}

/**
 * Records grouped by the tuple of keys of every predicate in a conjunct, so
 * any two records of one group agree on the whole conjunct. A record with a
 * double_metaphone alternate key joins one group per key combination.
 */
class ConjunctIndex {
public:
    struct Group {
        std::vector<RecordIndex> left;
        std::vector<RecordIndex> right;
        std::uint64_t pairs = 0;
    };

    ConjunctIndex(const PredicateIndex& index, const PredicateSet& conjunct) {
        const auto& ds = index.dataset();
        const bool linkage = ds.mode() == DatasetMode::linkage;
        const auto preds = conjunct.indexes();
        std::unordered_map<std::string, std::size_t> slots;
        for (std::size_t side = 0; side < ds.source_count(); ++side) {
            const auto n = ds.source(side).size();
            for (RecordIndex r = 0; r < n; ++r) {
                // Expand the key combinations of this record.
                std::vector<std::string> keys{std::string{}};
                for (auto p : preds) {
                    const auto& c = side == 0 ? index.left_code(p, r) : index.right_code(p, r);
                    std::vector<std::string> next;
                    for (const auto& k : keys) {
                        next.push_back(k + encode_id(c.primary));
                        if (c.alternate != c.primary) {
                            next.push_back(k + encode_id(c.alternate));
                        }
                    }
                    keys = std::move(next);
                }
                for (const auto& k : keys) {
                    auto [it, fresh] = slots.emplace(k, groups_.size());
                    if (fresh) {
                        groups_.emplace_back();
                    }
                    auto& g = groups_[it->second];
                    (linkage && side == 1 ? g.right : g.left).push_back(r);
                }
                records_indexed_ += 1;
            }
        }
        std::vector<Group> kept;
        for (auto& g : groups_) {
            g.pairs = linkage ? static_cast<std::uint64_t>(g.left.size()) * g.right.size()
                              : (g.left.size() < 2 ? 0 : static_cast<std::uint64_t>(g.left.size()) * (g.left.size() - 1) / 2);
            if (g.pairs > 0) {
                total_pairs_ += g.pairs;
                cumulative_.push_back(total_pairs_);
                kept.push_back(std::move(g));
            }
        }
        groups_ = std::move(kept);
    }

    const std::vector<Group>& groups() const { return groups_; }
    /// Pair count summed over groups (a pair sharing two groups counts twice).
    std::uint64_t total_pairs() const { return total_pairs_; }
    std::uint64_t records_indexed() const { return records_indexed_; }

    /// Group chosen with probability proportional to its pair count.
    template <typename Rng>
    const Group& pick(Rng& rng) const {
        std::uniform_int_distribution<std::uint64_t> dist(0, total_pairs_ - 1);
        const auto target = dist(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        return groups_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

private:
    static std::string encode_id(std::uint32_t id) {
        return std::string(reinterpret_cast<const char*>(&id), sizeof id);
    }

    std::vector<Group> groups_;
    std::vector<std::uint64_t> cumulative_;
    std::uint64_t total_pairs_ = 0;
    std::uint64_t records_indexed_ = 0;
};

/// Work counters used to check that drawing samples never rescans the data.
struct SamplerStats {
    std::uint64_t conjunct_indexes_built = 0;
    std::uint64_t records_indexed = 0;
    std::uint64_t proposals = 0;
    std::uint64_t exhaustive_scans = 0;
};

/**
 * Per-session sampling state: seeded RNG, cached conjunct indexes and the
 * set of pairs already drawn. Single writer.
 */
class SamplerState {
public:
    SamplerState(const PredicateIndex& index, std::uint64_t seed, std::uint64_t exhaustive_limit = 4'000'000)
        : index_(&index), rng_(seed), exhaustive_limit_(exhaustive_limit) {}

    const PredicateIndex& index() const { return *index_; }
    std::mt19937_64& rng() { return rng_; }
    const SamplerStats& stats() const { return stats_; }
    SamplerStats& stats() { return stats_; }

    bool sampled(const RecordPair& p) const { return sampled_.count(p.key()) > 0; }
    bool mark(const RecordPair& p) { return sampled_.insert(p.key()).second; }
    std::size_t sampled_count() const { return sampled_.size(); }
    /// Largest pair population the sampler will enumerate once random draws stall.
    std::uint64_t exhaustive_limit() const { return exhaustive_limit_; }

    const ConjunctIndex& conjunct_index(const PredicateSet& conjunct) {
        auto it = conjuncts_.find(conjunct);
        if (it == conjuncts_.end()) {
            auto built = std::make_unique<ConjunctIndex>(*index_, conjunct);
            stats_.conjunct_indexes_built += 1;
            stats_.records_indexed += built->records_indexed();
            it = conjuncts_.emplace(conjunct, std::move(built)).first;
        }
        return *it->second;
    }

    /// Uniformly random comparable pair (not checked against the sampled set).
    RecordPair random_pair() {
        const auto& ds = index_->dataset();
        if (ds.mode() == DatasetMode::linkage) {
            std::uniform_int_distribution<RecordIndex> a(0, static_cast<RecordIndex>(ds.left_source().size() - 1));
            std::uniform_int_distribution<RecordIndex> b(0, static_cast<RecordIndex>(ds.right_source().size() - 1));
            const auto l = a(rng_);
            return {l, b(rng_)};
        }
        const auto n = static_cast<RecordIndex>(ds.left_source().size());
        std::uniform_int_distribution<RecordIndex> a(0, n - 1);
        std::uniform_int_distribution<RecordIndex> b(0, n - 2);
        const auto i = a(rng_);
        auto j = b(rng_);
        if (j >= i) {
            ++j;
        }
        return ds.make_pair(i, j);
    }

    /// Calls fn(pair) for every comparable pair.
    template <typename Fn>
    void for_each_pair(Fn&& fn) {
        stats_.exhaustive_scans += 1;
        const auto& ds = index_->dataset();
        const auto nl = static_cast<RecordIndex>(ds.left_source().size());
        if (ds.mode() == DatasetMode::linkage) {
            const auto nr = static_cast<RecordIndex>(ds.right_source().size());
            for (RecordIndex i = 0; i < nl; ++i) {
                for (RecordIndex j = 0; j < nr; ++j) {
                    fn(RecordPair{i, j});
                }
            }
            return;
        }
        for (RecordIndex i = 0; i < nl; ++i) {
            for (RecordIndex j = i + 1; j < nl; ++j) {
                fn(ds.make_pair(i, j));
            }
        }
    }

private:
    const PredicateIndex* index_;
    std::mt19937_64 rng_;
    std::uint64_t exhaustive_limit_;
    std::unordered_set<std::uint64_t> sampled_;
    std::map<PredicateSet, std::unique_ptr<ConjunctIndex>> conjuncts_;
    SamplerStats stats_;
};

namespace detail {

inline std::size_t attempt_budget(std::size_t k) { return 32 * k + 256; }

/// Shuffles the unsampled candidates and takes up to `need` of them.
inline void take_remaining(std::vector<RecordPair>& candidates, std::size_t need, SamplerState& state,
                           std::vector<FeatureVector>& out) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::shuffle(candidates.begin(), candidates.end(), state.rng());
    for (const auto& p : candidates) {
        if (need == 0) {
            break;
        }
        if (state.mark(p)) {
            out.push_back(make_feature_vector(state.index(), p));
            --need;
        }
    }
}

} // namespace detail

/**
 * Up to k new pairs covered by the scheme. A conjunct is chosen uniformly,
 * then a key group of that conjunct with probability proportional to its
 * pair count, then a pair inside the group. When random draws keep hitting
 * used pairs the remaining population is enumerated, so a short return means
 * the covered population is exhausted.
 */
inline std::vector<FeatureVector> similar_sample(const Scheme& scheme, std::size_t k, SamplerState& state) {
    std::vector<FeatureVector> out;
    if (k == 0) {
        return out;
    }
    const bool linkage = state.index().dataset().mode() == DatasetMode::linkage;
    std::vector<const ConjunctIndex*> eligible;
    std::uint64_t population = 0;
    for (const auto& c : scheme.conjuncts()) {
        const auto& ci = state.conjunct_index(c);
        if (ci.total_pairs() > 0) {
            eligible.push_back(&ci);
            population += ci.total_pairs();
        }
    }
    if (eligible.empty()) {
        return out;
    }
    auto& rng = state.rng();
    std::uniform_int_distribution<std::size_t> which(0, eligible.size() - 1);
    const auto max_attempts = detail::attempt_budget(k);
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < k; ++attempt) {
        state.stats().proposals += 1;
        const auto& group = eligible[which(rng)]->pick(rng);
        RecordPair pair;
        if (linkage) {
            std::uniform_int_distribution<std::size_t> a(0, group.left.size() - 1);
            std::uniform_int_distribution<std::size_t> b(0, group.right.size() - 1);
            const auto l = group.left[a(rng)];
            pair = {l, group.right[b(rng)]};
        } else {
            std::uniform_int_distribution<std::size_t> a(0, group.left.size() - 1);
            std::uniform_int_distribution<std::size_t> b(0, group.left.size() - 2);
            const auto i = a(rng);
            auto j = b(rng);
            if (j >= i) {
                ++j;
            }
            pair = state.index().dataset().make_pair(group.left[i], group.left[j]);
        }
        if (state.mark(pair)) {
            out.push_back(make_feature_vector(state.index(), pair));
        }
    }
    if (out.size() < k && population <= state.exhaustive_limit()) {
        state.stats().exhaustive_scans += 1;
        std::vector<RecordPair> rest;
        for (const auto* ci : eligible) {
            for (const auto& g : ci->groups()) {
                if (linkage) {
                    for (auto l : g.left) {
                        for (auto r : g.right) {
                            if (!state.sampled({l, r})) {
                                rest.push_back({l, r});
                            }
                        }
                    }
                } else {
                    for (std::size_t i = 0; i < g.left.size(); ++i) {
                        for (std::size_t j = i + 1; j < g.left.size(); ++j) {
                            const auto p = state.index().dataset().make_pair(g.left[i], g.left[j]);
                            if (!state.sampled(p)) {
                                rest.push_back(p);
                            }
                        }
                    }
                }
            }
        }
        detail::take_remaining(rest, k - out.size(), state, out);
    }
    return out;
}

/**
 * Up to k new pairs not covered by the scheme. Proposals take records from
 * different buckets of one of the scheme's predicates and are kept when no
 * conjunct holds. If every predicate of the scheme has a single bucket the
 * uncovered population is empty and nothing is returned.
 */
inline std::vector<FeatureVector> dissimilar_sample(const Scheme& scheme, std::size_t k, SamplerState& state) {
    std::vector<FeatureVector> out;
    if (k == 0) {
        return out;
    }
    const auto& index = state.index();
    std::vector<std::size_t> splitting;
    for (auto p : scheme.predicates().indexes()) {
        if (index.buckets(p).size() > 1) {
            splitting.push_back(p);
        }
    }
    if (splitting.empty()) {
        return out;
    }
    auto& rng = state.rng();
    std::uniform_int_distribution<std::size_t> which(0, splitting.size() - 1);
    const auto max_attempts = detail::attempt_budget(k);
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < k; ++attempt) {
        state.stats().proposals += 1;
        const auto p = splitting[which(rng)];
        const auto pair = state.random_pair();
        if (index.agrees(p, pair) || state.sampled(pair)) {
            continue;
        }
        auto fv = make_feature_vector(index, pair);
        if (scheme.covers(fv.bits)) {
            continue;
        }
        state.mark(pair);
        out.push_back(std::move(fv));
    }
    if (out.size() < k && index.dataset().total_pairs() <= state.exhaustive_limit()) {
        std::vector<RecordPair> rest;
        state.for_each_pair([&](const RecordPair& pair) {
            if (!state.sampled(pair) && !coblocked(scheme, pair, index)) {
                rest.push_back(pair);
            }
        });
        detail::take_remaining(rest, k - out.size(), state, out);
    }
    return out;
}

/// Up to k new uniformly random pairs from the comparable-pair universe.
inline std::vector<FeatureVector> random_sample(std::size_t k, SamplerState& state) {
    std::vector<FeatureVector> out;
    if (k == 0 || state.index().dataset().total_pairs() == 0) {
        return out;
    }
    const auto max_attempts = detail::attempt_budget(k);
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < k; ++attempt) {
        state.stats().proposals += 1;
        const auto pair = state.random_pair();
        if (state.mark(pair)) {
            out.push_back(make_feature_vector(state.index(), pair));
        }
    }
    if (out.size() < k && state.index().dataset().total_pairs() <= state.exhaustive_limit()) {
        std::vector<RecordPair> rest;
        state.for_each_pair([&](const RecordPair& pair) {
            if (!state.sampled(pair)) {
                rest.push_back(pair);
            }
        });
        detail::take_remaining(rest, k - out.size(), state, out);
    }
    return out;
}

enum class SampleDirection { similar, dissimilar, random };

struct RoundOutcome {
    std::vector<FeatureVector> vectors;
    /// Direction taken for each scheme that received a share of the round.
    std::vector<SampleDirection> directions;
};

enum class SamplingStrategy { active, random };

/**
 * One sampling round over the candidate schemes. With the active strategy a
 * scheme whose balance rate over X is <= 0 (or X empty) draws similar pairs,
 * otherwise dissimilar ones; the random strategy draws uniform pairs instead.
 * X grows as the round proceeds. At most `limit` vectors are added.
 */
inline RoundOutcome sampling_round(const std::vector<Scheme>& schemes, std::size_t k, std::vector<FeatureVector>& xs,
                                   SamplerState& state, std::size_t limit,
                                   SamplingStrategy strategy = SamplingStrategy::active) {
    RoundOutcome outcome;
    for (const auto& s : schemes) {
        const auto take = std::min(k, limit - outcome.vectors.size());
        if (take == 0) {
            break;
        }
        std::vector<FeatureVector> got;
        if (strategy == SamplingStrategy::random) {
            outcome.directions.push_back(SampleDirection::random);
            got = random_sample(take, state);
        } else if (xs.empty() || balance_rate(s, xs) <= 0.0) {
            outcome.directions.push_back(SampleDirection::similar);
            got = similar_sample(s, take, state);
        } else {
            outcome.directions.push_back(SampleDirection::dissimilar);
            got = dissimilar_sample(s, take, state);
        }
        xs.insert(xs.end(), got.begin(), got.end());
        outcome.vectors.insert(outcome.vectors.end(), got.begin(), got.end());
    }
    return outcome;
}

/// The active-sampling round: pushes each scheme's balance rate toward 0.
inline RoundOutcome active_round(const std::vector<Scheme>& schemes, std::size_t k, std::vector<FeatureVector>& xs,
                                 SamplerState& state, std::size_t limit) {
    return sampling_round(schemes, k, xs, state, limit, SamplingStrategy::active);
}

} // namespace skyblock

#endif
