#ifndef SKYBLOCK_METRICS_HPP
#define SKYBLOCK_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "skyblock/blocking.hpp"
#include "skyblock/datamodel.hpp"
#include "skyblock/error.hpp"
#include "skyblock/scheme.hpp"
#include "skyblock/training.hpp"

namespace skyblock {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t coblocked() const { return tp + fp; }
    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Pair completeness tp / (tp + fn). Undefined without ground-truth matches.
inline double pc(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) {
        throw UndefinedMetricError("pair completeness is undefined without any true match");
    }
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

/// Pair quality tp / (tp + fp); 0 when nothing is co-blocked.
inline double pq(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) {
        return 0.0;
    }
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

/// Reduction ratio 1 - coblocked / comparable pairs.
inline double rr(const ConfusionCounts& c) {
    if (c.total() == 0) {
        throw UndefinedMetricError("reduction ratio is undefined without comparable pairs");
    }
    return 1.0 - static_cast<double>(c.coblocked()) / static_cast<double>(c.total());
}

/// Harmonic mean of PC and PQ, 0 when both are 0.
inline double fm(double pc_value, double pq_value) {
    if (pc_value + pq_value <= 0.0) {
        return 0.0;
    }
    return 2.0 * pc_value * pq_value / (pc_value + pq_value);
}

/// Pair-level co-blocking: some conjunct has all of its predicates agreeing.
inline bool coblocked(const Scheme& scheme, const RecordPair& pair, const PredicateIndex& index) {
    const auto& ds = index.dataset();
    if (pair.left >= ds.left_source().size() || pair.right >= ds.right_source().size()) {
        throw ConfigError("record pair does not resolve in the dataset");
    }
    for (const auto& c : scheme.conjuncts()) {
        bool all = true;
        for (auto p = c.next(0); p < kMaxPredicates; p = c.next(p + 1)) {
            if (!index.agrees(p, pair)) {
                all = false;
                break;
            }
        }
        if (all) {
            return true;
        }
    }
    return false;
}

namespace detail {

/// Predicate of a conjunct with the fewest within-bucket pairs.
inline std::size_t cheapest_predicate(const PredicateSet& conjunct, const PredicateIndex& index) {
    std::size_t best = conjunct.next(0);
    std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
    for (auto p = conjunct.next(0); p < kMaxPredicates; p = conjunct.next(p + 1)) {
        std::uint64_t cost = 0;
        for (std::size_t b = 0; b < index.buckets(p).size(); ++b) {
            cost += index.bucket_pairs(p, b);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = p;
        }
    }
    return best;
}

} // namespace detail

/**
 * Calls `fn(pair)` exactly once for every pair co-blocked by `scheme`.
 *
 * Each conjunct is enumerated from the buckets of its cheapest predicate. A
 * pair reached through conjunct i is reported only if no earlier conjunct
 * covers it and only from the first bucket the two records share.
 */
template <typename Fn>
void for_each_coblocked_pair(const Scheme& scheme, const PredicateIndex& index, Fn&& fn) {
    if (scheme.universe() != index.size()) {
        throw ConfigError("scheme universe does not match the predicate index");
    }
    const auto& conjuncts = scheme.conjuncts();
    for (std::size_t ci = 0; ci < conjuncts.size(); ++ci) {
        const auto& c = conjuncts[ci];
        const auto driver = detail::cheapest_predicate(c, index);
        index.for_each_bucket_pair(driver, [&](const RecordPair& pair, std::uint32_t bucket) {
            if (index.first_shared_bucket(driver, pair) != bucket) {
                return;
            }
            for (auto p = c.next(0); p < kMaxPredicates; p = c.next(p + 1)) {
                if (p != driver && !index.agrees(p, pair)) {
                    return;
                }
            }
            for (std::size_t earlier = 0; earlier < ci; ++earlier) {
                bool all = true;
                for (auto p = conjuncts[earlier].next(0); p < kMaxPredicates; p = conjuncts[earlier].next(p + 1)) {
                    if (!index.agrees(p, pair)) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    return;
                }
            }
            fn(pair);
        });
    }
}

/// Exact confusion counts of a scheme against ground truth, pair-level semantics.
inline ConfusionCounts confusion(const Scheme& scheme, const PredicateIndex& index, const GroundTruth& truth) {
    std::uint64_t coblocked_count = 0;
    for_each_coblocked_pair(scheme, index, [&](const RecordPair&) { ++coblocked_count; });
    std::uint64_t tp = 0;
    for (const auto& m : truth.pairs()) {
        if (coblocked(scheme, m, index)) {
            ++tp;
        }
    }
    ConfusionCounts c;
    c.tp = tp;
    c.fp = coblocked_count - tp;
    c.fn = truth.size() - tp;
    c.tn = index.dataset().total_pairs() - c.tp - c.fp - c.fn;
    return c;
}

/// Counts over a signature histogram (exact or training-set based).
inline ConfusionCounts confusion(const Scheme& scheme, const SignatureHistogram& histogram) {
    ConfusionCounts c;
    for (const auto& cell : histogram.cells()) {
        if (scheme.covers(cell.signature)) {
            c.tp += cell.matches;
            c.fp += cell.non_matches;
        }
    }
    c.fn = histogram.total_matches() - c.tp;
    c.tn = histogram.total_pairs() - c.tp - c.fp - c.fn;
    return c;
}

/**
 * Signature histogram of the whole pair universe. Only pairs agreeing on at
 * least one predicate are enumerated (from the inverted index); the rest are
 * folded into the totals. Evaluating a scheme against it costs one pass over
 * the distinct signatures.
 */
inline SignatureHistogram exact_histogram(const PredicateIndex& index, const GroundTruth& truth) {
    SignatureHistogram h;
    std::uint64_t listed = 0;
    std::uint64_t listed_matches = 0;
    for (std::size_t p = 0; p < index.size(); ++p) {
        index.for_each_bucket_pair(p, [&](const RecordPair& pair, std::uint32_t bucket) {
            if (index.first_shared_bucket(p, pair) != bucket) {
                return;
            }
            for (std::size_t earlier = 0; earlier < p; ++earlier) {
                if (index.agrees(earlier, pair)) {
                    return;
                }
            }
            const bool is_match = truth.contains(pair);
            h.add(index.signature(pair), is_match);
            ++listed;
            listed_matches += is_match ? 1 : 0;
        });
    }
    h.add_unlisted(index.dataset().total_pairs() - listed, truth.size() - listed_matches);
    return h;
}

/// Fraction of labeled matches in T covered by the scheme.
inline double empirical_pc(const Scheme& scheme, const TrainingSet& t) {
    std::uint64_t matches = 0;
    std::uint64_t covered = 0;
    for (const auto& e : t.entries()) {
        if (e.y == Label::match) {
            ++matches;
            if (covers(scheme, e.x)) {
                ++covered;
            }
        }
    }
    if (matches == 0) {
        throw UndefinedMetricError("scheme not evaluable yet: training set has no match label");
    }
    return static_cast<double>(covered) / static_cast<double>(matches);
}

/// Fraction of covered vectors in T labeled as matches; 0 when nothing is covered.
inline double empirical_pq(const Scheme& scheme, const TrainingSet& t) {
    std::uint64_t covered = 0;
    std::uint64_t covered_matches = 0;
    for (const auto& e : t.entries()) {
        if (covers(scheme, e.x)) {
            ++covered;
            if (e.y == Label::match) {
                ++covered_matches;
            }
        }
    }
    return covered == 0 ? 0.0 : static_cast<double>(covered_matches) / static_cast<double>(covered);
}

struct RecordRef {
    std::uint32_t source = 0;
    RecordIndex index = 0;
    auto operator<=>(const RecordRef&) const = default;
};

/// Disjoint blocks covering every record of the dataset.
struct BlockPartition {
    std::vector<std::vector<RecordRef>> blocks;
};

/**
 * Blocks as connected components of the co-blocked relation. For a
 * conjunction of single-key functions these are exactly the groups sharing
 * the tuple of keys; for disjunctions (and double_metaphone) the closure
 * merges chains so the blocks stay disjoint. In linkage mode a component may
 * hold records of both sources.
 */
inline BlockPartition materialize_blocks(const Scheme& scheme, const PredicateIndex& index) {
    const auto& ds = index.dataset();
    const bool linkage = ds.mode() == DatasetMode::linkage;
    const std::size_t n_left = ds.left_source().size();
    const std::size_t n = linkage ? n_left + ds.right_source().size() : n_left;

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for_each_coblocked_pair(scheme, index, [&](const RecordPair& pair) {
        const auto a = find(pair.left);
        const auto b = find(linkage ? n_left + pair.right : pair.right);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    });

    std::map<std::size_t, std::size_t> slot;
    BlockPartition out;
    for (std::size_t x = 0; x < n; ++x) {
        const auto root = find(x);
        auto [it, fresh] = slot.emplace(root, out.blocks.size());
        if (fresh) {
            out.blocks.emplace_back();
        }
        const RecordRef ref = (linkage && x >= n_left)
                                  ? RecordRef{1, static_cast<RecordIndex>(x - n_left)}
                                  : RecordRef{0, static_cast<RecordIndex>(x)};
        out.blocks[it->second].push_back(ref);
    }
    return out;
}

} // namespace skyblock

#endif
