#ifndef SKYBLOCK_LEARNER_HPP
#define SKYBLOCK_LEARNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skyblock/blocking.hpp"
#include "skyblock/error.hpp"
#include "skyblock/metrics.hpp"
#include "skyblock/oracle.hpp"
#include "skyblock/sampling.hpp"
#include "skyblock/scheme.hpp"
#include "skyblock/training.hpp"

namespace skyblock {

/// Whether coordinates were estimated from a training set or computed on full ground truth.
enum class Provenance { empirical, exact };

struct SchemePoint {
    Scheme scheme;
    double pc = 0.0;
    double pq = 0.0;
    Provenance provenance = Provenance::empirical;
};

inline bool dominates(const SchemePoint& a, const SchemePoint& b) {
    if (a.provenance != b.provenance) {
        throw ConfigError("cannot compare empirical and exact scheme points");
    }
    return a.pc >= b.pc && a.pq >= b.pq && (a.pc > b.pc || a.pq > b.pq);
}

enum class Region { dominated_space, skyline_space, dominating_space, equal };

inline std::string region_name(Region r) {
    switch (r) {
    case Region::dominated_space:
        return "dominated_space";
    case Region::skyline_space:
        return "skyline_space";
    case Region::dominating_space:
        return "dominating_space";
    case Region::equal:
        return "equal";
    }
    return "unknown";
}

/// Where the candidate falls relative to the anchor point.
inline Region classify_region(const SchemePoint& candidate, const SchemePoint& anchor) {
    if (dominates(candidate, anchor)) {
        return Region::dominating_space;
    }
    if (dominates(anchor, candidate)) {
        return Region::dominated_space;
    }
    if (candidate.pc == anchor.pc && candidate.pq == anchor.pq) {
        return Region::equal;
    }
    return Region::skyline_space;
}

/**
 * Non-dominated subset, ordered by descending PC. Points sharing both
 * coordinates collapse to the one with the smallest scheme.
 */
inline std::vector<SchemePoint> skyline_of(std::vector<SchemePoint> points) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].provenance != points[0].provenance) {
            throw ConfigError("cannot mix empirical and exact scheme points in one skyline");
        }
    }
    std::sort(points.begin(), points.end(), [](const SchemePoint& a, const SchemePoint& b) {
        if (a.pc != b.pc) {
            return a.pc > b.pc;
        }
        if (a.pq != b.pq) {
            return a.pq > b.pq;
        }
        return a.scheme < b.scheme;
    });
    std::vector<SchemePoint> out;
    for (auto& p : points) {
        // Every earlier point has pc >= p.pc, so p survives only with a strictly better pq.
        if (out.empty() || p.pq > out.back().pq) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

inline SchemePoint point_from(const Scheme& s, const SignatureHistogram& h, Provenance provenance) {
    const auto c = confusion(s, h);
    return {s, pc(c), pq(c), provenance};
}

/// Empirical coordinates of every scheme over T.
inline std::vector<SchemePoint> empirical_points(const std::vector<Scheme>& schemes, const TrainingSet& t) {
    if (t.matches() == 0) {
        throw UndefinedMetricError("scheme not evaluable yet: training set has no match label");
    }
    const auto h = SignatureHistogram::of(t);
    std::vector<SchemePoint> out;
    out.reserve(schemes.size());
    for (const auto& s : schemes) {
        out.push_back(point_from(s, h, Provenance::empirical));
    }
    return out;
}

/// Exact coordinates of the given schemes from a whole-universe histogram.
inline std::vector<SchemePoint> exact_points(const std::vector<Scheme>& schemes, const SignatureHistogram& exact) {
    std::vector<SchemePoint> out;
    out.reserve(schemes.size());
    for (const auto& s : schemes) {
        out.push_back(point_from(s, exact, Provenance::exact));
    }
    return out;
}

namespace detail {

// Feasibility tolerance so thresholds built as i * delta are not missed by rounding.
constexpr double kThresholdSlack = 1e-9;

inline bool better_optimal(const SchemePoint& a, const SchemePoint& b) {
    if (a.pq != b.pq) {
        return a.pq > b.pq;
    }
    if (a.pc != b.pc) {
        return a.pc > b.pc;
    }
    return a.scheme < b.scheme;
}

inline bool better_approximate(const SchemePoint& a, const SchemePoint& b) {
    if (a.pc != b.pc) {
        return a.pc > b.pc;
    }
    if (a.pq != b.pq) {
        return a.pq > b.pq;
    }
    return a.scheme < b.scheme;
}

inline std::optional<SchemePoint> optimal_point(const std::vector<SchemePoint>& points, double epsilon) {
    std::optional<SchemePoint> best;
    for (const auto& p : points) {
        if (p.pc + kThresholdSlack < epsilon) {
            continue;
        }
        if (!best || better_optimal(p, *best)) {
            best = p;
        }
    }
    return best;
}

inline SchemePoint approximate_point(const std::vector<SchemePoint>& points) {
    if (points.empty()) {
        throw ConfigError("no candidate schemes");
    }
    const SchemePoint* best = &points.front();
    for (const auto& p : points) {
        if (better_approximate(p, *best)) {
            best = &p;
        }
    }
    return *best;
}

inline void label_into(OracleSession& session, const std::vector<FeatureVector>& xs, TrainingSet& t) {
    for (const auto& x : xs) {
        t.add(x, session.label(x));
    }
}

/// A sampling round; a round that finds nothing new falls back to random pairs.
inline std::vector<FeatureVector> gather(const std::vector<Scheme>& schemes, std::size_t k,
                                         std::vector<FeatureVector>& xs, SamplerState& sampler, std::size_t limit,
                                         SamplingStrategy strategy) {
    auto got = sampling_round(schemes, k, xs, sampler, limit, strategy).vectors;
    if (got.empty() && limit > 0) {
        got = random_sample(std::min(std::max<std::size_t>(k, 1), limit), sampler);
        xs.insert(xs.end(), got.begin(), got.end());
    }
    return got;
}

inline std::vector<Scheme> unique_schemes(std::vector<Scheme> schemes) {
    std::sort(schemes.begin(), schemes.end());
    schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
    return schemes;
}

} // namespace detail

/// Highest empirical PQ among schemes with empirical PC >= epsilon.
inline std::optional<Scheme> find_optimal_scheme(const std::vector<Scheme>& schemes, const TrainingSet& t,
                                                 double epsilon) {
    auto best = detail::optimal_point(empirical_points(schemes, t), epsilon);
    if (!best) {
        return std::nullopt;
    }
    return best->scheme;
}

/// Highest empirical PC; used when no scheme reaches the threshold.
inline Scheme find_approximate_scheme(const std::vector<Scheme>& schemes, const TrainingSet& t, double /*epsilon*/) {
    return detail::approximate_point(empirical_points(schemes, t)).scheme;
}

/// Deterministic per-stream seed (splitmix64 of base and stream).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct LearnerEvent {
    std::string algorithm;
    std::size_t round = 0;
    std::uint64_t labels_used = 0;
    /// Current skyline (empirical); for a single ASL run, its current scheme.
    std::vector<SchemePoint> skyline;
};

using LearnerObserver = std::function<void(const LearnerEvent&)>;

struct AslOptions {
    double epsilon = 0.5;
    std::uint64_t budget = 0;
    std::size_t k = 10;
    std::uint64_t seed = 1;
    SamplingStrategy strategy = SamplingStrategy::active;
    /// Candidates with more predicates are dropped; 0 means no cap.
    std::size_t max_ary = 0;
};

struct AslResult {
    Scheme scheme;
    SchemePoint point;
    /// False when the last selection fell back to the highest-PC scheme.
    bool feasible = false;
    TrainingSet training;
    std::size_t rounds = 0;
    std::size_t candidates_evaluated = 0;
    std::uint64_t labels_used = 0;
};

/**
 * Active scheme learning for one PC threshold. Starts from the single
 * predicates; each round samples k pairs per candidate, labels them, picks
 * the best feasible candidate and conjoins it with the previous candidates,
 * or, when none is feasible, disjoins the highest-PC candidate with them.
 */
inline AslResult asl(const PredicateIndex& index, OracleSession& session, const AslOptions& opt,
                     const LearnerObserver& observer = {}) {
    if (!(opt.epsilon > 0.0 && opt.epsilon <= 1.0 + detail::kThresholdSlack)) {
        throw ConfigError("PC threshold must lie in (0, 1]");
    }
    if (opt.k == 0) {
        throw ConfigError("sample size k must be at least 1");
    }
    const std::uint64_t budget = std::min(opt.budget, session.remaining());
    if (budget == 0) {
        throw NoSchemeError("no label budget for scheme learning");
    }
    const std::uint64_t start = session.used();
    SamplerState sampler(index, opt.seed);
    std::vector<FeatureVector> xs;
    TrainingSet t;
    std::vector<Scheme> candidates = single_predicate_schemes(index.size());
    std::optional<SchemePoint> current;
    bool feasible = false;
    std::size_t rounds = 0;
    std::size_t evaluated = 0;

    auto seed_sample = random_sample(static_cast<std::size_t>(std::min<std::uint64_t>(opt.k, budget)), sampler);
    xs.insert(xs.end(), seed_sample.begin(), seed_sample.end());
    detail::label_into(session, seed_sample, t);

    auto select = [&] {
        const auto points = empirical_points(candidates, t);
        evaluated += points.size();
        const auto prev = candidates;
        if (auto best = detail::optimal_point(points, opt.epsilon)) {
            current = *best;
            feasible = true;
            candidates.clear();
            for (const auto& s : prev) {
                candidates.push_back(conjoin(current->scheme, s));
            }
        } else {
            current = detail::approximate_point(points);
            feasible = false;
            candidates.clear();
            for (const auto& s : prev) {
                candidates.push_back(disjoin(current->scheme, s));
            }
        }
        candidates = detail::unique_schemes(std::move(candidates));
        if (opt.max_ary > 0) {
            std::erase_if(candidates, [&](const Scheme& s) { return s.ary() > opt.max_ary; });
            if (candidates.empty()) {
                candidates.push_back(current->scheme);
            }
        }
    };

    while (xs.size() < budget) {
        const auto fresh = detail::gather(candidates, opt.k, xs, sampler, budget - xs.size(), opt.strategy);
        if (fresh.empty()) {
            break;
        }
        detail::label_into(session, fresh, t);
        ++rounds;
        if (t.matches() == 0) {
            continue;
        }
        select();
        if (observer) {
            observer({"asl", rounds, session.used() - start, {*current}});
        }
    }
    if (!current && t.matches() > 0) {
        // The seed sample alone used the whole budget.
        select();
    }
    if (!current) {
        throw NoSchemeError("label budget exhausted before any match was labeled");
    }
    AslResult r{current->scheme, *current, feasible, std::move(t), rounds, evaluated, session.used() - start};
    return r;
}

struct SkylineOptions {
    std::uint64_t budget = 0;
    /// Threshold step for the grid algorithms.
    double delta = 0.1;
    /// Per-scheme sample size; 0 derives it from the budget.
    std::size_t k = 0;
    /// Expected number of ASL rounds used to derive k for the grid algorithms.
    std::size_t expected_depth = 3;
    /// Largest scheme ary considered (l); 0 means no cap for the grid algorithms.
    std::size_t max_ary = 3;
    std::uint64_t seed = 1;
    SamplingStrategy strategy = SamplingStrategy::active;
};

struct AslInvocation {
    double epsilon = 0.0;
    std::uint64_t budget = 0;
    std::uint64_t labels_used = 0;
    std::optional<SchemePoint> point;
    bool feasible = false;
    std::string error;
};

struct SkylineTrace {
    std::size_t rounds = 0;
    std::vector<AslInvocation> invocations;
    std::size_t extensions_replaced = 0;
    std::size_t extensions_added = 0;
    std::size_t extensions_discarded = 0;
};

struct SkylineResult {
    std::string algorithm;
    std::vector<SchemePoint> points;
    std::size_t candidates_evaluated = 0;
    std::uint64_t labels_used = 0;
    std::uint64_t budget = 0;
    SkylineTrace trace;
    TrainingSet training;

    std::vector<Scheme> schemes() const {
        std::vector<Scheme> out;
        for (const auto& p : points) {
            out.push_back(p.scheme);
        }
        return out;
    }
};

namespace detail {

/// Thresholds delta, 2 delta, ... up to 1.
inline std::vector<double> threshold_grid(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ConfigError("threshold step must lie in (0, 1]");
    }
    std::vector<double> out;
    for (std::size_t i = 1;; ++i) {
        const double e = static_cast<double>(i) * delta;
        if (e > 1.0 + kThresholdSlack) {
            break;
        }
        out.push_back(std::min(e, 1.0));
    }
    return out;
}

inline std::uint64_t slice_budget(const SkylineOptions& opt) {
    return static_cast<std::uint64_t>(std::floor(static_cast<double>(opt.budget) * opt.delta + kThresholdSlack));
}

inline std::size_t grid_k(const SkylineOptions& opt, std::uint64_t slice, std::size_t predicates) {
    if (opt.k > 0) {
        return opt.k;
    }
    const auto denom = static_cast<std::uint64_t>(std::max<std::size_t>(opt.expected_depth, 1) * predicates);
    return static_cast<std::size_t>(std::max<std::uint64_t>(1, slice / denom));
}

/// Shared tail of the grid algorithms: one ASL run per threshold chosen by `next`.
template <typename Next>
SkylineResult grid_skyline(const std::string& name, const PredicateIndex& index, OracleSession& session,
                           const SkylineOptions& opt, const LearnerObserver& observer, Next next) {
    const auto slice = slice_budget(opt);
    const auto k = grid_k(opt, slice, index.size());
    const std::uint64_t start = session.used();
    SkylineResult result;
    result.algorithm = name;
    result.budget = opt.budget;
    std::vector<Scheme> learned;

    auto merged = [&]() -> std::vector<SchemePoint> {
        if (learned.empty() || result.training.matches() == 0) {
            return {};
        }
        return skyline_of(empirical_points(detail::unique_schemes(learned), result.training));
    };

    std::optional<double> epsilon = next(std::nullopt, std::nullopt);
    std::size_t stream = 0;
    while (epsilon) {
        AslInvocation inv;
        inv.epsilon = *epsilon;
        inv.budget = slice;
        AslOptions a;
        a.epsilon = *epsilon;
        a.budget = slice;
        a.k = k;
        a.seed = derive_seed(opt.seed, stream++);
        a.strategy = opt.strategy;
        a.max_ary = opt.max_ary;
        const auto before = session.used();
        std::optional<double> learned_pc;
        try {
            LearnerObserver forward;
            if (observer) {
                forward = [&](const LearnerEvent&) {
                    observer({name, result.trace.rounds, session.used() - start, merged()});
                };
            }
            auto r = asl(index, session, a, forward);
            result.trace.rounds += r.rounds;
            result.candidates_evaluated += r.candidates_evaluated;
            inv.point = r.point;
            inv.feasible = r.feasible;
            learned_pc = r.point.pc;
            learned.push_back(r.scheme);
            result.training.merge(r.training);
        } catch (const NoSchemeError& e) {
            inv.error = e.what();
        }
        inv.labels_used = session.used() - before;
        result.trace.invocations.push_back(std::move(inv));
        if (observer) {
            observer({name, result.trace.rounds, session.used() - start, merged()});
        }
        epsilon = next(epsilon, learned_pc);
    }
    result.points = merged();
    result.candidates_evaluated += learned.size();
    result.labels_used = session.used() - start;
    return result;
}

} // namespace detail

/// One ASL run per threshold on the grid delta, 2 delta, ..., each with budget * delta labels.
inline SkylineResult naive_sky(const PredicateIndex& index, OracleSession& session, const SkylineOptions& opt,
                               const LearnerObserver& observer = {}) {
    const auto grid = detail::threshold_grid(opt.delta);
    std::size_t i = 0;
    return detail::grid_skyline("naive", index, session, opt, observer,
                                [&](std::optional<double>, std::optional<double>) -> std::optional<double> {
                                    if (i < grid.size()) {
                                        return grid[i++];
                                    }
                                    return std::nullopt;
                                });
}

/**
 * Like naive_sky, but the next threshold is the learned scheme's empirical
 * PC plus delta, skipping thresholds that would return the same scheme. A
 * run that fails or ends below its threshold advances by delta alone. The
 * last threshold is clamped to 1 while the learned PC is still below 1.
 */
inline SkylineResult active_sky(const PredicateIndex& index, OracleSession& session, const SkylineOptions& opt,
                                const LearnerObserver& observer = {}) {
    detail::threshold_grid(opt.delta);
    return detail::grid_skyline(
        "active", index, session, opt, observer,
        [&](std::optional<double> previous, std::optional<double> learned_pc) -> std::optional<double> {
            if (!previous) {
                return opt.delta;
            }
            const double base = learned_pc ? std::max(*learned_pc, *previous) : *previous;
            if (base >= 1.0 - detail::kThresholdSlack) {
                return std::nullopt;
            }
            // Thresholds up to the learned PC are redundant; 1 itself never is.
            return std::min(base + opt.delta, 1.0);
        });
}

/**
 * Progressive skyline learning. Every round samples for the current
 * candidates, recomputes the skyline of all schemes evaluated so far, and
 * extends each skyline scheme by one predicate in conjunction and
 * disjunction. An extension that dominates its parent replaces it, one that
 * is incomparable joins the pool, anything else is dropped.
 */
inline SkylineResult pro_sky(const PredicateIndex& index, OracleSession& session, const SkylineOptions& opt,
                             const LearnerObserver& observer = {}) {
    const std::size_t l = opt.max_ary;
    if (l == 0) {
        throw ConfigError("maximum ary must be at least 1");
    }
    const std::size_t n_pred = index.size();
    const std::uint64_t budget = std::min(opt.budget, session.remaining());
    if (budget < 2 * l * n_pred) {
        throw NoSchemeError("label budget " + std::to_string(budget) + " is below one full round (" +
                            std::to_string(2 * l * n_pred) + ")");
    }
    const std::size_t k = opt.k > 0 ? opt.k : static_cast<std::size_t>(budget / (2 * l * n_pred));
    const std::uint64_t start = session.used();

    SkylineResult result;
    result.algorithm = "pro";
    result.budget = opt.budget;
    SamplerState sampler(index, opt.seed);
    std::vector<FeatureVector> xs;
    TrainingSet& t = result.training;

    std::set<Scheme> pool;
    for (const auto& s : single_predicate_schemes(n_pred)) {
        pool.insert(s);
    }
    std::vector<Scheme> candidates(pool.begin(), pool.end());

    auto seed_sample = random_sample(static_cast<std::size_t>(std::min<std::uint64_t>(k, budget)), sampler);
    xs.insert(xs.end(), seed_sample.begin(), seed_sample.end());
    detail::label_into(session, seed_sample, t);

    std::vector<SchemePoint> skyline;
    while (xs.size() < budget) {
        const auto fresh = detail::gather(candidates, k, xs, sampler, budget - xs.size(), opt.strategy);
        if (fresh.empty()) {
            break;
        }
        detail::label_into(session, fresh, t);
        ++result.trace.rounds;
        if (t.matches() == 0) {
            continue;
        }
        const auto h = SignatureHistogram::of(t);
        std::vector<SchemePoint> points;
        for (const auto& s : pool) {
            points.push_back(point_from(s, h, Provenance::empirical));
        }
        result.candidates_evaluated += points.size();
        skyline = skyline_of(std::move(points));
        if (observer) {
            observer({"pro", result.trace.rounds, session.used() - start, skyline});
        }

        std::vector<Scheme> next;
        for (const auto& anchor : skyline) {
            const auto used = anchor.scheme.predicates();
            if (anchor.scheme.ary() + 1 > l) {
                continue;
            }
            for (std::size_t p = 0; p < n_pred; ++p) {
                if (used.contains(p)) {
                    continue;
                }
                const auto single = Scheme::predicate(p, n_pred);
                for (const auto& ext : {conjoin(anchor.scheme, single), disjoin(anchor.scheme, single)}) {
                    if (pool.count(ext) > 0) {
                        continue;
                    }
                    const auto point = point_from(ext, h, Provenance::empirical);
                    ++result.candidates_evaluated;
                    switch (classify_region(point, anchor)) {
                    case Region::dominating_space:
                        pool.erase(anchor.scheme);
                        pool.insert(ext);
                        next.push_back(ext);
                        ++result.trace.extensions_replaced;
                        break;
                    case Region::skyline_space:
                        pool.insert(ext);
                        next.push_back(ext);
                        ++result.trace.extensions_added;
                        break;
                    default:
                        ++result.trace.extensions_discarded;
                        break;
                    }
                }
            }
        }
        // With nothing new to explore, keep refining the current skyline.
        candidates = next.empty() ? [&] {
            std::vector<Scheme> s;
            for (const auto& p : skyline) {
                s.push_back(p.scheme);
            }
            return s;
        }()
                                  : detail::unique_schemes(std::move(next));
    }
    if (t.matches() == 0) {
        throw NoSchemeError("label budget exhausted before any match was labeled");
    }
    result.points = skyline_of(empirical_points(std::vector<Scheme>(pool.begin(), pool.end()), t));
    result.candidates_evaluated += pool.size();
    result.labels_used = session.used() - start;
    if (observer) {
        observer({"pro", result.trace.rounds, result.labels_used, result.points});
    }
    return result;
}

} // namespace skyblock

#endif
