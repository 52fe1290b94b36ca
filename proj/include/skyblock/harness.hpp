#ifndef SKYBLOCK_HARNESS_HPP
#define SKYBLOCK_HARNESS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skyblock/learner.hpp"
#include "skyblock/metrics.hpp"
#include "skyblock/oracle.hpp"

namespace skyblock {

enum class Algorithm { asl, rsl, naive, active, pro };

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::asl:
        return "asl";
    case Algorithm::rsl:
        return "rsl";
    case Algorithm::naive:
        return "naive";
    case Algorithm::active:
        return "active";
    case Algorithm::pro:
        return "pro";
    }
    return "unknown";
}

inline Algorithm parse_algorithm(const std::string& s) {
    for (auto a : {Algorithm::asl, Algorithm::rsl, Algorithm::naive, Algorithm::active, Algorithm::pro}) {
        if (algorithm_name(a) == s) {
            return a;
        }
    }
    throw ConfigError("unknown algorithm '" + s + "' (expected asl, rsl, naive, active or pro)");
}

inline bool is_skyline_algorithm(Algorithm a) { return a == Algorithm::naive || a == Algorithm::active || a == Algorithm::pro; }

struct ExperimentPlan {
    Algorithm algorithm = Algorithm::pro;
    std::uint64_t budget = 0;
    /// PC threshold for asl / rsl.
    double epsilon = 0.5;
    double delta = 0.1;
    /// 0 derives the sample size from the budget.
    std::size_t k = 0;
    std::size_t expected_depth = 3;
    /// l for pro; cap on candidate ary for the others (0 = none).
    std::size_t max_ary = 3;
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 1;
};

inline void validate(const ExperimentPlan& plan) {
    if (plan.repetitions == 0) {
        throw ConfigError("repetitions must be at least 1");
    }
}

/// Result of one seeded run, reduced to what stability counting needs.
struct RunOutcome {
    /// Canonical identity: scheme text, or sorted skyline scheme texts; "no-scheme" on failure.
    std::string identity;
    bool ok = false;
    std::uint64_t labels_used = 0;
    std::optional<AslResult> asl;
    std::optional<SkylineResult> skyline;
};

inline constexpr const char* kNoScheme = "no-scheme";

inline std::string skyline_identity(const std::vector<SchemePoint>& points, const std::vector<std::string>& names) {
    std::vector<Scheme> schemes;
    for (const auto& p : points) {
        schemes.push_back(p.scheme);
    }
    std::sort(schemes.begin(), schemes.end());
    std::string out;
    for (const auto& s : schemes) {
        if (!out.empty()) {
            out += " | ";
        }
        out += s.to_string(names);
    }
    return out.empty() ? std::string(kNoScheme) : out;
}

inline std::size_t derived_asl_k(const ExperimentPlan& plan, std::size_t predicates) {
    if (plan.k > 0) {
        return plan.k;
    }
    const auto denom = static_cast<std::uint64_t>(std::max<std::size_t>(plan.expected_depth, 1) * predicates);
    return static_cast<std::size_t>(std::max<std::uint64_t>(1, plan.budget / denom));
}

/// Runs the planned algorithm once against the given session.
inline RunOutcome run_with_session(const PredicateIndex& index, OracleSession& session, const ExperimentPlan& plan,
                                   std::uint64_t seed, const LearnerObserver& observer = {}) {
    RunOutcome out;
    const auto names = index.predicate_names();
    const auto before = session.used();
    try {
        if (plan.algorithm == Algorithm::asl || plan.algorithm == Algorithm::rsl) {
            AslOptions a;
            a.epsilon = plan.epsilon;
            a.budget = plan.budget;
            a.k = derived_asl_k(plan, index.size());
            a.seed = seed;
            a.strategy = plan.algorithm == Algorithm::rsl ? SamplingStrategy::random : SamplingStrategy::active;
            a.max_ary = plan.max_ary;
            auto r = asl(index, session, a, observer);
            out.identity = r.scheme.to_string(names);
            out.ok = true;
            out.asl = std::move(r);
        } else {
            SkylineOptions o;
            o.budget = plan.budget;
            o.delta = plan.delta;
            o.k = plan.k;
            o.expected_depth = plan.expected_depth;
            o.max_ary = plan.max_ary;
            o.seed = seed;
            SkylineResult r;
            if (plan.algorithm == Algorithm::naive) {
                r = naive_sky(index, session, o, observer);
            } else if (plan.algorithm == Algorithm::active) {
                r = active_sky(index, session, o, observer);
            } else {
                r = pro_sky(index, session, o, observer);
            }
            out.identity = skyline_identity(r.points, names);
            out.ok = !r.points.empty();
            out.skyline = std::move(r);
        }
    } catch (const NoSchemeError&) {
        out.identity = kNoScheme;
        out.ok = false;
    }
    out.labels_used = session.used() - before;
    return out;
}

/// One run with a fresh ground-truth session holding exactly the plan's budget.
inline RunOutcome run_once(const PredicateIndex& index, const GroundTruth& truth, const ExperimentPlan& plan,
                           std::uint64_t seed) {
    OracleSession session(index.dataset(), std::make_shared<GroundTruthSource>(truth), plan.budget);
    return run_with_session(index, session, plan, seed);
}

struct CsGroup {
    std::string identity;
    std::size_t count = 0;
    double cs = 0.0;
};

struct CsReport {
    std::size_t runs = 0;
    /// Sorted by descending count, then identity.
    std::vector<CsGroup> groups;
    std::uint64_t max_labels_used = 0;
    double mean_labels_used = 0.0;

    /// CS of the most frequent learned result; runs that learned nothing never count as stable.
    double max_cs() const {
        for (const auto& g : groups) {
            if (g.identity != kNoScheme) {
                return g.cs;
            }
        }
        return 0.0;
    }
};

/// Runs `run(seed)` for seeds base .. base+N-1 and groups the outcomes by identity.
inline CsReport run_cs(const std::function<RunOutcome(std::uint64_t)>& run, std::size_t repetitions,
                       std::uint64_t base_seed) {
    if (repetitions == 0) {
        throw ConfigError("repetitions must be at least 1");
    }
    std::map<std::string, std::size_t> counts;
    CsReport report;
    report.runs = repetitions;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < repetitions; ++i) {
        const auto r = run(base_seed + i);
        counts[r.identity] += 1;
        total += r.labels_used;
        report.max_labels_used = std::max(report.max_labels_used, r.labels_used);
    }
    report.mean_labels_used = static_cast<double>(total) / static_cast<double>(repetitions);
    for (const auto& [identity, n] : counts) {
        report.groups.push_back({identity, n, static_cast<double>(n) / static_cast<double>(repetitions)});
    }
    std::stable_sort(report.groups.begin(), report.groups.end(),
                     [](const CsGroup& a, const CsGroup& b) { return a.count > b.count; });
    return report;
}

inline CsReport run_cs(const PredicateIndex& index, const GroundTruth& truth, const ExperimentPlan& plan) {
    validate(plan);
    return run_cs([&](std::uint64_t seed) { return run_once(index, truth, plan, seed); }, plan.repetitions,
                  plan.base_seed);
}

struct SweepOptions {
    std::uint64_t start = 50;
    std::uint64_t step = 50;
    std::uint64_t cap = 10000;
    double target_cs = 0.9;
};

struct SweepPoint {
    std::uint64_t budget = 0;
    double max_cs = 0.0;
    std::uint64_t max_labels_used = 0;
};

struct SweepResult {
    /// First budget whose max CS reached the target; empty when the cap was hit.
    std::optional<std::uint64_t> budget;
    /// Most labels any run consumed at that budget.
    std::uint64_t labels_used = 0;
    std::uint64_t cap = 0;
    std::vector<SweepPoint> curve;

    std::string text() const { return budget ? std::to_string(*budget) : std::to_string(cap) + "+"; }
    bool capped() const { return !budget; }
};

/// Raises the budget by `step` until `cs_at(budget)` reaches the target CS.
inline SweepResult sweep_label_cost(const std::function<CsReport(std::uint64_t)>& cs_at, const SweepOptions& opt) {
    if (!(opt.target_cs > 0.0 && opt.target_cs <= 1.0)) {
        throw ConfigError("target CS must lie in (0, 1]");
    }
    if (opt.step == 0 || opt.start == 0) {
        throw ConfigError("sweep start and step must be positive");
    }
    SweepResult result;
    result.cap = opt.cap;
    for (std::uint64_t b = opt.start; b <= opt.cap; b += opt.step) {
        const auto report = cs_at(b);
        result.curve.push_back({b, report.max_cs(), report.max_labels_used});
        if (report.max_cs() >= opt.target_cs) {
            result.budget = b;
            result.labels_used = report.max_labels_used;
            break;
        }
    }
    return result;
}

inline SweepResult sweep_label_cost(const PredicateIndex& index, const GroundTruth& truth, ExperimentPlan plan,
                                    const SweepOptions& opt) {
    validate(plan);
    return sweep_label_cost(
        [&](std::uint64_t b) {
            plan.budget = b;
            return run_cs(index, truth, plan);
        },
        opt);
}

/// The four measures of a scheme on full ground truth.
struct MeasureRow {
    Scheme scheme;
    ConfusionCounts counts;
    double pc = 0.0;
    double pq = 0.0;
    double rr = 0.0;
    double fm = 0.0;

    SchemePoint point() const { return {scheme, pc, pq, Provenance::exact}; }
};

inline MeasureRow measure(const Scheme& s, const SignatureHistogram& exact) {
    const auto c = confusion(s, exact);
    MeasureRow row{s, c, pc(c), pq(c), rr(c), 0.0};
    row.fm = fm(row.pc, row.pq);
    return row;
}

struct PresetComparison {
    std::string name;
    MeasureRow preset;
    bool dominated = false;
    bool contained = false;
    /// Skyline member that maximizes PQ subject to PC >= the preset's PC.
    std::optional<MeasureRow> at_preset_pc;
};

struct BaselineComparison {
    std::vector<MeasureRow> skyline;
    std::optional<MeasureRow> best_fm;
    std::vector<PresetComparison> presets;
};

/**
 * Exact measures for fixed preset schemes next to a learned skyline. A
 * preset is "dominated" when some skyline member dominates it on exact
 * PC/PQ and "contained" when a skyline member sits on the same point.
 */
inline BaselineComparison compare_baselines(const PredicateIndex& index, const GroundTruth& truth,
                                            const std::vector<Scheme>& skyline,
                                            const std::vector<std::pair<std::string, Scheme>>& presets) {
    const auto exact = exact_histogram(index, truth);
    BaselineComparison out;
    for (const auto& s : skyline) {
        out.skyline.push_back(measure(s, exact));
    }
    for (const auto& row : out.skyline) {
        if (!out.best_fm || row.fm > out.best_fm->fm ||
            (row.fm == out.best_fm->fm && row.scheme < out.best_fm->scheme)) {
            out.best_fm = row;
        }
    }
    for (const auto& [name, scheme] : presets) {
        PresetComparison pc_row{name, measure(scheme, exact), false, false, std::nullopt};
        const auto p = pc_row.preset.point();
        std::vector<SchemePoint> points;
        for (const auto& row : out.skyline) {
            const auto q = row.point();
            pc_row.dominated = pc_row.dominated || dominates(q, p);
            pc_row.contained = pc_row.contained || (q.pc == p.pc && q.pq == p.pq);
            points.push_back(q);
        }
        if (auto best = detail::optimal_point(points, p.pc)) {
            for (const auto& row : out.skyline) {
                if (row.scheme == best->scheme) {
                    pc_row.at_preset_pc = row;
                }
            }
        }
        out.presets.push_back(std::move(pc_row));
    }
    return out;
}

} // namespace skyblock

#endif
