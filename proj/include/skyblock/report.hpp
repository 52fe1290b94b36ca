#ifndef SKYBLOCK_REPORT_HPP
#define SKYBLOCK_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "skyblock/harness.hpp"
#include "skyblock/learner.hpp"

namespace skyblock {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json point_json(const SchemePoint& p, const std::vector<std::string>& names) {
    return Json{{"scheme", p.scheme.to_string(names)}, {"pc", p.pc}, {"pq", p.pq}};
}

inline Json measure_json(const MeasureRow& m, const std::vector<std::string>& names) {
    return Json{{"scheme", m.scheme.to_string(names)},
                {"pc", m.pc},
                {"pq", m.pq},
                {"rr", m.rr},
                {"fm", m.fm},
                {"tp", m.counts.tp},
                {"fp", m.counts.fp},
                {"fn", m.counts.fn}};
}

/// One report entry: empirical coordinates plus exact ones when ground truth is known.
inline Json scheme_entry(const SchemePoint& p, const std::vector<std::string>& names,
                         const SignatureHistogram* exact) {
    Json j{{"scheme", p.scheme.to_string(names)}, {"empirical_pc", p.pc}, {"empirical_pq", p.pq}};
    if (exact) {
        const auto m = measure(p.scheme, *exact);
        j["exact_pc"] = m.pc;
        j["exact_pq"] = m.pq;
        j["rr"] = m.rr;
        j["fm"] = m.fm;
    } else {
        j["fm"] = fm(p.pc, p.pq);
    }
    return j;
}

} // namespace detail

inline Json skyline_report(const SkylineResult& r, const PredicateIndex& index, const GroundTruth* truth) {
    const auto names = index.predicate_names();
    std::optional<SignatureHistogram> exact;
    if (truth && !truth->empty()) {
        exact = exact_histogram(index, *truth);
    }
    Json j;
    j["algorithm"] = r.algorithm;
    j["budget"] = r.budget;
    j["labels_used"] = r.labels_used;
    j["candidates_evaluated"] = r.candidates_evaluated;
    j["training_size"] = r.training.size();
    j["training_matches"] = r.training.matches();
    Json points = Json::array();
    for (const auto& p : r.points) {
        points.push_back(detail::scheme_entry(p, names, exact ? &*exact : nullptr));
    }
    j["points"] = std::move(points);
    if (exact) {
        // Skyline of the learned schemes once their true coordinates are known.
        const auto pts = skyline_of(exact_points(r.schemes(), *exact));
        Json e = Json::array();
        for (const auto& p : pts) {
            e.push_back(detail::point_json(p, names));
        }
        j["exact_skyline"] = std::move(e);
    }
    Json trace;
    trace["rounds"] = r.trace.rounds;
    if (r.algorithm == "pro") {
        trace["extensions"] = Json{{"replaced", r.trace.extensions_replaced},
                                   {"added", r.trace.extensions_added},
                                   {"discarded", r.trace.extensions_discarded}};
    } else {
        Json inv = Json::array();
        for (const auto& i : r.trace.invocations) {
            Json x{{"epsilon", i.epsilon}, {"budget", i.budget}, {"labels_used", i.labels_used}};
            if (i.point) {
                x["scheme"] = i.point->scheme.to_string(names);
                x["empirical_pc"] = i.point->pc;
                x["empirical_pq"] = i.point->pq;
                x["feasible"] = i.feasible;
            } else {
                x["error"] = i.error;
            }
            inv.push_back(std::move(x));
        }
        trace["asl_invocations"] = std::move(inv);
    }
    j["trace"] = std::move(trace);
    return j;
}

inline Json asl_report(const AslResult& r, double epsilon, std::uint64_t budget, const PredicateIndex& index,
                       const GroundTruth* truth) {
    const auto names = index.predicate_names();
    std::optional<SignatureHistogram> exact;
    if (truth && !truth->empty()) {
        exact = exact_histogram(index, *truth);
    }
    Json j;
    j["algorithm"] = "asl";
    j["epsilon"] = epsilon;
    j["budget"] = budget;
    j["labels_used"] = r.labels_used;
    j["candidates_evaluated"] = r.candidates_evaluated;
    j["training_size"] = r.training.size();
    j["training_matches"] = r.training.matches();
    j["feasible"] = r.feasible;
    j["result"] = detail::scheme_entry(r.point, names, exact ? &*exact : nullptr);
    j["trace"] = Json{{"rounds", r.rounds}};
    return j;
}

inline Json cs_report_json(const CsReport& r) {
    Json groups = Json::array();
    for (const auto& g : r.groups) {
        groups.push_back(Json{{"identity", g.identity}, {"count", g.count}, {"cs", g.cs}});
    }
    return Json{{"runs", r.runs},
                {"max_cs", r.max_cs()},
                {"max_labels_used", r.max_labels_used},
                {"mean_labels_used", r.mean_labels_used},
                {"groups", std::move(groups)}};
}

inline Json sweep_json(const SweepResult& r, double target_cs) {
    Json curve = Json::array();
    for (const auto& p : r.curve) {
        curve.push_back(Json{{"budget", p.budget}, {"max_cs", p.max_cs}, {"max_labels_used", p.max_labels_used}});
    }
    Json j{{"target_cs", target_cs}, {"label_cost", r.text()}, {"curve", std::move(curve)}};
    if (r.budget) {
        j["labels_used"] = r.labels_used;
    }
    return j;
}

inline Json comparison_json(const BaselineComparison& c, const std::vector<std::string>& names) {
    Json sky = Json::array();
    for (const auto& m : c.skyline) {
        sky.push_back(detail::measure_json(m, names));
    }
    Json presets = Json::array();
    for (const auto& p : c.presets) {
        Json x{{"name", p.name},
               {"measures", detail::measure_json(p.preset, names)},
               {"dominated", p.dominated},
               {"contained", p.contained}};
        if (p.at_preset_pc) {
            x["skyline_at_preset_pc"] = detail::measure_json(*p.at_preset_pc, names);
        }
        presets.push_back(std::move(x));
    }
    Json j{{"skyline", std::move(sky)}, {"presets", std::move(presets)}};
    if (c.best_fm) {
        j["best_fm"] = detail::measure_json(*c.best_fm, names);
    }
    return j;
}

/// Stable text form used for report files and byte-level comparisons.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace skyblock

#endif
