// Command-line front end: learn schemes and skylines, measure stability,
// sweep label budgets, compare against preset schemes and serve labels.
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "skyblock/label_service.hpp"
#include "skyblock/skyblock.hpp"

using namespace skyblock;

namespace {

struct DataOptions {
    std::string data;
    std::string data2;
    std::string truth;
    std::string id_column = "id";
    std::string delimiter = ",";
    std::vector<std::string> attributes;
    std::vector<std::string> functions{"exact", "soundex", "dmetaphone", "substr"};
    std::vector<std::string> predicates;
    std::size_t substring_length = 4;
};

struct Loaded {
    std::shared_ptr<PredicateIndex> index;
    std::optional<GroundTruth> truth;
};

char delimiter_char(const std::string& d) {
    if (d == "\\t" || d == "tab") {
        return '\t';
    }
    if (d.size() != 1) {
        throw ConfigError("delimiter must be a single character, got '" + d + "'");
    }
    return d[0];
}

BlockingPredicate parse_predicate(const std::string& text, std::size_t substring_length) {
    const auto dot = text.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
        throw ConfigError("predicate must look like attribute.function, got '" + text + "'");
    }
    return {text.substr(0, dot), BlockingFunction::parse(text.substr(dot + 1), substring_length)};
}

Loaded load(const DataOptions& o) {
    if (o.data.empty()) {
        throw ConfigError("--data is required");
    }
    IngestConfig ic;
    ic.delimiter = delimiter_char(o.delimiter);
    ic.id_column = o.id_column;
    ic.attributes = o.attributes;
    auto ds = o.data2.empty() ? load_dataset(o.data, ic) : load_linkage_dataset(o.data, o.data2, ic);
    std::vector<BlockingPredicate> preds;
    if (!o.predicates.empty()) {
        for (const auto& p : o.predicates) {
            preds.push_back(parse_predicate(p, o.substring_length));
        }
    } else {
        std::vector<BlockingFunction> fns;
        for (const auto& f : o.functions) {
            fns.push_back(BlockingFunction::parse(f, o.substring_length));
        }
        preds = predicate_universe(ds.schema(), fns);
    }
    Loaded out;
    out.index = std::make_shared<PredicateIndex>(std::move(ds), std::move(preds));
    if (!o.truth.empty()) {
        out.truth = load_ground_truth(o.truth, out.index->dataset(), ic.delimiter);
    }
    return out;
}

void add_data_options(CLI::App* app, DataOptions& o) {
    app->add_option("--data", o.data, "Records CSV (dedup), or the first source for linkage");
    app->add_option("--data2", o.data2, "Second source; switches to record linkage");
    app->add_option("--truth", o.truth, "Ground-truth match pairs CSV");
    app->add_option("--id-column", o.id_column, "Name of the record id column");
    app->add_option("--delimiter", o.delimiter, "Field delimiter (tab or \\t for TSV)");
    app->add_option("--attributes", o.attributes, "Attributes to keep (default: all)")->delimiter(',');
    app->add_option("--functions", o.functions, "Blocking functions applied to every attribute")->delimiter(',');
    app->add_option("--predicates", o.predicates, "Explicit predicates attribute.function; overrides --functions")
        ->delimiter(',');
    app->add_option("--substring-length", o.substring_length, "Prefix length for substr");
}

void add_plan_options(CLI::App* app, ExperimentPlan& p, std::string& algorithm, bool with_reps) {
    app->add_option("--algorithm", algorithm, "asl, rsl, naive, active or pro");
    app->add_option("--budget", p.budget, "Label budget")->required();
    app->add_option("--epsilon", p.epsilon, "PC threshold for asl/rsl");
    app->add_option("--delta", p.delta, "Threshold step for naive/active");
    app->add_option("--k", p.k, "Samples per scheme and round (0 derives it from the budget)");
    app->add_option("--depth", p.expected_depth, "Expected number of rounds used to derive k");
    app->add_option("--max-ary", p.max_ary, "Maximum predicates per scheme (pro: l)");
    if (with_reps) {
        app->add_option("--reps", p.repetitions, "Runs per budget");
        app->add_option("--base-seed", p.base_seed, "Seed of the first run");
    }
}

void emit(const Json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << dump(j);
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write '" + out + "'");
    }
    f << dump(j);
}

Json run_report(const Loaded& l, OracleSession& session, const ExperimentPlan& plan, std::uint64_t seed) {
    const auto outcome = run_with_session(*l.index, session, plan, seed);
    const GroundTruth* truth = l.truth ? &*l.truth : nullptr;
    if (outcome.asl) {
        return asl_report(*outcome.asl, plan.epsilon, plan.budget, *l.index, truth);
    }
    if (outcome.skyline && !outcome.skyline->points.empty()) {
        return skyline_report(*outcome.skyline, *l.index, truth);
    }
    throw NoSchemeError("no scheme learned within the budget");
}

LabelHttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) {
        g_server->stop();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn blocking schemes and scheme skylines for entity resolution"};
    app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
    app.require_subcommand(1);

    DataOptions data;
    ExperimentPlan plan;
    std::string algorithm = "pro";
    std::uint64_t seed = 1;
    std::string out;
    std::string label_log;

    auto* learn = app.add_subcommand("learn", "One run of asl/rsl or a skyline algorithm, report as JSON");
    add_data_options(learn, data);
    add_plan_options(learn, plan, algorithm, false);
    learn->add_option("--seed", seed, "Random seed");
    learn->add_option("--out", out, "Report file (default stdout)");
    learn->add_option("--label-log", label_log, "Write every oracle answer to this CSV");

    auto* cs = app.add_subcommand("cs", "Stability of the learned result over repeated runs");
    add_data_options(cs, data);
    add_plan_options(cs, plan, algorithm, true);
    cs->add_option("--out", out, "Report file (default stdout)");

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "Smallest budget whose max CS reaches a target");
    add_data_options(sweep, data);
    add_plan_options(sweep, plan, algorithm, true);
    sweep->get_option("--budget")->required(false);
    sweep->add_option("--start", sweep_opt.start, "First budget");
    sweep->add_option("--step", sweep_opt.step, "Budget increment");
    sweep->add_option("--cap", sweep_opt.cap, "Largest budget tried");
    sweep->add_option("--target", sweep_opt.target_cs, "Target CS");
    sweep->add_option("--out", out, "Report file (default stdout)");

    std::string report_path;
    std::vector<std::string> presets;
    auto* compare = app.add_subcommand("compare", "Exact measures of a learned skyline next to preset schemes");
    add_data_options(compare, data);
    compare->add_option("--report", report_path, "Skyline report produced by learn")->required();
    compare->add_option("--preset", presets, "Preset scheme as name=scheme (repeatable)");
    compare->add_option("--out", out, "Report file (default stdout)");

    std::string log_in;
    auto* replay_cmd = app.add_subcommand("replay", "Rerun a learner against a recorded label log");
    add_data_options(replay_cmd, data);
    add_plan_options(replay_cmd, plan, algorithm, false);
    replay_cmd->add_option("--seed", seed, "Random seed of the recorded run");
    replay_cmd->add_option("--log", log_in, "Label log written by learn --label-log")->required();
    replay_cmd->add_option("--out", out, "Report file (default stdout)");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "HTTP labeling service for interactive sessions");
    add_data_options(serve, data);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--label-log", label_log, "Write each finished session's labels to this CSV");

    for (auto* sub : {learn, cs, sweep, compare, replay_cmd, serve}) {
        // Lets a [learn], [sweep], ... section of the config file set that command's options.
        sub->configurable();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        plan.algorithm = parse_algorithm(algorithm);
        const auto loaded = load(data);
        const auto names = loaded.index->predicate_names();

        if (learn->parsed() || replay_cmd->parsed()) {
            std::shared_ptr<LabelSource> source;
            if (replay_cmd->parsed()) {
                source = std::make_shared<ReplaySource>(load_label_log(log_in));
            } else {
                if (!loaded.truth) {
                    throw ConfigError("learn needs --truth as its oracle; use serve for interactive labeling");
                }
                source = std::make_shared<GroundTruthSource>(*loaded.truth);
            }
            OracleSession session(loaded.index->dataset(), source, plan.budget);
            Json report;
            try {
                report = run_report(loaded, session, plan, seed);
            } catch (...) {
                // A failed run's labels are still worth keeping.
                if (!label_log.empty()) {
                    save_label_log(label_log, session.log());
                }
                throw;
            }
            if (!label_log.empty()) {
                save_label_log(label_log, session.log());
            }
            emit(report, out);
            return 0;
        }
        if (cs->parsed() || sweep->parsed()) {
            if (!loaded.truth) {
                throw ConfigError("cs and sweep need --truth");
            }
            validate(plan);
            if (cs->parsed()) {
                emit(cs_report_json(run_cs(*loaded.index, *loaded.truth, plan)), out);
            } else {
                emit(sweep_json(sweep_label_cost(*loaded.index, *loaded.truth, plan, sweep_opt), sweep_opt.target_cs),
                     out);
            }
            return 0;
        }
        if (compare->parsed()) {
            if (!loaded.truth) {
                throw ConfigError("compare needs --truth");
            }
            std::ifstream in(report_path, std::ios::binary);
            if (!in) {
                throw ConfigError("cannot open '" + report_path + "'");
            }
            const auto report = Json::parse(in);
            std::vector<Scheme> skyline;
            for (const auto& p : report.at("points")) {
                skyline.push_back(Scheme::parse(p.at("scheme").get<std::string>(), names));
            }
            if (report.contains("result")) {
                skyline.push_back(Scheme::parse(report.at("result").at("scheme").get<std::string>(), names));
            }
            std::vector<std::pair<std::string, Scheme>> named;
            for (const auto& p : presets) {
                const auto eq = p.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ConfigError("preset must look like name=scheme, got '" + p + "'");
                }
                named.emplace_back(p.substr(0, eq), Scheme::parse(p.substr(eq + 1), names));
            }
            emit(comparison_json(compare_baselines(*loaded.index, *loaded.truth, skyline, named), names), out);
            return 0;
        }
        if (serve->parsed()) {
            LabelService service(loaded.index, loaded.truth, label_log);
            LabelHttpServer server(service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            if (port == 0) {
                port = server.bind_any_port(host);
            } else if (!server.bind(host, port)) {
                port = -1;
            }
            if (port < 0) {
                std::cerr << "error: cannot bind " << host << "\n";
                return 1;
            }
            std::cerr << "listening on http://" << host << ":" << port << "\n";
            server.listen_after_bind();
            g_server = nullptr;
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
