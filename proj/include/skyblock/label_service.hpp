#ifndef SKYBLOCK_LABEL_SERVICE_HPP
#define SKYBLOCK_LABEL_SERVICE_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "skyblock/harness.hpp"
#include "skyblock/oracle.hpp"
#include "skyblock/report.hpp"

namespace skyblock {

/// A request the service cannot honor; `status` is the HTTP status it maps to.
class ServiceError : public Error {
public:
    ServiceError(int status, const std::string& what) : Error(what), status(status) {}
    int status;
};

enum class SessionStatus { running, awaiting_label, done, aborted };

inline std::string session_status_name(SessionStatus s) {
    switch (s) {
    case SessionStatus::running:
        return "running";
    case SessionStatus::awaiting_label:
        return "awaiting_label";
    case SessionStatus::done:
        return "done";
    case SessionStatus::aborted:
        return "aborted";
    }
    return "unknown";
}

struct SessionConfig {
    ExperimentPlan plan;
    std::uint64_t seed = 1;
};

inline SessionConfig session_config_from_json(const Json& j) {
    SessionConfig c;
    try {
        c.plan.algorithm = parse_algorithm(j.value("algorithm", std::string("pro")));
        c.plan.budget = j.value("budget", std::uint64_t{0});
        c.plan.epsilon = j.value("epsilon", c.plan.epsilon);
        c.plan.delta = j.value("delta", c.plan.delta);
        c.plan.k = j.value("k", c.plan.k);
        c.plan.expected_depth = j.value("expected_depth", c.plan.expected_depth);
        c.plan.max_ary = j.value("max_ary", c.plan.max_ary);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid session config: ") + e.what());
    }
    return c;
}

namespace detail {

struct LabelRequest {
    std::uint64_t id = 0;
    RecordPair pair;
};

/// Shared state of one interactive session; every field is guarded by `mutex`.
struct SessionState {
    std::string id;
    SessionConfig config;
    std::mutex mutex;
    std::condition_variable changed;
    bool finished = false;
    bool aborted = false;
    std::optional<LabelRequest> pending;
    std::uint64_t next_request = 1;
    std::map<std::uint64_t, Label> answers;
    std::uint64_t budget = 0;
    std::uint64_t used = 0;
    std::vector<SchemePoint> skyline;
    std::size_t rounds = 0;
    std::optional<Json> result;
    std::string error;
    std::vector<LabelLogEntry> log;
};

/// Label source that parks the learner until a human answers through the service.
class InteractiveSource : public LabelSource {
public:
    explicit InteractiveSource(std::shared_ptr<SessionState> state) : state_(std::move(state)) {}

    Label answer(const Dataset&, const RecordPair& pair) override {
        std::unique_lock lock(state_->mutex);
        if (state_->aborted) {
            throw SessionAbortedError();
        }
        const auto id = state_->next_request++;
        state_->pending = LabelRequest{id, pair};
        state_->changed.notify_all();
        state_->changed.wait(lock, [&] { return state_->aborted || state_->answers.count(id) > 0; });
        if (state_->answers.count(id) == 0) {
            throw SessionAbortedError();
        }
        return state_->answers.at(id);
    }

    OracleKind kind() const override { return OracleKind::interactive; }

private:
    std::shared_ptr<SessionState> state_;
};

} // namespace detail

/**
 * Interactive labeling sessions over one loaded dataset. At most one session
 * runs at a time; finished sessions stay readable. The learner of a session
 * runs on its own thread and parks inside the oracle while a label is
 * pending.
 */
class LabelService {
public:
    explicit LabelService(std::shared_ptr<const PredicateIndex> index,
                          std::optional<GroundTruth> truth = std::nullopt, std::string label_log_path = {})
        : index_(std::move(index)), truth_(std::move(truth)), label_log_path_(std::move(label_log_path)) {}

    LabelService(const LabelService&) = delete;
    LabelService& operator=(const LabelService&) = delete;

    ~LabelService() {
        std::vector<std::shared_ptr<detail::SessionState>> all;
        {
            std::lock_guard lock(mutex_);
            for (auto& [id, s] : sessions_) {
                all.push_back(s);
            }
        }
        for (auto& s : all) {
            request_abort(*s);
        }
        for (auto& t : threads_) {
            if (t.joinable()) {
                t.join();
            }
        }
    }

    std::string start(const SessionConfig& config) {
        validate(config.plan);
        if (config.plan.algorithm == Algorithm::asl || config.plan.algorithm == Algorithm::rsl) {
            if (!(config.plan.epsilon > 0.0 && config.plan.epsilon <= 1.0)) {
                throw ConfigError("PC threshold must lie in (0, 1]");
            }
        } else if (config.plan.algorithm == Algorithm::pro) {
            if (config.plan.max_ary == 0) {
                throw ConfigError("maximum ary must be at least 1");
            }
        } else if (!(config.plan.delta > 0.0 && config.plan.delta <= 1.0)) {
            throw ConfigError("threshold step must lie in (0, 1]");
        }
        std::lock_guard lock(mutex_);
        for (auto& [id, s] : sessions_) {
            std::lock_guard slock(s->mutex);
            if (!s->finished) {
                throw ServiceError(409, "session " + id + " is still active");
            }
        }
        auto state = std::make_shared<detail::SessionState>();
        state->id = "s" + std::to_string(++counter_);
        state->config = config;
        state->budget = config.plan.budget;
        sessions_[state->id] = state;
        threads_.emplace_back([this, state] { run(state); });
        return state->id;
    }

    Json snapshot(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mutex);
        return snapshot_locked(*s);
    }

    /// The pending request, waiting up to `wait` for one to appear; nullopt if none.
    std::optional<Json> next_request(const std::string& id,
                                     std::chrono::milliseconds wait = std::chrono::milliseconds(0)) const {
        auto s = find(id);
        std::unique_lock lock(s->mutex);
        s->changed.wait_for(lock, wait, [&] { return s->pending.has_value() || s->finished; });
        if (!s->pending) {
            return std::nullopt;
        }
        return request_json(*s->pending);
    }

    Json submit(const std::string& id, std::uint64_t request_id, Label label) {
        auto s = find(id);
        std::lock_guard lock(s->mutex);
        if (s->aborted) {
            throw ServiceError(410, "session " + id + " was aborted; request " + std::to_string(request_id) +
                                        " is stale");
        }
        if (auto it = s->answers.find(request_id); it != s->answers.end()) {
            if (it->second != label) {
                throw ServiceError(409, "request " + std::to_string(request_id) + " was already answered " +
                                            std::string(1, label_char(it->second)));
            }
            return Json{{"request_id", request_id}, {"acknowledged", true}, {"duplicate", true}, {"used", s->used}};
        }
        if (!s->pending || s->pending->id != request_id) {
            throw ServiceError(410, "request " + std::to_string(request_id) + " is not pending");
        }
        s->answers[request_id] = label;
        s->used += 1;
        s->pending.reset();
        s->changed.notify_all();
        return Json{{"request_id", request_id}, {"acknowledged", true}, {"duplicate", false}, {"used", s->used}};
    }

    Json abort(const std::string& id) {
        auto s = find(id);
        request_abort(*s);
        std::lock_guard lock(s->mutex);
        return snapshot_locked(*s);
    }

    /// Blocks until the session has finished or aborted (used by tests and the CLI).
    void wait_finished(const std::string& id) const {
        auto s = find(id);
        std::unique_lock lock(s->mutex);
        s->changed.wait(lock, [&] { return s->finished; });
    }

    const PredicateIndex& index() const { return *index_; }

private:
    std::shared_ptr<detail::SessionState> find(const std::string& id) const {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            throw ServiceError(404, "unknown session " + id);
        }
        return it->second;
    }

    static void request_abort(detail::SessionState& s) {
        std::lock_guard lock(s.mutex);
        if (!s.finished) {
            s.aborted = true;
            s.pending.reset();
            s.changed.notify_all();
        }
    }

    Json request_json(const detail::LabelRequest& r) const {
        const auto& ds = index_->dataset();
        auto record = [&](const Record& rec) {
            Json values = Json::object();
            for (std::size_t a = 0; a < ds.schema().size(); ++a) {
                values[ds.schema()[a]] = rec.values[a];
            }
            return Json{{"id", rec.id}, {"values", std::move(values)}};
        };
        return Json{{"request_id", r.id}, {"left", record(ds.left(r.pair))}, {"right", record(ds.right(r.pair))}};
    }

    Json snapshot_locked(const detail::SessionState& s) const {
        SessionStatus status = SessionStatus::running;
        if (s.finished) {
            status = s.aborted ? SessionStatus::aborted : SessionStatus::done;
        } else if (s.pending) {
            status = SessionStatus::awaiting_label;
        }
        const auto names = index_->predicate_names();
        Json points = Json::array();
        for (const auto& p : s.skyline) {
            points.push_back(detail::point_json(p, names));
        }
        Json j{{"session_id", s.id},
               {"status", session_status_name(status)},
               {"algorithm", algorithm_name(s.config.plan.algorithm)},
               {"budget", s.budget},
               {"used", s.used},
               {"pending_request", s.pending ? request_json(*s.pending) : Json(nullptr)},
               {"skyline", std::move(points)},
               {"trace", Json{{"rounds", s.rounds}, {"labels_used", s.used}}}};
        if (s.finished) {
            j["result"] = s.result ? *s.result : Json(nullptr);
            if (!s.error.empty()) {
                j["error"] = s.error;
            }
        }
        return j;
    }

    void run(std::shared_ptr<detail::SessionState> state) {
        const auto& plan = state->config.plan;
        OracleSession oracle(index_->dataset(), std::make_shared<detail::InteractiveSource>(state), plan.budget);
        auto observe = [&](const LearnerEvent& e) {
            std::lock_guard lock(state->mutex);
            state->skyline = e.skyline;
            state->rounds = e.round;
        };
        std::optional<Json> result;
        std::vector<SchemePoint> final_points;
        std::string error;
        bool aborted = false;
        try {
            auto outcome = run_with_session(*index_, oracle, plan, state->config.seed, observe);
            const GroundTruth* truth = truth_ ? &*truth_ : nullptr;
            if (outcome.asl) {
                result = asl_report(*outcome.asl, plan.epsilon, plan.budget, *index_, truth);
                final_points = {outcome.asl->point};
            } else if (outcome.skyline && !outcome.skyline->points.empty()) {
                result = skyline_report(*outcome.skyline, *index_, truth);
                final_points = outcome.skyline->points;
            } else {
                error = "no-result";
            }
        } catch (const SessionAbortedError&) {
            aborted = true;
        } catch (const std::exception& e) {
            error = e.what();
        }
        const auto log = oracle.log();
        if (!label_log_path_.empty()) {
            try {
                save_label_log(label_log_path_, log);
            } catch (const std::exception& e) {
                error += (error.empty() ? "" : "; ") + std::string(e.what());
            }
        }
        std::lock_guard lock(state->mutex);
        state->result = std::move(result);
        if (!aborted && !final_points.empty()) {
            state->skyline = std::move(final_points);
        }
        state->error = std::move(error);
        state->log = log;
        state->aborted = state->aborted || aborted;
        state->finished = true;
        state->pending.reset();
        state->changed.notify_all();
    }

    std::shared_ptr<const PredicateIndex> index_;
    std::optional<GroundTruth> truth_;
    std::string label_log_path_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<detail::SessionState>> sessions_;
    std::vector<std::thread> threads_;
    std::uint64_t counter_ = 0;
};

/// HTTP front end for a LabelService. Bodies are JSON.
class LabelHttpServer {
public:
    explicit LabelHttpServer(LabelService& service) : service_(service) { routes(); }

    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    int bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

private:
    static void send(httplib::Response& res, int status, const Json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    template <typename Fn>
    static void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const ServiceError& e) {
            send(res, e.status, Json{{"error", e.what()}});
        } catch (const nlohmann::json::exception& e) {
            send(res, 400, Json{{"error", std::string("malformed body: ") + e.what()}});
        } catch (const ConfigError& e) {
            send(res, 400, Json{{"error", e.what()}});
        } catch (const std::logic_error& e) {
            // std::stol on a bad query parameter.
            send(res, 400, Json{{"error", std::string("bad parameter: ") + e.what()}});
        } catch (const std::exception& e) {
            send(res, 500, Json{{"error", e.what()}});
        }
    }

    void routes() {
        server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = req.body.empty() ? Json::object() : Json::parse(req.body);
                const auto id = service_.start(session_config_from_json(body));
                send(res, 201, Json{{"session_id", id}});
            });
        });
        server_.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send(res, 200, service_.snapshot(req.matches[1])); });
        });
        server_.Get(R"(/sessions/([^/]+)/request)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                long wait = 0;
                if (req.has_param("wait_ms")) {
                    wait = std::clamp(std::stol(req.get_param_value("wait_ms")), 0L, 60000L);
                }
                auto r = service_.next_request(req.matches[1], std::chrono::milliseconds(wait));
                if (r) {
                    send(res, 200, *r);
                } else {
                    res.status = 204;
                }
            });
        });
        server_.Post(R"(/sessions/([^/]+)/labels)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = Json::parse(req.body);
                const auto request_id = body.at("request_id").get<std::uint64_t>();
                const auto label = parse_label(body.at("label").get<std::string>());
                send(res, 200, service_.submit(req.matches[1], request_id, label));
            });
        });
        server_.Post(R"(/sessions/([^/]+)/abort)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send(res, 200, service_.abort(req.matches[1])); });
        });
    }

    LabelService& service_;
    httplib::Server server_;
};

} // namespace skyblock

#endif
