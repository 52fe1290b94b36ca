#ifndef SKYBLOCK_ORACLE_HPP
#define SKYBLOCK_ORACLE_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "skyblock/csv.hpp"
#include "skyblock/datamodel.hpp"
#include "skyblock/error.hpp"
#include "skyblock/training.hpp"

namespace skyblock {

enum class OracleKind { ground_truth, interactive, replay };

inline std::string oracle_kind_name(OracleKind k) {
    switch (k) {
    case OracleKind::ground_truth:
        return "ground_truth";
    case OracleKind::interactive:
        return "interactive";
    case OracleKind::replay:
        return "replay";
    }
    return "unknown";
}

struct LabelLogEntry {
    std::uint64_t sequence = 0;
    std::string left_id;
    std::string right_id;
    Label label = Label::non_match;

    bool operator==(const LabelLogEntry&) const = default;
};

/// Something that can answer "is this pair a match?".
class LabelSource {
public:
    virtual ~LabelSource() = default;
    virtual Label answer(const Dataset& dataset, const RecordPair& pair) = 0;
    virtual OracleKind kind() const = 0;
};

class GroundTruthSource : public LabelSource {
public:
    explicit GroundTruthSource(GroundTruth truth) : truth_(std::move(truth)) {}

    Label answer(const Dataset&, const RecordPair& pair) override {
        return truth_.contains(pair) ? Label::match : Label::non_match;
    }
    OracleKind kind() const override { return OracleKind::ground_truth; }

private:
    GroundTruth truth_;
};

/// Answers with the logged labels, in order; any other request is a divergence.
class ReplaySource : public LabelSource {
public:
    explicit ReplaySource(std::vector<LabelLogEntry> entries) : entries_(std::move(entries)) {}

    Label answer(const Dataset& dataset, const RecordPair& pair) override {
        const auto& l = dataset.left(pair).id;
        const auto& r = dataset.right(pair).id;
        if (next_ >= entries_.size()) {
            throw ReplayDivergenceError("label log exhausted at request for (" + l + ", " + r + ")");
        }
        const auto& e = entries_[next_];
        if (e.left_id != l || e.right_id != r) {
            throw ReplayDivergenceError("label log entry " + std::to_string(e.sequence) + " is for (" + e.left_id +
                                        ", " + e.right_id + ") but the learner asked for (" + l + ", " + r + ")");
        }
        ++next_;
        return e.label;
    }
    OracleKind kind() const override { return OracleKind::replay; }

    std::size_t size() const { return entries_.size(); }

private:
    std::vector<LabelLogEntry> entries_;
    std::size_t next_ = 0;
};

/**
 * Budgeted access to a label source. Every answer is charged against the
 * budget and appended to the log; the source's answer is final even when
 * it disagrees with stored ground truth.
 */
class OracleSession {
public:
    OracleSession(const Dataset& dataset, std::shared_ptr<LabelSource> source, std::uint64_t budget)
        : dataset_(&dataset), source_(std::move(source)), budget_(budget) {
        if (!source_) {
            throw ConfigError("oracle session needs a label source");
        }
    }

    Label label(const RecordPair& pair) {
        if (used_.load() >= budget_) {
            throw BudgetExhaustedError();
        }
        const Label y = source_->answer(*dataset_, pair);
        std::lock_guard lock(mutex_);
        log_.push_back({used_.load() + 1, dataset_->left(pair).id, dataset_->right(pair).id, y});
        used_.fetch_add(1);
        return y;
    }

    Label label(const FeatureVector& fv) { return label(fv.pair); }

    std::uint64_t budget() const { return budget_; }
    std::uint64_t used() const { return used_.load(); }
    std::uint64_t remaining() const { return budget_ - used_.load(); }
    OracleKind kind() const { return source_->kind(); }
    const Dataset& dataset() const { return *dataset_; }

    std::vector<LabelLogEntry> log() const {
        std::lock_guard lock(mutex_);
        return log_;
    }

private:
    const Dataset* dataset_;
    std::shared_ptr<LabelSource> source_;
    std::uint64_t budget_;
    std::atomic<std::uint64_t> used_{0};
    mutable std::mutex mutex_;
    std::vector<LabelLogEntry> log_;
};

inline void write_label_log(std::ostream& out, const std::vector<LabelLogEntry>& log) {
    csv::write_row(out, {"sequence", "left_id", "right_id", "label"}, ',');
    for (const auto& e : log) {
        csv::write_row(out, {std::to_string(e.sequence), e.left_id, e.right_id, std::string(1, label_char(e.label))},
                       ',');
    }
}

inline void save_label_log(const std::string& path, const std::vector<LabelLogEntry>& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IngestionError("cannot write label log " + path);
    }
    write_label_log(out, log);
}

/// Parses a label log. Sequence numbers must run 1, 2, 3, ...
inline std::vector<LabelLogEntry> read_label_log(std::istream& in) {
    csv::Reader reader(in, ',');
    std::vector<LabelLogEntry> out;
    bool first = true;
    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) {
            continue;
        }
        if (first && !row->empty() && row->front() == "sequence") {
            first = false;
            continue;
        }
        first = false;
        if (row->size() != 4) {
            throw IngestionError("label log line " + std::to_string(reader.line()) + ": expected 4 fields, got " +
                                 std::to_string(row->size()));
        }
        LabelLogEntry e;
        try {
            std::size_t used = 0;
            e.sequence = std::stoull((*row)[0], &used);
            if (used != (*row)[0].size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw IngestionError("label log line " + std::to_string(reader.line()) + ": bad sequence number '" +
                                 (*row)[0] + "'");
        }
        if (e.sequence != out.size() + 1) {
            throw IngestionError("label log line " + std::to_string(reader.line()) + ": sequence " +
                                 std::to_string(e.sequence) + " out of order");
        }
        e.left_id = (*row)[1];
        e.right_id = (*row)[2];
        try {
            e.label = parse_label((*row)[3]);
        } catch (const ConfigError& err) {
            throw IngestionError("label log line " + std::to_string(reader.line()) + ": " + err.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<LabelLogEntry> load_label_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open label log " + path);
    }
    return read_label_log(in);
}

/// A session answering exactly the logged labels. The budget defaults to the log length.
inline OracleSession replay(const Dataset& dataset, std::vector<LabelLogEntry> log,
                            std::optional<std::uint64_t> budget = std::nullopt) {
    const auto b = budget.value_or(log.size());
    return OracleSession(dataset, std::make_shared<ReplaySource>(std::move(log)), b);
}

} // namespace skyblock

#endif
