#ifndef SKYBLOCK_DATAMODEL_HPP
#define SKYBLOCK_DATAMODEL_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "skyblock/csv.hpp"
#include "skyblock/error.hpp"

namespace skyblock {

using RecordIndex = std::uint32_t;

struct Record {
    std::string id;
    /// One value per schema attribute, in schema order. Missing values are "".
    std::vector<std::string> values;
};

/// One delimited file: a schema and its records, with an id lookup.
class Source {
public:
    Source() = default;

    Source(std::vector<std::string> schema, std::vector<Record> records)
        : schema_(std::move(schema)), records_(std::move(records)) {
        ids_.reserve(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (records_[i].values.size() != schema_.size()) {
                throw IngestionError("record '" + records_[i].id + "' has " +
                                     std::to_string(records_[i].values.size()) + " values, schema has " +
                                     std::to_string(schema_.size()));
            }
            if (!ids_.emplace(records_[i].id, static_cast<RecordIndex>(i)).second) {
                throw IngestionError("duplicate record id '" + records_[i].id + "'");
            }
        }
    }

    const std::vector<std::string>& schema() const { return schema_; }
    const std::vector<Record>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    const Record& operator[](RecordIndex i) const { return records_[i]; }

    std::optional<RecordIndex> find(const std::string& id) const {
        auto it = ids_.find(id);
        if (it == ids_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

private:
    std::vector<std::string> schema_;
    std::vector<Record> records_;
    std::unordered_map<std::string, RecordIndex> ids_;
};

enum class DatasetMode { dedup, linkage };

/**
 * A comparable record pair. In dedup mode both indexes refer to the single
 * source and `left` holds the lexicographically smaller id; in linkage mode
 * `left` indexes the first source and `right` the second.
 */
struct RecordPair {
    RecordIndex left = 0;
    RecordIndex right = 0;

    std::uint64_t key() const { return (static_cast<std::uint64_t>(left) << 32) | right; }
    static RecordPair from_key(std::uint64_t key) {
        return {static_cast<RecordIndex>(key >> 32), static_cast<RecordIndex>(key & 0xffffffffu)};
    }

    auto operator<=>(const RecordPair&) const = default;
};

/// Dedup (one source) or linkage (two sources, identical schema) dataset.
class Dataset {
public:
    static Dataset dedup(Source source) {
        Dataset d;
        d.mode_ = DatasetMode::dedup;
        d.sources_.push_back(std::make_shared<const Source>(std::move(source)));
        return d;
    }

    static Dataset linkage(Source first, Source second) {
        if (first.schema() != second.schema()) {
            throw IngestionError("linkage sources must share an identical schema");
        }
        Dataset d;
        d.mode_ = DatasetMode::linkage;
        d.sources_.push_back(std::make_shared<const Source>(std::move(first)));
        d.sources_.push_back(std::make_shared<const Source>(std::move(second)));
        return d;
    }

    DatasetMode mode() const { return mode_; }
    const std::vector<std::string>& schema() const { return sources_.front()->schema(); }
    std::size_t source_count() const { return sources_.size(); }
    const Source& source(std::size_t i) const { return *sources_.at(i); }
    /// Source holding the records on the right side of a pair.
    const Source& right_source() const { return *sources_.back(); }
    const Source& left_source() const { return *sources_.front(); }

    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& s : sources_) {
            n += s->size();
        }
        return n;
    }

    std::uint64_t total_pairs() const {
        if (mode_ == DatasetMode::dedup) {
            const std::uint64_t n = sources_.front()->size();
            return n < 2 ? 0 : n * (n - 1) / 2;
        }
        return static_cast<std::uint64_t>(sources_[0]->size()) * sources_[1]->size();
    }

    std::size_t attribute_index(const std::string& name) const {
        const auto& s = schema();
        auto it = std::find(s.begin(), s.end(), name);
        if (it == s.end()) {
            throw ConfigError("unknown attribute '" + name + "'");
        }
        return static_cast<std::size_t>(it - s.begin());
    }

    /// Canonical pair for two record indexes (left-source index first in linkage mode).
    RecordPair make_pair(RecordIndex a, RecordIndex b) const {
        if (mode_ == DatasetMode::dedup) {
            const auto& src = *sources_.front();
            if (src[b].id < src[a].id) {
                std::swap(a, b);
            }
        }
        return {a, b};
    }

    RecordPair canonical(RecordPair p) const { return make_pair(p.left, p.right); }

    const Record& left(const RecordPair& p) const { return (*sources_.front())[p.left]; }
    const Record& right(const RecordPair& p) const { return (*sources_.back())[p.right]; }

    /// Resolves an (id, id) pair; ids are looked up in the first and last source.
    RecordPair resolve(const std::string& left_id, const std::string& right_id) const {
        auto a = sources_.front()->find(left_id);
        if (!a) {
            throw IngestionError("unknown record id '" + left_id + "'");
        }
        auto b = sources_.back()->find(right_id);
        if (!b) {
            throw IngestionError("unknown record id '" + right_id + "'");
        }
        if (mode_ == DatasetMode::dedup && *a == *b) {
            throw IngestionError("self-pair '" + left_id + "' in dedup mode");
        }
        return make_pair(*a, *b);
    }

private:
    Dataset() = default;

    DatasetMode mode_ = DatasetMode::dedup;
    std::vector<std::shared_ptr<const Source>> sources_;
};

/// Set of matching pairs, stored canonically.
class GroundTruth {
public:
    GroundTruth() = default;

    void add(RecordPair canonical_pair) {
        if (keys_.insert(canonical_pair.key()).second) {
            pairs_.push_back(canonical_pair);
        }
    }

    bool contains(const RecordPair& canonical_pair) const { return keys_.count(canonical_pair.key()) > 0; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const std::vector<RecordPair>& pairs() const { return pairs_; }

private:
    std::vector<RecordPair> pairs_;
    std::unordered_set<std::uint64_t> keys_;
};

struct IngestConfig {
    char delimiter = ',';
    std::string id_column = "id";
    /// Attribute columns to keep, in order. Empty keeps every non-id column.
    std::vector<std::string> attributes;
};

inline Source read_source(std::istream& in, const IngestConfig& config) {
    csv::Reader reader(in, config.delimiter);
    auto header = reader.next();
    if (!header) {
        throw IngestionError("missing header row");
    }
    auto id_it = std::find(header->begin(), header->end(), config.id_column);
    if (id_it == header->end()) {
        throw IngestionError("id column '" + config.id_column + "' not found in header");
    }
    const auto id_col = static_cast<std::size_t>(id_it - header->begin());

    std::vector<std::string> schema;
    std::vector<std::size_t> columns;
    if (config.attributes.empty()) {
        for (std::size_t c = 0; c < header->size(); ++c) {
            if (c != id_col) {
                schema.push_back((*header)[c]);
                columns.push_back(c);
            }
        }
    } else {
        for (const auto& name : config.attributes) {
            auto it = std::find(header->begin(), header->end(), name);
            if (it == header->end()) {
                throw IngestionError("attribute column '" + name + "' not found in header");
            }
            schema.push_back(name);
            columns.push_back(static_cast<std::size_t>(it - header->begin()));
        }
    }

    std::vector<Record> records;
    std::unordered_set<std::string> seen;
    std::size_t row = 0;
    while (auto fields = reader.next()) {
        ++row;
        if (fields->size() == 1 && fields->front().empty()) {
            continue;
        }
        if (fields->size() != header->size()) {
            throw IngestionError("row " + std::to_string(row) + " (line " + std::to_string(reader.line()) + ") has " +
                                 std::to_string(fields->size()) + " fields, header has " +
                                 std::to_string(header->size()));
        }
        Record r;
        r.id = (*fields)[id_col];
        if (!seen.insert(r.id).second) {
            throw IngestionError("row " + std::to_string(row) + ": duplicate record id '" + r.id + "'");
        }
        r.values.reserve(columns.size());
        for (auto c : columns) {
            r.values.push_back((*fields)[c]);
        }
        records.push_back(std::move(r));
    }
    return Source(std::move(schema), std::move(records));
}

inline Source load_source(const std::string& path, const IngestConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open '" + path + "'");
    }
    return read_source(in, config);
}

inline Dataset load_dataset(const std::string& path, const IngestConfig& config) {
    return Dataset::dedup(load_source(path, config));
}

inline Dataset load_linkage_dataset(const std::string& first, const std::string& second, const IngestConfig& config) {
    return Dataset::linkage(load_source(first, config), load_source(second, config));
}

/// Writes a source back out; reading the output with the same config yields the same records.
inline void write_source(std::ostream& out, const Source& source, const IngestConfig& config) {
    std::vector<std::string> row;
    row.push_back(config.id_column);
    row.insert(row.end(), source.schema().begin(), source.schema().end());
    csv::write_row(out, row, config.delimiter);
    for (const auto& r : source.records()) {
        row.clear();
        row.push_back(r.id);
        row.insert(row.end(), r.values.begin(), r.values.end());
        csv::write_row(out, row, config.delimiter);
    }
}

/// Ground truth: a header row, then one matching (id, id) pair per row.
inline GroundTruth read_ground_truth(std::istream& in, const Dataset& dataset, char delimiter = ',') {
    csv::Reader reader(in, delimiter);
    GroundTruth truth;
    if (!reader.next()) {
        return truth;
    }
    std::size_t row = 0;
    while (auto fields = reader.next()) {
        ++row;
        if (fields->size() == 1 && fields->front().empty()) {
            continue;
        }
        if (fields->size() < 2) {
            throw IngestionError("ground truth row " + std::to_string(row) + " needs two id columns");
        }
        try {
            truth.add(dataset.resolve((*fields)[0], (*fields)[1]));
        } catch (const IngestionError& e) {
            throw IngestionError("ground truth row " + std::to_string(row) + ": " + e.what());
        }
    }
    return truth;
}

inline GroundTruth load_ground_truth(const std::string& path, const Dataset& dataset, char delimiter = ',') {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open '" + path + "'");
    }
    return read_ground_truth(in, dataset, delimiter);
}

} // namespace skyblock

#endif
