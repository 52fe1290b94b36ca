#ifndef SKYBLOCK_SCHEME_HPP
#define SKYBLOCK_SCHEME_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skyblock/blocking.hpp"
#include "skyblock/error.hpp"

namespace skyblock {

/**
 * A monotone DNF over a predicate universe of fixed size.
 *
 * Always held in canonical form: conjuncts are deduplicated, a conjunct that
 * is a superset of another is absorbed, and conjuncts are sorted by their
 * ascending index lists. No further boolean minimization is applied, so two
 * schemes compare equal exactly when their canonical DNFs match.
 */
class Scheme {
public:
    /// The single-predicate scheme p.
    static Scheme predicate(std::size_t index, std::size_t universe) {
        check_index(index, universe);
        return Scheme({PredicateSet{index}}, universe);
    }

    /// A pure conjunction of the given predicates.
    static Scheme conjunction(const std::vector<std::size_t>& indexes, std::size_t universe) {
        PredicateSet c;
        for (auto i : indexes) {
            check_index(i, universe);
            c.insert(i);
        }
        return Scheme({c}, universe);
    }

    /// Canonicalizes an arbitrary list of conjuncts.
    static Scheme from_conjuncts(std::vector<PredicateSet> conjuncts, std::size_t universe) {
        for (const auto& c : conjuncts) {
            for (auto i : c.indexes()) {
                check_index(i, universe);
            }
        }
        return Scheme(std::move(conjuncts), universe);
    }

    const std::vector<PredicateSet>& conjuncts() const { return conjuncts_; }
    std::size_t universe() const { return universe_; }

    /// Every predicate used anywhere in the scheme.
    PredicateSet predicates() const {
        PredicateSet all;
        for (const auto& c : conjuncts_) {
            all = all | c;
        }
        return all;
    }

    std::size_t ary() const { return predicates().count(); }

    /// DNF evaluation over agreement bits.
    bool covers(const PredicateSet& bits) const {
        for (const auto& c : conjuncts_) {
            if (c.subset_of(bits)) {
                return true;
            }
        }
        return false;
    }

    friend Scheme conjoin(const Scheme& s, const Scheme& t) {
        check_universe(s, t);
        std::vector<PredicateSet> out;
        out.reserve(s.conjuncts_.size() * t.conjuncts_.size());
        for (const auto& a : s.conjuncts_) {
            for (const auto& b : t.conjuncts_) {
                out.push_back(a | b);
            }
        }
        return Scheme(std::move(out), s.universe_);
    }

    friend Scheme disjoin(const Scheme& s, const Scheme& t) {
        check_universe(s, t);
        std::vector<PredicateSet> out = s.conjuncts_;
        out.insert(out.end(), t.conjuncts_.begin(), t.conjuncts_.end());
        return Scheme(std::move(out), s.universe_);
    }

    bool operator==(const Scheme& o) const { return universe_ == o.universe_ && conjuncts_ == o.conjuncts_; }

    /// Total order used for deterministic tie-breaking: fewer predicates
    /// first, then fewer conjuncts, then lexicographic conjunct lists.
    std::strong_ordering operator<=>(const Scheme& o) const {
        if (auto c = ary() <=> o.ary(); c != 0) {
            return c;
        }
        if (auto c = conjuncts_.size() <=> o.conjuncts_.size(); c != 0) {
            return c;
        }
        for (std::size_t i = 0; i < conjuncts_.size(); ++i) {
            if (auto c = conjuncts_[i] <=> o.conjuncts_[i]; c != 0) {
                return c;
            }
        }
        return universe_ <=> o.universe_;
    }

    /// Renders e.g. `(author.soundex ∧ title.exact) ∨ (venue.exact)`.
    std::string to_string(const std::vector<std::string>& names) const {
        std::string out;
        const bool many = conjuncts_.size() > 1;
        for (std::size_t i = 0; i < conjuncts_.size(); ++i) {
            if (i > 0) {
                out += " ∨ ";
            }
            if (many) {
                out += '(';
            }
            bool first = true;
            for (auto p : conjuncts_[i].indexes()) {
                if (!first) {
                    out += " ∧ ";
                }
                first = false;
                out += p < names.size() ? names[p] : "p" + std::to_string(p);
            }
            if (many) {
                out += ')';
            }
        }
        return out;
    }

    /// Parses scheme text over the named predicates. Accepts ∧ / & / AND and
    /// ∨ / | / OR with the usual precedence and nested parentheses.
    static Scheme parse(std::string_view text, const std::vector<std::string>& names);

private:
    Scheme(std::vector<PredicateSet> conjuncts, std::size_t universe) : universe_(universe) {
        if (conjuncts.empty()) {
            throw ConfigError("a scheme needs at least one conjunct");
        }
        for (const auto& c : conjuncts) {
            if (c.empty()) {
                throw ConfigError("a conjunct needs at least one predicate");
            }
        }
        // Smaller conjuncts first so absorption only looks backwards.
        std::sort(conjuncts.begin(), conjuncts.end(), [](const PredicateSet& a, const PredicateSet& b) {
            if (a.count() != b.count()) {
                return a.count() < b.count();
            }
            return a < b;
        });
        for (const auto& c : conjuncts) {
            bool absorbed = false;
            for (const auto& kept : conjuncts_) {
                if (kept.subset_of(c)) {
                    absorbed = true;
                    break;
                }
            }
            if (!absorbed) {
                conjuncts_.push_back(c);
            }
        }
        std::sort(conjuncts_.begin(), conjuncts_.end());
    }

    static void check_index(std::size_t index, std::size_t universe) {
        if (index >= universe) {
            throw ConfigError("predicate index " + std::to_string(index) + " outside a universe of " +
                              std::to_string(universe));
        }
    }

    static void check_universe(const Scheme& s, const Scheme& t) {
        if (s.universe_ != t.universe_) {
            throw ConfigError("schemes are bound to different predicate universes");
        }
    }

    std::vector<PredicateSet> conjuncts_;
    std::size_t universe_ = 0;
};

namespace detail {

class SchemeParser {
public:
    SchemeParser(std::string_view text, const std::vector<std::string>& names) : text_(text) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            lookup_.emplace(names[i], i);
        }
        universe_ = names.size();
    }

    Scheme run() {
        Scheme s = disjunction();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(text_.substr(pos_, 1)) + "'");
        }
        return s;
    }

private:
    Scheme disjunction() {
        Scheme s = conjunction();
        while (take_any({"∨", "|", "OR ", "or "})) {
            s = disjoin(s, conjunction());
        }
        return s;
    }

    Scheme conjunction() {
        Scheme s = atom();
        while (take_any({"∧", "&", "AND ", "and "})) {
            s = conjoin(s, atom());
        }
        return s;
    }

    Scheme atom() {
        skip_space();
        if (take("(")) {
            Scheme s = disjunction();
            if (!take(")")) {
                fail("missing ')'");
            }
            return s;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected a predicate name");
        }
        const std::string name(text_.substr(start, pos_ - start));
        auto it = lookup_.find(name);
        if (it == lookup_.end()) {
            fail("unknown predicate '" + name + "'");
        }
        return Scheme::predicate(it->second, universe_);
    }

    static bool is_name_char(char c) {
        const auto u = static_cast<unsigned char>(c);
        return u >= 128 ? false : (std::isalnum(u) || c == '_' || c == '.' || c == '-');
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool take(std::string_view token) {
        skip_space();
        if (text_.substr(pos_).starts_with(token)) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    bool take_any(std::initializer_list<std::string_view> tokens) {
        for (auto t : tokens) {
            if (take(t)) {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("cannot parse scheme '" + std::string(text_) + "': " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t universe_ = 0;
    std::unordered_map<std::string, std::size_t> lookup_;
};

} // namespace detail

inline Scheme Scheme::parse(std::string_view text, const std::vector<std::string>& names) {
    return detail::SchemeParser(text, names).run();
}

/// All single-predicate schemes of a universe.
inline std::vector<Scheme> single_predicate_schemes(std::size_t universe) {
    std::vector<Scheme> out;
    out.reserve(universe);
    for (std::size_t i = 0; i < universe; ++i) {
        out.push_back(Scheme::predicate(i, universe));
    }
    return out;
}

} // namespace skyblock

#endif
