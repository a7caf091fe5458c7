#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/knowledge/author.hpp"
#include "reflex/knowledge/confidence.hpp"
#include "reflex/memory/time_interval.hpp"

namespace reflex::knowledge {

enum class Polarity { Asserted, Negated };
enum class Origin { Perceived, Produced, Deliberated };

struct SentenceTuple {
    std::vector<std::string> terms;
    Polarity polarity = Polarity::Asserted;
    std::string author = kSelfAuthor;
    std::optional<std::string> place;  // SpatialTree node id
    std::optional<memory::TimeInterval> event_time;
    std::optional<memory::TimeInterval> recording_time;
    ConfidenceTriple confidence;
    Origin origin = Origin::Perceived;

    bool operator==(const SentenceTuple&) const = default;
};

enum class Verdict { True, False, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "True";
        case Verdict::False: return "False";
        case Verdict::Unknown: return "Unknown";
    }
    return "?";
}

// Pattern terms; std::nullopt is a wildcard. Lengths must agree to match.
using Pattern = std::vector<std::optional<std::string>>;

inline Pattern make_pattern(const std::vector<std::string>& parts, const std::string& wildcard = "?") {
    Pattern p;
    for (const auto& s : parts) p.push_back(s == wildcard ? std::nullopt : std::optional<std::string>(s));
    return p;
}

inline bool matches(const Pattern& p, const SentenceTuple& t) {
    if (p.size() != t.terms.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] && *p[i] != t.terms[i]) return false;
    return true;
}

struct QueryResult {
    Verdict verdict = Verdict::Unknown;
    std::vector<SentenceTuple> matches;
};

// Open-world, three-valued store. Readers take immutable snapshots; writers
// replace the snapshot (single writer).
class KnowledgeStore {
public:
    using Snapshot = std::shared_ptr<const std::vector<SentenceTuple>>;

    KnowledgeStore() : tuples_(std::make_shared<const std::vector<SentenceTuple>>()) {}

    Snapshot snapshot() const { return tuples_; }
    std::size_t size() const { return tuples_->size(); }
    AuthorRegistry& authors() { return authors_; }
    const AuthorRegistry& authors() const { return authors_; }

    // Duplicates (same terms, polarity and author) keep the higher-certainty version.
    void assert_tuple(const SentenceTuple& t) {
        if (t.terms.empty()) throw ConfigError("sentence tuple needs at least one term");
        if (!t.confidence.valid()) throw ConfigError("confidence components must lie in [0, 1]");
        auto next = std::make_shared<std::vector<SentenceTuple>>(*tuples_);
        bool merged = false;
        for (auto& existing : *next) {
            if (existing.terms == t.terms && existing.polarity == t.polarity && existing.author == t.author) {
                if (t.confidence.C > existing.confidence.C) existing = t;
                merged = true;
                break;
            }
        }
        if (!merged) next->push_back(t);
        tuples_ = std::move(next);
        authors_.observe(t.author, t.confidence.V);
    }

    QueryResult query(const Pattern& pattern) const { return query(*tuples_, pattern); }

    // Asserted and Negated matches compete on certainty; an exact tie, or no
    // match at all, is Unknown.
    static QueryResult query(const std::vector<SentenceTuple>& tuples, const Pattern& pattern) {
        if (pattern.empty()) throw ConfigError("query pattern must be nonempty");
        QueryResult r;
        double best_pos = -1.0, best_neg = -1.0;
        for (const auto& t : tuples) {
            if (!matches(pattern, t)) continue;
            r.matches.push_back(t);
            auto& best = t.polarity == Polarity::Asserted ? best_pos : best_neg;
            best = std::max(best, t.confidence.C);
        }
        if (best_pos < 0.0 && best_neg < 0.0)
            r.verdict = Verdict::Unknown;
        else if (best_pos > best_neg)
            r.verdict = Verdict::True;
        else if (best_neg > best_pos)
            r.verdict = Verdict::False;
        else
            r.verdict = Verdict::Unknown;
        return r;
    }

private:
    Snapshot tuples_;
    AuthorRegistry authors_;
};

}  // namespace reflex::knowledge
