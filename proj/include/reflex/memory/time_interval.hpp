#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "reflex/common.hpp"

namespace reflex::memory {

using Rational = boost::multiprecision::cpp_rational;

// A time scale: unit length in seconds and the position of its origin,
// expressed in seconds from the base origin (0 CE).
struct TimeScale {
    Rational unit_seconds;
    Rational origin_seconds;
};

inline const Rational& julian_year_seconds() {
    static const Rational y{31557600};
    return y;
}

class ScaleRegistry {
public:
    ScaleRegistry() {
        const Rational year = julian_year_seconds();
        add("millisecond", {Rational(1, 1000), 0});
        add("second", {1, 0});
        add("minute", {60, 0});
        add("hour", {3600, 0});
        add("day", {86400, 0});
        add("year", {year, 0});
        // Years counted from the conventional "present" (1950 CE).
        add("year_bp", {year, year * 1950});
    }
    void add(const std::string& name, TimeScale s) { scales_[name] = std::move(s); }
    const TimeScale& at(const std::string& name) const {
        auto it = scales_.find(name);
        if (it == scales_.end()) throw UnknownScale("unknown time scale '" + name + "'");
        return it->second;
    }
    bool has(const std::string& name) const { return scales_.count(name) != 0; }

    static const ScaleRegistry& standard() {
        static const ScaleRegistry r;
        return r;
    }

private:
    std::map<std::string, TimeScale> scales_;
};

enum class TimeKind { EventTime, RecordingTime };

struct TimeInterval {
    std::string scale = "second";
    Rational start = 0;
    Rational duration = 0;
    TimeKind kind = TimeKind::EventTime;

    bool operator==(const TimeInterval&) const = default;
};

struct BaseInterval {
    Rational lo, hi;
};

inline BaseInterval to_base(const TimeInterval& x, const ScaleRegistry& reg = ScaleRegistry::standard()) {
    if (x.duration < 0) throw ConfigError("time interval duration must be >= 0");
    const auto& s = reg.at(x.scale);
    const Rational lo = s.origin_seconds + x.start * s.unit_seconds;
    return {lo, lo + x.duration * s.unit_seconds};
}

enum class IntervalRelation { Includes, IncludedIn, Precedes, Succeeds, Overlaps, Equal };

inline const char* to_string(IntervalRelation r) {
    switch (r) {
        case IntervalRelation::Includes: return "Includes";
        case IntervalRelation::IncludedIn: return "IncludedIn";
        case IntervalRelation::Precedes: return "Precedes";
        case IntervalRelation::Succeeds: return "Succeeds";
        case IntervalRelation::Overlaps: return "Overlaps";
        case IntervalRelation::Equal: return "Equal";
    }
    return "?";
}

// Relation of x to y on closed base-unit intervals [start, start + duration].
inline IntervalRelation interval_relation(const TimeInterval& x, const TimeInterval& y,
                                          const ScaleRegistry& reg = ScaleRegistry::standard()) {
    const auto a = to_base(x, reg);
    const auto b = to_base(y, reg);
    if (a.lo == b.lo && a.hi == b.hi) return IntervalRelation::Equal;
    if (a.hi < b.lo) return IntervalRelation::Precedes;
    if (b.hi < a.lo) return IntervalRelation::Succeeds;
    if (a.lo <= b.lo && b.hi <= a.hi) return IntervalRelation::Includes;
    if (b.lo <= a.lo && a.hi <= b.hi) return IntervalRelation::IncludedIn;
    return IntervalRelation::Overlaps;
}

inline IntervalRelation converse(IntervalRelation r) {
    switch (r) {
        case IntervalRelation::Includes: return IntervalRelation::IncludedIn;
        case IntervalRelation::IncludedIn: return IntervalRelation::Includes;
        case IntervalRelation::Precedes: return IntervalRelation::Succeeds;
        case IntervalRelation::Succeeds: return IntervalRelation::Precedes;
        default: return r;
    }
}

// Intervals arranged by inclusion: each node hangs under the tightest
// interval that includes it; siblings are kept in start order.
class IntervalTree {
public:
    explicit IntervalTree(const ScaleRegistry& reg = ScaleRegistry::standard()) : reg_(&reg) {}

    // Returns the node id.
    std::size_t insert(const TimeInterval& x) {
        to_base(x, *reg_);  // validates the scale
        const std::size_t id = nodes_.size();
        nodes_.push_back({x, std::nullopt, {}});
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < id; ++i) {
            const auto r = interval_relation(nodes_[i].interval, x, *reg_);
            if (r != IntervalRelation::Includes) continue;
            if (!best || interval_relation(nodes_[*best].interval, nodes_[i].interval, *reg_) == IntervalRelation::Includes)
                best = i;
        }
        // Existing nodes that x now tightly includes move under it.
        for (std::size_t i = 0; i < id; ++i) {
            if (nodes_[i].parent != best) continue;
            if (interval_relation(x, nodes_[i].interval, *reg_) == IntervalRelation::Includes) reparent(i, id);
        }
        nodes_[id].parent = best;
        if (best) add_child(*best, id);
        return id;
    }

    std::optional<std::size_t> parent(std::size_t id) const { return nodes_.at(id).parent; }
    const std::vector<std::size_t>& children(std::size_t id) const { return nodes_.at(id).children; }
    const TimeInterval& interval(std::size_t id) const { return nodes_.at(id).interval; }
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        TimeInterval interval;
        std::optional<std::size_t> parent;
        std::vector<std::size_t> children;
    };
    void reparent(std::size_t node, std::size_t new_parent) {
        if (auto old = nodes_[node].parent) {
            auto& ch = nodes_[*old].children;
            ch.erase(std::remove(ch.begin(), ch.end(), node), ch.end());
        }
        nodes_[node].parent = new_parent;
        add_child(new_parent, node);
    }
    void add_child(std::size_t parent, std::size_t child) {
        auto& ch = nodes_[parent].children;
        const auto key = to_base(nodes_[child].interval, *reg_).lo;
        auto pos = std::find_if(ch.begin(), ch.end(),
                                [&](std::size_t c) { return to_base(nodes_[c].interval, *reg_).lo > key; });
        ch.insert(pos, child);
    }

    const ScaleRegistry* reg_;
    std::vector<Node> nodes_;
};

}  // namespace reflex::memory
