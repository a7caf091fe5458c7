#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "reflex/common.hpp"
#include "reflex/net/topology.hpp"

namespace reflex::eval {

inline constexpr std::size_t kDimensions = 16;

enum class Dimension : std::size_t {
    reflexivity,
    deliberation,
    emotions,
    cognitive_areas,
    inference_blending,
    goals,
    attention,
    perception_estimation,
    self_other_models,
    spatial,
    temporal,
    confidence,
    non_monotony,
    multimedia,
    embodiment_actions,
    external_interfaces,
};

inline constexpr std::array<std::string_view, kDimensions> kDimensionNames = {
    "reflexivity",      "deliberation", "emotions",   "cognitive_areas",    "inference_blending", "goals",
    "attention",        "perception_estimation",      "self_other_models",  "spatial",            "temporal",
    "confidence",       "non_monotony", "multimedia", "embodiment_actions", "external_interfaces",
};

struct CapabilityProfile {
    std::array<double, kDimensions> coefficient{};

    double& operator[](Dimension d) { return coefficient[static_cast<std::size_t>(d)]; }
    double operator[](Dimension d) const { return coefficient[static_cast<std::size_t>(d)]; }

    static CapabilityProfile uniform(double v) {
        CapabilityProfile p;
        p.coefficient.fill(v);
        return p;
    }
};

struct IndexWeights {
    std::array<double, kDimensions> weight{};
    double epsilon = 1e-6;

    // Reflexivity and deliberation count double.
    static IndexWeights defaults() {
        IndexWeights w;
        w.weight.fill(1.0);
        w.weight[static_cast<std::size_t>(Dimension::reflexivity)] = 2.0;
        w.weight[static_cast<std::size_t>(Dimension::deliberation)] = 2.0;
        return w;
    }
    static IndexWeights unit() {
        IndexWeights w;
        w.weight.fill(1.0);
        return w;
    }
};

struct IndexResult {
    double index = 0.0;
    double log_score = 0.0;
};

// log_score = sum_d w_d ln(max(c_d, eps)); index = exp(log_score).
inline IndexResult reflexivity_index(const CapabilityProfile& profile, const IndexWeights& w) {
    bool any_positive = false;
    for (double v : w.weight) {
        if (v < 0.0) throw ConfigError("index weights must be >= 0");
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) throw ConfigError("at least one index weight must be positive");
    if (!(w.epsilon > 0.0)) throw ConfigError("index epsilon must be > 0");
    IndexResult r;
    for (std::size_t d = 0; d < kDimensions; ++d)
        r.log_score += w.weight[d] * std::log(std::max(profile.coefficient[d], w.epsilon));
    r.index = std::exp(r.log_score);
    return r;
}

inline double cardinality_index(const net::NetworkTopology& topo) {
    return std::log10(static_cast<double>(topo.top_width()));
}

struct FeatureFlags {
    bool has_goal_system = false;
    bool has_effectors = false;
    bool has_multimedia = false;
    bool has_deliberation_unit = false;
};

struct Classification {
    bool reflexive = false;
    bool deliberative = false;
    bool autonomous = false;
    bool fully_reflexive = false;
    bool complete = false;
    bool r_complete = false;
    bool d_complete = false;

    bool any() const {
        return reflexive || deliberative || autonomous || fully_reflexive || complete || r_complete || d_complete;
    }
};

inline Classification classify(const CapabilityProfile& profile, const FeatureFlags& f, double epsilon = 1e-6) {
    Classification c;
    c.reflexive = profile[Dimension::reflexivity] >= 1.0 - epsilon;
    c.deliberative = c.reflexive && f.has_deliberation_unit;
    c.autonomous = c.reflexive && f.has_goal_system;
    c.fully_reflexive = c.reflexive && f.has_multimedia;
    c.complete = c.fully_reflexive && f.has_effectors && c.autonomous;
    c.r_complete = c.complete;
    c.d_complete = c.r_complete && c.deliberative;
    return c;
}

// Flat "name = value" block, one dimension per line, fixed order.
inline std::string format_profile(const CapabilityProfile& p) {
    std::string out;
    char buf[64];
    for (std::size_t d = 0; d < kDimensions; ++d) {
        std::snprintf(buf, sizeof buf, " = %.17g\n", p.coefficient[d]);
        out += std::string(kDimensionNames[d]) + buf;
    }
    return out;
}

inline CapabilityProfile parse_profile(const std::string& text) {
    CapabilityProfile p;
    std::array<bool, kDimensions> seen{};
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw ConfigError("profile line without '=': " + line);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        std::size_t d = 0;
        while (d < kDimensions && kDimensionNames[d] != key) ++d;
        if (d == kDimensions) throw ConfigError("unknown profile dimension '" + key + "'");
        double v = 0;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("bad coefficient for " + key);
        }
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("coefficient for " + key + " outside [0, 1]");
        p.coefficient[d] = v;
        seen[d] = true;
    }
    for (std::size_t d = 0; d < kDimensions; ++d)
        if (!seen[d]) throw ConfigError("profile missing dimension '" + std::string(kDimensionNames[d]) + "'");
    return p;
}

inline std::string format_report(const CapabilityProfile& p, const IndexWeights& w, const IndexResult& idx,
                                 double cardinality, const Classification& c) {
    std::ostringstream os;
    char buf[128];
    os << "dimension               coefficient  weight\n";
    for (std::size_t d = 0; d < kDimensions; ++d) {
        std::snprintf(buf, sizeof buf, "%-22s  %11.6f  %6.2f\n", std::string(kDimensionNames[d]).c_str(),
                      p.coefficient[d], w.weight[d]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "reflexivity_index       %.6e\nlog_score               %.6f\ncardinality_index       %.6f\n",
                  idx.index, idx.log_score, cardinality);
    os << buf;
    auto b = [](bool v) { return v ? "yes" : "no"; };
    os << "reflexive               " << b(c.reflexive) << '\n'
       << "deliberative            " << b(c.deliberative) << '\n'
       << "autonomous              " << b(c.autonomous) << '\n'
       << "fully_reflexive         " << b(c.fully_reflexive) << '\n'
       << "complete                " << b(c.complete) << '\n'
       << "r_complete              " << b(c.r_complete) << '\n'
       << "d_complete              " << b(c.d_complete) << '\n';
    return os.str();
}

}  // namespace reflex::eval
