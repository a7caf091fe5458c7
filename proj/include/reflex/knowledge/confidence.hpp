#pragma once

#include <algorithm>

namespace reflex::knowledge {

// Certainty C, experimental basis X, value agreement V; each in [0, 1].
struct ConfidenceTriple {
    double C = 1.0;
    double X = 1.0;
    double V = 1.0;

    bool valid() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        return in01(C) && in01(X) && in01(V);
    }
    bool operator==(const ConfidenceTriple&) const = default;
};

// Conjunction: product certainty, weakest experimental basis, mean agreement.
struct ProductConjunction {
    ConfidenceTriple operator()(const ConfidenceTriple& a, const ConfidenceTriple& b) const {
        return {a.C * b.C, std::min(a.X, b.X), 0.5 * (a.V + b.V)};
    }
};

template <typename Rule = ProductConjunction>
ConfidenceTriple combine_confidence(const ConfidenceTriple& a, const ConfidenceTriple& b, Rule rule = {}) {
    return rule(a, b);
}

// The scalar fed to the entry layer as the input arc value.
inline double scalar_confidence(const ConfidenceTriple& t) { return t.C; }

}  // namespace reflex::knowledge
