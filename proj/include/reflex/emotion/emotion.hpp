#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/net/forward.hpp"

namespace reflex::emotion {

enum class ExtractionMode { TopNeuron, LayerSum };
enum class Rescale { Tanh, Identity };  // tanh maps [-1,1] -> [0,1]

struct EmotionVector {
    Vector values;
    std::vector<std::string> labels;
    std::vector<std::optional<double>> pins;  // externally injected values

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }

    static EmotionVector zeros(const std::vector<std::string>& labels) {
        EmotionVector e;
        e.labels = labels;
        e.values = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
        e.pins.assign(labels.size(), std::nullopt);
        return e;
    }

    std::optional<std::size_t> index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        return std::nullopt;
    }
};

// Corners of the three-mediator cube (serotonin, dopamine, noradrenaline),
// low/high in that order, plus a channel driven by prediction error.
inline std::vector<std::string> default_labels() {
    return {"shame", "distress", "fear", "anger", "contempt", "startle", "joy", "interest", "surprise"};
}

struct EmotionConfig {
    std::vector<std::string> labels = default_labels();
    ExtractionMode extraction = ExtractionMode::TopNeuron;
    Rescale rescale = Rescale::Tanh;
    double inertia = 0.8;  // lambda
    Matrix coupling;       // count x count; empty means zero
    std::vector<int> hedonic_sign = {-1, -1, -1, -1, -1, +1, +1, +1, +1};
    double hedonic_rate = 0.0;  // eta
    double weight_bound = 5.0;  // magnitude clamp after reinforcement
    std::map<std::size_t, double> injection_overrides;
    // Emotion whose raw value comes from prediction error instead of a neuron.
    std::optional<std::size_t> surprise_index = 8;

    std::size_t count() const { return labels.size(); }

    void validate() const {
        if (inertia < 0.0 || inertia > 1.0) throw ConfigError("emotion inertia must lie in [0, 1]");
        const auto n = static_cast<Eigen::Index>(count());
        if (coupling.size() > 0 && (coupling.rows() != n || coupling.cols() != n))
            throw ConfigError("emotion coupling must be count x count");
        if (coupling.size() > 0 && !coupling.allFinite()) throw ConfigError("emotion coupling must be finite");
        if (hedonic_sign.size() != count()) throw ConfigError("hedonic_sign needs one entry per emotion");
        for (int s : hedonic_sign)
            if (s != 1 && s != -1) throw ConfigError("hedonic_sign entries must be +1 or -1");
        if (hedonic_rate < 0.0) throw ConfigError("hedonic_rate must be >= 0");
        for (const auto& [i, v] : injection_overrides)
            if (i >= count() || v < 0.0 || v > 1.0) throw ConfigError("bad injection override");
        if (surprise_index && *surprise_index >= count()) throw ConfigError("surprise_index out of range");
    }
};

inline double rescale_activation(double s, Rescale r) {
    return r == Rescale::Tanh ? 0.5 * (s + 1.0) : s;
}

// Raw emotion levels read from the network state.
inline Vector extract_raw(const net::NetworkTopology& topo, const net::NetworkState& state,
                          const EmotionConfig& cfg) {
    const auto n = static_cast<int>(cfg.count());
    Vector raw = Vector::Zero(n);
    if (n == 0) return raw;
    if (cfg.extraction == ExtractionMode::TopNeuron) {
        const auto& top = state.top(topo);
        if (n > top.size()) throw ConfigError("emotion count exceeds top layer width");
        for (int e = 0; e < n; ++e) raw[e] = std::clamp(rescale_activation(top[e], cfg.rescale), 0.0, 1.0);
        return raw;
    }
    for (int j = 1; j <= topo.j_max; ++j)
        if (n > topo.h(j)) throw ConfigError("emotion count exceeds width of layer " + std::to_string(j));
    for (int e = 0; e < n; ++e) {
        double sum = 0.0;
        for (int j = 1; j <= topo.j_max; ++j)
            sum += rescale_activation(state.S[static_cast<std::size_t>(j)][e], cfg.rescale);
        raw[e] = std::clamp(sum / topo.j_max, 0.0, 1.0);
    }
    return raw;
}

// E' = clamp(lambda * prev + (1 - lambda) * (raw + coupling * prev), 0, 1),
// then pinned entries.
inline EmotionVector update_emotions(const EmotionVector& prev, const Vector& raw, const EmotionConfig& cfg) {
    if (raw.size() != prev.values.size()) throw ShapeMismatch("raw emotion width differs from emotion vector");
    EmotionVector next = prev;
    Vector drive = raw;
    if (cfg.coupling.size() > 0) drive.noalias() += cfg.coupling * prev.values;
    next.values = (cfg.inertia * prev.values + (1.0 - cfg.inertia) * drive).cwiseMax(0.0).cwiseMin(1.0);
    for (const auto& [i, v] : cfg.injection_overrides)
        if (i < next.size()) next.values[static_cast<Eigen::Index>(i)] = v;
    for (std::size_t i = 0; i < next.pins.size(); ++i)
        if (next.pins[i]) next.values[static_cast<Eigen::Index>(i)] = *next.pins[i];
    return next;
}

inline EmotionVector inject(const EmotionVector& e, std::size_t index, double value) {
    if (index >= e.size()) throw IndexError("emotion index " + std::to_string(index) + " out of range");
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("injected emotion value must lie in [0, 1]");
    EmotionVector out = e;
    if (out.pins.size() < out.size()) out.pins.resize(out.size());
    out.pins[index] = value;
    out.values[static_cast<Eigen::Index>(index)] = value;
    return out;
}

inline EmotionVector clear(const EmotionVector& e, std::size_t index) {
    if (index >= e.size()) throw IndexError("emotion index " + std::to_string(index) + " out of range");
    EmotionVector out = e;
    if (out.pins.size() < out.size()) out.pins.resize(out.size());
    out.pins[index].reset();
    return out;
}

// A set of neurons whose bias follows the same function of the emotions.
struct CognitiveArea {
    std::string name;
    std::vector<std::pair<int, int>> members;  // (layer, neuron), layer >= 1
    Vector sensitivity;                        // one weight per emotion
};

// bias = base + u_area . E for area members; other neurons keep the base.
inline net::LayerVectors effective_bias(const net::LayerVectors& base, const std::vector<CognitiveArea>& areas,
                                        const Vector& E) {
    net::LayerVectors out = base;
    std::set<std::pair<int, int>> seen;
    for (const auto& a : areas) {
        if (a.sensitivity.size() != E.size())
            throw ShapeMismatch("area '" + a.name + "' sensitivity width differs from emotion count");
        const double shift = a.sensitivity.dot(E);
        for (const auto& m : a.members) {
            const auto [layer, neuron] = m;
            if (layer < 1 || layer >= static_cast<int>(out.size()) || neuron < 0 ||
                neuron >= out[static_cast<std::size_t>(layer)].size())
                throw ConfigError("area '" + a.name + "' names a neuron outside the topology");
            if (!seen.insert(m).second)
                throw OverlapError("neuron (" + std::to_string(layer) + ", " + std::to_string(neuron) +
                                   ") belongs to more than one cognitive area");
            out[static_cast<std::size_t>(layer)][neuron] += shift;
        }
    }
    return out;
}

// Scales the incoming weights of top-layer neuron e by
// (1 + eta * sign[e] * E[e]), then clamps magnitudes to the weight bound.
inline net::WeightStore hedonic_reinforce(const net::NetworkTopology& topo, const net::WeightStore& w,
                                          const Vector& E, const EmotionConfig& cfg) {
    if (cfg.extraction != ExtractionMode::TopNeuron)
        throw ConfigError("hedonic reinforcement requires TopNeuron extraction");
    net::WeightStore out = w;
    if (cfg.hedonic_rate == 0.0) return out;
    auto& Wtop = out.W[static_cast<std::size_t>(topo.j_max - 1)];
    const auto n = std::min<Eigen::Index>(E.size(), Wtop.rows());
    for (Eigen::Index e = 0; e < n; ++e) {
        if (E[e] == 0.0) continue;
        const double f = 1.0 + cfg.hedonic_rate * cfg.hedonic_sign[static_cast<std::size_t>(e)] * E[e];
        Wtop.row(e) = (Wtop.row(e) * f).cwiseMax(-cfg.weight_bound).cwiseMin(cfg.weight_bound);
    }
    return out;
}

}  // namespace reflex::emotion
