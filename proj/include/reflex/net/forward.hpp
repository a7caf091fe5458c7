#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/net/topology.hpp"
#include "reflex/net/weights.hpp"

namespace reflex::net {

// Activations of every layer at step t (layer 0 included).
template <typename T>
struct BasicNetworkState {
    std::vector<Vec<T>> S;
    std::int64_t t = 0;

    static BasicNetworkState zeros(const NetworkTopology& topo) {
        BasicNetworkState s;
        for (int j = 0; j <= topo.last_layer(); ++j) s.S.push_back(Vec<T>::Zero(topo.h(j)));
        return s;
    }

    const Vec<T>& top(const NetworkTopology& topo) const {
        return S[static_cast<std::size_t>(topo.j_max)];
    }
    Vec<T>& top(const NetworkTopology& topo) { return S[static_cast<std::size_t>(topo.j_max)]; }

    template <typename U>
    BasicNetworkState<U> cast() const {
        BasicNetworkState<U> out;
        out.t = t;
        for (const auto& v : S) out.S.push_back(v.template cast<U>());
        return out;
    }

    bool operator==(const BasicNetworkState& o) const {
        if (t != o.t || S.size() != o.S.size()) return false;
        for (std::size_t i = 0; i < S.size(); ++i)
            if (S[i].size() != o.S[i].size() || S[i] != o.S[i]) return false;
        return true;
    }
};
using NetworkState = BasicNetworkState<double>;

template <typename T>
struct BasicStepInput {
    Vec<T> perception;
    Vec<T> emotions;
    // Replaces R * S_top in the entry layer when set.
    std::optional<Vec<T>> injected_recurrent;
};
using StepInput = BasicStepInput<double>;

template <typename T>
struct BasicStepOutput {
    Vec<T> actions;
    Vec<T> char_logits;
    Vec<T> char_dist;
    Vec<T> predicted_perception;  // empty without a decoder
};
using StepOutput = BasicStepOutput<double>;

// Confidence-scaled one-hot character.
inline Vector encode_char(std::uint8_t byte, double confidence, int width = 256) {
    Vector v = Vector::Zero(width);
    if (byte < width) v[byte] = confidence;
    return v;
}

template <typename T>
Vec<T> softmax(const Vec<T>& logits) {
    const T mx = logits.maxCoeff();
    Vec<T> e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

template <typename T>
Vec<T> logistic(const Vec<T>& z) {
    return (T(1) / (T(1) + (-z.array()).exp())).matrix();
}

// argmax, lowest index on ties.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline int select_action(const Vector& actions) { return argmax(actions); }

// Effective bias for the provided layer vectors, or the base bias when empty.
template <typename T>
const BasicLayerVectors<T>& resolve_bias(const BasicWeightStore<T>& w, const BasicLayerVectors<T>& bias) {
    return bias.empty() ? w.bias : bias;
}

template <typename T>
void check_step_shapes(const NetworkTopology& topo, const BasicNetworkState<T>& state,
                       const BasicStepInput<T>& in, const BasicLayerVectors<T>& bias) {
    if (static_cast<int>(state.S.size()) != topo.last_layer() + 1)
        throw ShapeMismatch("state layer count does not match topology");
    for (int j = 0; j <= topo.last_layer(); ++j)
        if (state.S[static_cast<std::size_t>(j)].size() != topo.h(j))
            throw ShapeMismatch("state layer " + std::to_string(j) + " has wrong width");
    if (in.perception.size() != topo.p) throw ShapeMismatch("perception width != p");
    if (in.emotions.size() != topo.emotion_count) throw ShapeMismatch("emotion width != emotion_count");
    if (in.injected_recurrent && in.injected_recurrent->size() != topo.recurrent_width())
        throw ShapeMismatch("injected recurrent width != c + k_act");
    if (!bias.empty()) {
        if (static_cast<int>(bias.size()) != topo.last_layer() + 1)
            throw ShapeMismatch("bias layer count does not match topology");
        for (int j = 1; j <= topo.last_layer(); ++j)
            if (bias[static_cast<std::size_t>(j)].size() != topo.h(j))
                throw ShapeMismatch("bias layer " + std::to_string(j) + " has wrong width");
    }
}

namespace detail {

// Forward pass without shape checks. `next` receives all layer activations.
template <typename T>
void forward_into(const NetworkTopology& topo, const BasicNetworkState<T>& prev,
                  const BasicWeightStore<T>& w, const BasicStepInput<T>& in,
                  const BasicLayerVectors<T>& bias_in, BasicNetworkState<T>& next,
                  BasicStepOutput<T>& out) {
    const auto& bias = resolve_bias(w, bias_in);
    const int L = topo.last_layer();
    const int rw = topo.recurrent_width();
    if (next.S.size() != prev.S.size()) next.S.resize(prev.S.size());

    Vec<T>& x0 = next.S[0];
    x0.resize(topo.entry_width());
    x0.head(topo.p) = in.perception;
    if (in.injected_recurrent)
        x0.segment(topo.p, rw) = *in.injected_recurrent;
    else
        x0.segment(topo.p, rw).noalias() = w.R * prev.top(topo);
    x0.tail(topo.emotion_count) = in.emotions;

    for (int j = 1; j <= L; ++j) {
        const auto& Wj = w.W[static_cast<std::size_t>(j - 1)];
        const auto& below = next.S[static_cast<std::size_t>(j - 1)];
        Vec<T> z = bias[static_cast<std::size_t>(j)];
        if (j == 1) {
            // The perception block is nearly always one-hot.
            for (int i = 0; i < topo.p; ++i)
                if (below[i] != T(0)) z += Wj.col(i) * below[i];
            const int rest = topo.entry_width() - topo.p;
            z.noalias() += Wj.rightCols(rest) * below.tail(rest);
        } else {
            z.noalias() += Wj * below;
        }
        auto& xj = next.S[static_cast<std::size_t>(j)];
        if (j == L && topo.decoder_layers > 0)
            xj = logistic<T>(z);
        else
            xj = z.array().tanh().matrix();
    }
    next.t = prev.t + 1;

    const auto& top = next.top(topo);
    out.char_logits.noalias() = w.char_head * top;
    out.char_logits += w.char_bias;
    out.char_dist = softmax<T>(out.char_logits);
    Vec<T> za = w.action_head * top + w.action_bias;
    out.actions = logistic<T>(za);
    if (topo.decoder_layers > 0)
        out.predicted_perception = next.S[static_cast<std::size_t>(L)];
    else
        out.predicted_perception.resize(0);
}

}  // namespace detail

// One step of the layered update: the entry layer is rebuilt from the new
// perception, the projection R * S_top of the previous top layer and the
// emotions; every higher layer is activation(W * below + bias).
template <typename T>
std::pair<BasicNetworkState<T>, BasicStepOutput<T>> forward_step(
    const NetworkTopology& topo, const BasicNetworkState<T>& state, const BasicWeightStore<T>& weights,
    const BasicStepInput<T>& input, const BasicLayerVectors<T>& bias_effective = {}) {
    check_shapes(topo, weights);
    check_step_shapes(topo, state, input, bias_effective);
    BasicNetworkState<T> next;
    BasicStepOutput<T> out;
    detail::forward_into(topo, state, weights, input, bias_effective, next, out);
    return {std::move(next), std::move(out)};
}

// The network's own estimate of its next perception: the decoder output when
// present, otherwise the character distribution.
template <typename T>
const Vec<T>& perception_estimate(const BasicStepOutput<T>& out) {
    return out.predicted_perception.size() > 0 ? out.predicted_perception : out.char_dist;
}

// Mean absolute difference, clamped to [0, 1].
inline double surprise(const Vector& predicted, const Vector& observed) {
    if (predicted.size() != observed.size()) throw ShapeMismatch("surprise: width mismatch");
    if (predicted.size() == 0) return 0.0;
    const double m = (predicted - observed).cwiseAbs().mean();
    return std::clamp(m, 0.0, 1.0);
}

}  // namespace reflex::net
