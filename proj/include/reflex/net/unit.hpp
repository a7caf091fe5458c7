#pragma once

#include <cstdint>
#include <utility>

#include "reflex/net/forward.hpp"

namespace reflex::net {

// A network instance bundled with its running state.
struct ReflexiveUnit {
    NetworkTopology topo;
    WeightStore weights;
    NetworkState state;
    StepOutput last;

    ReflexiveUnit() = default;
    ReflexiveUnit(NetworkTopology t, WeightStore w)
        : topo(std::move(t)), weights(std::move(w)), state(NetworkState::zeros(topo)) {
        check_shapes(topo, weights);
    }

    const StepOutput& step(const StepInput& in, const LayerVectors& bias = {}) {
        auto [next, out] = forward_step(topo, state, weights, in, bias);
        state = std::move(next);
        last = std::move(out);
        return last;
    }

    StepInput input_for(std::uint8_t byte, double confidence, const Vector& emotions) const {
        StepInput in;
        in.perception = encode_char(byte, confidence, topo.p);
        in.emotions = emotions.size() == topo.emotion_count ? emotions : Vector::Zero(topo.emotion_count);
        return in;
    }

    void reset() {
        state = NetworkState::zeros(topo);
        last = {};
    }
};

}  // namespace reflex::net
