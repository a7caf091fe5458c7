#pragma once

#include <cstdint>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/evolve/init_weights.hpp"
#include "reflex/net/bptt.hpp"
#include "reflex/net/forward.hpp"

namespace reflex::testing {

inline net::NetworkTopology tiny(int j_max, int h, int decoder = 0, int p = 4, int c = 4, int k = 2, int e = 2) {
    net::NetworkTopology t;
    t.j_max = j_max;
    t.hidden.assign(static_cast<std::size_t>(j_max), h);
    t.decoder_layers = decoder;
    t.p = p;
    t.c = c;
    t.k_act = k;
    t.emotion_count = e;
    return t;
}

// Weights with nonzero biases so every parameter is exercised.
inline net::WeightStore random_weights(const net::NetworkTopology& t, std::uint64_t seed, double scale = 0.8) {
    auto w = evolve::init_weights(t, seed);
    SplitMix rng(seed ^ 0x5151);
    w.for_each_block([&](auto& m) {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
    });
    return w;
}

inline std::vector<net::TrajectoryStep> random_trajectory(const net::NetworkTopology& t, int len, std::uint64_t seed) {
    SplitMix rng(seed);
    std::vector<net::TrajectoryStep> out;
    for (int s = 0; s < len; ++s) {
        net::TrajectoryStep st;
        st.input.perception = net::encode_char(static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(t.p))),
                                               rng.uniform(0.3, 1.0), t.p);
        st.input.emotions = Vector(t.emotion_count);
        for (Eigen::Index i = 0; i < st.input.emotions.size(); ++i) st.input.emotions[i] = rng.uniform();
        st.target = static_cast<int>(rng.below(static_cast<std::uint64_t>(t.c)));
        if (t.decoder_layers > 0) st.observed = net::encode_char(static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(t.p))), 1.0, t.p);
        out.push_back(std::move(st));
    }
    return out;
}

inline net::StepInput input_for(const net::NetworkTopology& t, std::uint8_t byte, double conf = 1.0) {
    net::StepInput in;
    in.perception = net::encode_char(byte, conf, t.p);
    in.emotions = Vector::Zero(t.emotion_count);
    return in;
}

}  // namespace reflex::testing
