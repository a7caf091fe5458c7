#pragma once

#include <cmath>
#include <cstdint>

#include "reflex/common.hpp"
#include "reflex/net/weights.hpp"

namespace reflex::evolve {

// Identifiers recorded in checkpoints so alternative laws can be added later.
enum class InitLaw : std::uint32_t { UniformFanIn = 0 };

// Counter-based draw: every weight depends only on (seed, block, row, column),
// so the result is independent of traversal order.
inline double init_draw(std::uint64_t seed, std::uint64_t block, std::uint64_t row, std::uint64_t col) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (block * 0x9E3779B97F4A7C15ull));
    h = splitmix64(h ^ (row * 0xC2B2AE3D27D4EB4Full));
    h = splitmix64(h ^ (col * 0x165667B19E3779F9ull));
    return unit_double(h);
}

// Weights uniform in [-r, r], r = 1/sqrt(fan_in) of the target layer; biases 0.
inline net::WeightStore init_weights(const net::NetworkTopology& topo, std::uint64_t seed) {
    auto w = net::WeightStore::zeros(topo);
    std::uint64_t block = 0;
    auto fill = [&](auto& m) {
        const double r = 1.0 / std::sqrt(static_cast<double>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                m(i, j) = (2.0 * init_draw(seed, block, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j)) - 1.0) * r;
        ++block;
    };
    for (auto& m : w.W) fill(m);
    fill(w.R);
    fill(w.char_head);
    fill(w.action_head);
    return w;
}

}  // namespace reflex::evolve
