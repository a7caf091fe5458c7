#pragma once

#include <cmath>

#include "reflex/common.hpp"
#include "reflex/net/forward.hpp"

namespace reflex::net {

// Draws a character from softmax(logits / temperature). temperature <= 0
// selects the argmax.
inline int sample_char(const Vector& logits, double temperature, SplitMix& rng) {
    if (!(temperature > 0.0)) return argmax(logits);
    const double mx = logits.maxCoeff();
    Vector w = ((logits.array() - mx) / temperature).exp().matrix();
    const double total = w.sum();
    double u = rng.uniform() * total;
    for (int i = 0; i < w.size(); ++i) {
        u -= w[i];
        if (u < 0.0) return i;
    }
    return argmax(logits);
}

}  // namespace reflex::net
