#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "reflex/common.hpp"

namespace reflex::net {

// Layer layout of one reflexive unit.
//
// Layer 0 is the entry layer: [perception (p) | recurrent projection of the
// top layer (c + k_act) | emotions]. Layers 1..j_max form the encoder, and when
// decoder_layers == j_max the layers j_max+1..2*j_max mirror it back down to a
// perception estimate of width p.
struct NetworkTopology {
    int j_max = 2;
    std::vector<int> hidden{128, 128};  // h(1)..h(j_max)
    int decoder_layers = 0;             // 0 (estimate read from the char head) or j_max
    int p = 256;
    int c = 256;
    int k_act = 11;
    int emotion_count = 9;
    int n_cells = 4;

    int recurrent_width() const { return c + k_act; }
    int entry_width() const { return p + c + k_act + emotion_count; }
    int top_width() const { return hidden.back(); }

    // Index of the last layer (encoder top when there is no decoder).
    int last_layer() const { return j_max + decoder_layers; }

    // h(j) for j = 0..last_layer().
    int h(int j) const {
        if (j == 0) return entry_width();
        if (j <= j_max) return hidden[static_cast<std::size_t>(j - 1)];
        const int i = j - j_max;  // 1..decoder_layers
        if (i == decoder_layers) return p;
        return h(j_max - i);
    }

    std::vector<int> layer_sizes() const {
        std::vector<int> out;
        for (int j = 0; j <= last_layer(); ++j) out.push_back(h(j));
        return out;
    }

    long long total_neurons() const {
        long long total = 0;
        for (int j = 0; j <= last_layer(); ++j) total += h(j);
        return total;
    }

    void validate() const {
        if (j_max < 1) throw ConfigError("j_max must be >= 1");
        if (static_cast<int>(hidden.size()) != j_max)
            throw ConfigError("hidden layer table has " + std::to_string(hidden.size()) +
                              " entries, expected j_max = " + std::to_string(j_max));
        for (int w : hidden)
            if (w < 1) throw ConfigError("hidden layer sizes must be >= 1");
        if (decoder_layers != 0 && decoder_layers != j_max)
            throw ConfigError("decoder_layers must be 0 or j_max");
        if (p < 1 || c < 1 || k_act < 1 || n_cells < 1)
            throw ConfigError("p, c, k_act and n_cells must be >= 1");
        if (emotion_count < 0) throw ConfigError("emotion_count must be >= 0");
    }

    bool operator==(const NetworkTopology&) const = default;
};

}  // namespace reflex::net
