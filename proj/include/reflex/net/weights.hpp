#pragma once

#include <cmath>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/net/topology.hpp"

namespace reflex::net {

// Per-neuron values for layers 1..last_layer; entry 0 is kept empty so the
// vector can be indexed by layer number.
template <typename T>
using BasicLayerVectors = std::vector<Vec<T>>;
using LayerVectors = BasicLayerVectors<double>;

// Synaptic weights W (layer j-1 -> j), recurrence R (top -> entry layer), the
// character and action read-outs of the top layer, and the base biases A.
// Signs are unrestricted.
template <typename T>
struct BasicWeightStore {
    std::vector<Mat<T>> W;  // W[j-1] : h(j) x h(j-1), j = 1..last_layer
    BasicLayerVectors<T> bias;
    Mat<T> R;  // (c + k_act) x h(j_max)
    Mat<T> char_head;
    Vec<T> char_bias;
    Mat<T> action_head;
    Vec<T> action_bias;

    static BasicWeightStore zeros(const NetworkTopology& topo) {
        topo.validate();
        BasicWeightStore s;
        const int L = topo.last_layer();
        s.bias.resize(static_cast<std::size_t>(L + 1));
        for (int j = 1; j <= L; ++j) {
            s.W.push_back(Mat<T>::Zero(topo.h(j), topo.h(j - 1)));
            s.bias[static_cast<std::size_t>(j)] = Vec<T>::Zero(topo.h(j));
        }
        s.R = Mat<T>::Zero(topo.recurrent_width(), topo.top_width());
        s.char_head = Mat<T>::Zero(topo.c, topo.top_width());
        s.char_bias = Vec<T>::Zero(topo.c);
        s.action_head = Mat<T>::Zero(topo.k_act, topo.top_width());
        s.action_bias = Vec<T>::Zero(topo.k_act);
        return s;
    }

    // Visits every parameter block in the fixed serialization order:
    // (W_j, A_j) for j = 1..L, then R, char head, char bias, action head,
    // action bias. Vectors are visited as single-column matrices.
    template <typename F>
    void for_each_block(F&& f) {
        for (std::size_t j = 0; j < W.size(); ++j) {
            f(W[j]);
            f(bias[j + 1]);
        }
        f(R);
        f(char_head);
        f(char_bias);
        f(action_head);
        f(action_bias);
    }
    template <typename F>
    void for_each_block(F&& f) const {
        const_cast<BasicWeightStore*>(this)->for_each_block(
            [&](auto& m) { f(static_cast<const std::remove_reference_t<decltype(m)>&>(m)); });
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for_each_block([&](const auto& m) { n += static_cast<std::size_t>(m.size()); });
        return n;
    }

    bool all_finite() const {
        bool ok = true;
        for_each_block([&](const auto& m) { ok = ok && m.allFinite(); });
        return ok;
    }

    bool has_negative() const {
        bool neg = false;
        for_each_block([&](const auto& m) { neg = neg || (m.size() > 0 && m.minCoeff() < T(0)); });
        return neg;
    }

    template <typename U>
    BasicWeightStore<U> cast() const {
        BasicWeightStore<U> out;
        for (const auto& w : W) out.W.push_back(w.template cast<U>());
        for (const auto& b : bias) out.bias.push_back(b.template cast<U>());
        out.R = R.template cast<U>();
        out.char_head = char_head.template cast<U>();
        out.char_bias = char_bias.template cast<U>();
        out.action_head = action_head.template cast<U>();
        out.action_bias = action_bias.template cast<U>();
        return out;
    }

    // this += scale * other, block by block.
    void axpy(T scale, const BasicWeightStore& other) {
        auto dst = blocks();
        auto src = other.blocks();
        for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] += scale * *src[i];
    }

    T squared_norm() const {
        T s = T(0);
        for_each_block([&](const auto& m) { s += m.squaredNorm(); });
        return s;
    }

    void scale(T factor) {
        for_each_block([&](auto& m) { m *= factor; });
    }

    bool same_shape(const BasicWeightStore& other) const {
        auto a = blocks();
        auto b = other.blocks();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols()) return false;
        return true;
    }

    bool operator==(const BasicWeightStore& other) const {
        if (!same_shape(other)) return false;
        auto a = blocks();
        auto b = other.blocks();
        for (std::size_t i = 0; i < a.size(); ++i)
            if (*a[i] != *b[i]) return false;
        return true;
    }

    // Flat list of pointers to all blocks. Eigen vectors and matrices are
    // distinct types, so vectors are exposed through a column-matrix map.
    struct BlockRef {
        Eigen::Map<Mat<T>> map;
        Eigen::Map<Mat<T>>* operator->() { return &map; }
        Eigen::Map<Mat<T>>& operator*() { return map; }
    };
    std::vector<BlockRef> blocks() const {
        std::vector<BlockRef> out;
        for_each_block([&](const auto& m) {
            auto* data = const_cast<T*>(m.data());
            out.push_back(BlockRef{Eigen::Map<Mat<T>>(data, m.rows(), m.cols())});
        });
        return out;
    }
};

using WeightStore = BasicWeightStore<double>;

template <typename T>
void check_shapes(const NetworkTopology& topo, const BasicWeightStore<T>& w) {
    const auto ref = BasicWeightStore<T>::zeros(topo);
    if (!ref.same_shape(w)) throw ShapeMismatch("weight store does not match topology");
}

}  // namespace reflex::net
