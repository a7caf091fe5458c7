#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/net/forward.hpp"

namespace reflex::net {

template <typename T>
struct BasicTrajectoryStep {
    BasicStepInput<T> input;
    std::optional<int> target;  // next character, scored by cross-entropy
    Vec<T> observed;            // next perception, scored against the decoder (empty: unscored)
    BasicLayerVectors<T> bias;  // effective bias for this step (empty: base bias)
};
using TrajectoryStep = BasicTrajectoryStep<double>;

struct LossWeights {
    double cross_entropy = 1.0;
    double prediction = 1.0;
};

struct BpttOptions {
    LossWeights loss;
    double clip_norm = 0.0;  // global gradient-norm clip; 0 disables
};

template <typename T>
T step_loss(const NetworkTopology& topo, const BasicTrajectoryStep<T>& step,
            const BasicStepOutput<T>& out, const LossWeights& lw) {
    T loss = T(0);
    if (step.target) {
        // log-softmax straight from the logits for accuracy.
        const T mx = out.char_logits.maxCoeff();
        const T lse = mx + std::log((out.char_logits.array() - mx).exp().sum());
        loss += T(lw.cross_entropy) * (lse - out.char_logits[*step.target]);
    }
    if (topo.decoder_layers > 0 && step.observed.size() > 0)
        loss += T(lw.prediction) * (out.predicted_perception - step.observed).squaredNorm() / T(topo.p);
    return loss;
}

// Summed loss over a trajectory, starting from `initial`. Generic over the
// scalar so finite differences can be taken in extended precision.
template <typename T>
T trajectory_loss(const NetworkTopology& topo, const BasicWeightStore<T>& w,
                  const BasicNetworkState<T>& initial,
                  std::span<const BasicTrajectoryStep<T>> traj, const LossWeights& lw = {}) {
    BasicNetworkState<T> state = initial;
    BasicNetworkState<T> next;
    BasicStepOutput<T> out;
    T total = T(0);
    for (const auto& step : traj) {
        detail::forward_into(topo, state, w, step.input, step.bias, next, out);
        total += step_loss(topo, step, out, lw);
        std::swap(state, next);
    }
    return total;
}

struct GradientResult {
    double loss = 0.0;
    double cross_entropy = 0.0;
    int scored_chars = 0;
    WeightStore grad;
    NetworkState final_state;
};

// Backward pass over a window whose forward activations are already known:
// states[t] is the state before step t (states.size() == traj.size() + 1)
// and outs[t] the output of step t.
inline WeightStore backward(const NetworkTopology& topo, const WeightStore& w, std::span<const TrajectoryStep> traj,
                            std::span<const NetworkState> states, std::span<const StepOutput> outs,
                            const LossWeights& lw = {}) {
    const int L = topo.last_layer();
    const int J = topo.j_max;
    const int p = topo.p;
    const int rw = topo.recurrent_width();
    const std::size_t T = traj.size();
    if (states.size() != T + 1 || outs.size() != T) throw ShapeMismatch("backward: cache length mismatch");

    WeightStore g = WeightStore::zeros(topo);
    Vector d_top_future = Vector::Zero(topo.top_width());
    std::vector<Vector> dz(static_cast<std::size_t>(L + 1));
    Vector dlogits, dx, dzj;

    for (std::size_t ti = T; ti-- > 0;) {
        const auto& st = states[ti + 1];
        const auto& out = outs[ti];
        const auto& step = traj[ti];
        const Vector& top = st.S[static_cast<std::size_t>(J)];

        dx = d_top_future;

        if (step.target) {
            dlogits = out.char_dist;
            dlogits[*step.target] -= 1.0;
            dlogits *= lw.cross_entropy;
            g.char_head.noalias() += dlogits * top.transpose();
            g.char_bias += dlogits;
            dx.noalias() += w.char_head.transpose() * dlogits;
        }

        if (topo.decoder_layers > 0 && step.observed.size() > 0) {
            const Vector& pred = st.S[static_cast<std::size_t>(L)];
            const Vector dpred = (2.0 * lw.prediction / p) * (pred - step.observed);
            dz[static_cast<std::size_t>(L)] = (dpred.array() * pred.array() * (1.0 - pred.array())).matrix();
            for (int j = L; j > J; --j) {
                const auto& below = st.S[static_cast<std::size_t>(j - 1)];
                const auto& dzl = dz[static_cast<std::size_t>(j)];
                g.W[static_cast<std::size_t>(j - 1)].noalias() += dzl * below.transpose();
                g.bias[static_cast<std::size_t>(j)] += dzl;
                Vector dback = w.W[static_cast<std::size_t>(j - 1)].transpose() * dzl;
                if (j - 1 > J)
                    dz[static_cast<std::size_t>(j - 1)] = (dback.array() * (1.0 - below.array().square())).matrix();
                else
                    dx += dback;
            }
        }

        // Encoder, from the top layer down to layer 1.
        for (int j = J; j >= 1; --j) {
            const auto& xj = st.S[static_cast<std::size_t>(j)];
            const auto& below = st.S[static_cast<std::size_t>(j - 1)];
            dzj = (dx.array() * (1.0 - xj.array().square())).matrix();
            auto& gW = g.W[static_cast<std::size_t>(j - 1)];
            g.bias[static_cast<std::size_t>(j)] += dzj;
            const auto& Wj = w.W[static_cast<std::size_t>(j - 1)];
            if (j == 1) {
                for (int i = 0; i < p; ++i)
                    if (below[i] != 0.0) gW.col(i) += dzj * below[i];
                const int rest = topo.entry_width() - p;
                gW.rightCols(rest).noalias() += dzj * below.tail(rest).transpose();
                // Only the recurrent slice of the entry layer leads further back.
                dx.noalias() = Wj.middleCols(p, rw).transpose() * dzj;
            } else {
                gW.noalias() += dzj * below.transpose();
                dx.noalias() = Wj.transpose() * dzj;
            }
        }

        // dx is now dL/d(R * S_top) for the previous step's top layer.
        if (!step.input.injected_recurrent) {
            const Vector& prev_top = states[ti].S[static_cast<std::size_t>(J)];
            g.R.noalias() += dx * prev_top.transpose();
            d_top_future.noalias() = w.R.transpose() * dx;
        } else {
            d_top_future.setZero();
        }
    }
    return g;
}

// Full backpropagation through the given window.
inline GradientResult compute_gradients(const NetworkTopology& topo, const WeightStore& w,
                                        const NetworkState& initial, std::span<const TrajectoryStep> traj,
                                        const LossWeights& lw = {}) {
    const std::size_t T = traj.size();
    GradientResult res;
    std::vector<NetworkState> states(T + 1);
    std::vector<StepOutput> outs(T);
    states[0] = initial;
    for (std::size_t t = 0; t < T; ++t) {
        detail::forward_into(topo, states[t], w, traj[t].input, traj[t].bias, states[t + 1], outs[t]);
        res.loss += step_loss(topo, traj[t], outs[t], lw);
        if (traj[t].target) {
            ++res.scored_chars;
            res.cross_entropy += step_loss(topo, traj[t], outs[t], LossWeights{1.0, 0.0});
        }
    }
    res.grad = backward(topo, w, traj, states, outs, lw);
    res.final_state = std::move(states[T]);
    return res;
}

// Applies one plain gradient-descent step (with optional global-norm clip).
inline void apply_gradient(WeightStore& w, WeightStore& grad, double learning_rate, double clip_norm,
                           const std::string& where) {
    if (!grad.all_finite()) throw NonFiniteGradient("non-finite gradient " + where);
    if (clip_norm > 0.0) {
        const double norm = std::sqrt(grad.squared_norm());
        if (norm > clip_norm) grad.scale(clip_norm / norm);
    }
    if (learning_rate != 0.0) w.axpy(-learning_rate, grad);
    if (!w.all_finite()) throw NonFiniteGradient("weights became non-finite " + where);
}

struct BpttResult {
    WeightStore weights;
    NetworkState state;
    double loss = 0.0;
    double cross_entropy = 0.0;
    int scored_chars = 0;
    int updates = 0;
};

// Truncated BPTT with plain gradient descent. The trajectory is cut into
// consecutive windows of `horizon` steps; each window is backpropagated in
// full and applied before the next one runs from the carried state.
inline BpttResult bptt_update(const NetworkTopology& topo, const WeightStore& weights,
                              const NetworkState& initial, std::span<const TrajectoryStep> traj,
                              int horizon, double learning_rate, const BpttOptions& opt = {}) {
    if (horizon < 1) throw ConfigError("bptt horizon must be >= 1");
    if (traj.empty()) throw ConfigError("bptt trajectory is empty");
    check_shapes(topo, weights);

    BpttResult res{weights, initial};
    for (std::size_t start = 0; start < traj.size(); start += static_cast<std::size_t>(horizon)) {
        const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(horizon), traj.size() - start);
        auto gr = compute_gradients(topo, res.weights, res.state, traj.subspan(start, len), opt.loss);
        if (!std::isfinite(gr.loss)) throw NonFiniteGradient("non-finite loss at step " + std::to_string(start));
        apply_gradient(res.weights, gr.grad, learning_rate, opt.clip_norm, "at step " + std::to_string(start));
        res.state = std::move(gr.final_state);
        res.loss += gr.loss;
        res.cross_entropy += gr.cross_entropy;
        res.scored_chars += gr.scored_chars;
        ++res.updates;
    }
    return res;
}

}  // namespace reflex::net
