#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "reflex/net/bptt.hpp"

namespace reflex::net {

namespace detail {

template <typename T>
std::vector<BasicTrajectoryStep<T>> cast_trajectory(std::span<const TrajectoryStep> traj) {
    std::vector<BasicTrajectoryStep<T>> out;
    out.reserve(traj.size());
    for (const auto& s : traj) {
        BasicTrajectoryStep<T> c;
        c.input.perception = s.input.perception.template cast<T>();
        c.input.emotions = s.input.emotions.template cast<T>();
        if (s.input.injected_recurrent) c.input.injected_recurrent = s.input.injected_recurrent->template cast<T>();
        c.target = s.target;
        c.observed = s.observed.template cast<T>();
        for (const auto& b : s.bias) c.bias.push_back(b.template cast<T>());
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace detail

// Central-difference gradient of trajectory_loss, evaluated in long double so
// rounding noise stays far below the tolerance of the comparison.
inline WeightStore numeric_gradient(const NetworkTopology& topo, const WeightStore& w,
                                    const NetworkState& initial, std::span<const TrajectoryStep> traj,
                                    double epsilon, const LossWeights& lw = {}) {
    using X = long double;
    auto wx = w.cast<X>();
    const auto init = initial.cast<X>();
    const auto tx = detail::cast_trajectory<X>(traj);
    const std::span<const BasicTrajectoryStep<X>> span(tx);

    WeightStore g = WeightStore::zeros(topo);
    auto gblocks = g.blocks();
    auto wblocks = wx.blocks();
    for (std::size_t b = 0; b < wblocks.size(); ++b) {
        auto& wb = *wblocks[b];
        for (Eigen::Index i = 0; i < wb.size(); ++i) {
            const X orig = wb.data()[i];
            wb.data()[i] = orig + X(epsilon);
            const X up = trajectory_loss<X>(topo, wx, init, span, lw);
            wb.data()[i] = orig - X(epsilon);
            const X down = trajectory_loss<X>(topo, wx, init, span, lw);
            wb.data()[i] = orig;
            gblocks[b]->data()[i] = static_cast<double>((up - down) / (X(2) * X(epsilon)));
        }
    }
    return g;
}

// max_i |a_i - n_i| / max(1e-8, |a_i| + |n_i|)
inline double max_relative_error(const WeightStore& analytic, const WeightStore& numeric) {
    if (!analytic.same_shape(numeric)) throw ShapeMismatch("gradient stores differ in shape");
    double worst = 0.0;
    auto a = analytic.blocks();
    auto n = numeric.blocks();
    for (std::size_t b = 0; b < a.size(); ++b)
        for (Eigen::Index i = 0; i < a[b]->size(); ++i) {
            const double av = a[b]->data()[i];
            const double nv = n[b]->data()[i];
            worst = std::max(worst, std::abs(av - nv) / std::max(1e-8, std::abs(av) + std::abs(nv)));
        }
    return worst;
}

inline constexpr std::size_t kGradientCheckMaxParams = 10000;

inline double gradient_check(const NetworkTopology& topo, const WeightStore& w, const NetworkState& initial,
                             std::span<const TrajectoryStep> traj, double epsilon,
                             const LossWeights& lw = {}) {
    if (w.parameter_count() > kGradientCheckMaxParams)
        throw ConfigError("gradient_check limited to " + std::to_string(kGradientCheckMaxParams) + " parameters");
    if (epsilon < 1e-7 || epsilon > 1e-3) throw ConfigError("gradient_check epsilon outside [1e-7, 1e-3]");
    const auto analytic = compute_gradients(topo, w, initial, traj, lw).grad;
    const auto numeric = numeric_gradient(topo, w, initial, traj, epsilon, lw);
    return max_relative_error(analytic, numeric);
}

}  // namespace reflex::net
