#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reflex/emotion/emotion.hpp"
#include "reflex/memory/corpus_cursor.hpp"
#include "reflex/net/bptt.hpp"

namespace reflex::harness {

// Endless byte stream over a corpus: reads in document order and starts
// over after the last document.
class CorpusStream {
public:
    explicit CorpusStream(std::shared_ptr<const memory::Corpus> corpus)
        : corpus_(std::move(corpus)), cursor_(corpus_) {
        std::size_t total = 0;
        for (const auto& d : corpus_->docs) total += d.bytes.size();
        if (total == 0) throw EmptyCorpus("corpus contains no bytes");
    }

    std::uint8_t next() {
        using memory::CursorAction;
        for (;;) {
            if (auto b = cursor_.exec(CursorAction::Read)) {
                cursor_.exec(CursorAction::Right);
                return *b;
            }
            cursor_.exec(CursorAction::NextDoc);
            if (cursor_.boundary_flag()) cursor_ = memory::CorpusCursor(corpus_);
        }
    }

    const memory::CorpusCursor& cursor() const { return cursor_; }

private:
    std::shared_ptr<const memory::Corpus> corpus_;
    memory::CorpusCursor cursor_;
};

struct LossPoint {
    long long update = 0;
    long long step = 0;
    double cross_entropy = 0.0;  // mean per scored character over the window(s)
};

struct TrainConfig {
    double learning_rate = 0.03;
    int horizon = 32;
    long long steps = 0;  // network steps (characters consumed)
    double clip_norm = 5.0;
    net::LossWeights loss;
    double input_confidence = 1.0;
    emotion::EmotionConfig emotions;
    std::vector<emotion::CognitiveArea> areas;
    int hedonic_every = 0;  // updates between hedonic reinforcements; 0 disables
    int log_every = 0;      // updates between loss-curve records; 0: every update
    std::function<bool(const LossPoint&)> stop;  // checked at every record; true ends the run
};

struct TrainResult {
    net::WeightStore weights;
    net::NetworkState state;
    emotion::EmotionVector emotions;
    std::vector<LossPoint> curve;
    long long steps = 0;
    long long updates = 0;
};

// Per-step loop: read byte -> emotions from the previous state -> effective
// bias -> forward step; every `horizon` steps the window is backpropagated
// and a gradient step is applied between steps.
class Trainer {
public:
    Trainer(net::NetworkTopology topo, net::WeightStore weights, TrainConfig cfg)
        : topo_(std::move(topo)), w_(std::move(weights)), cfg_(std::move(cfg)) {
        net::check_shapes(topo_, w_);
        cfg_.emotions.validate();
        if (cfg_.horizon < 1) throw ConfigError("horizon must be >= 1");
        if (static_cast<int>(cfg_.emotions.count()) != topo_.emotion_count)
            throw ConfigError("emotion label count differs from topology emotion_count");
        emotions_ = emotion::EmotionVector::zeros(cfg_.emotions.labels);
        states_.push_back(net::NetworkState::zeros(topo_));
    }

    // Consumes (current, next) byte pairs from `stream`; calls `on_point` for
    // each loss-curve record.
    TrainResult run(CorpusStream& stream, const std::function<void(const LossPoint&)>& on_point = {}) {
        std::uint8_t current = cfg_.steps > 0 ? stream.next() : 0;
        double window_ce = 0.0;
        int window_chars = 0;
        for (long long s = 0; s < cfg_.steps; ++s) {
            const std::uint8_t next = stream.next();
            step(current, next);
            current = next;
            if (static_cast<int>(traj_.size()) == cfg_.horizon || s + 1 == cfg_.steps) {
                const auto [ce, chars] = update(s);
                window_ce += ce;
                window_chars += chars;
                const int every = cfg_.log_every > 0 ? cfg_.log_every : 1;
                if (updates_ % every == 0 || s + 1 == cfg_.steps) {
                    LossPoint pt{updates_, s + 1, window_chars ? window_ce / window_chars : 0.0};
                    curve_.push_back(pt);
                    if (on_point) on_point(pt);
                    window_ce = 0.0;
                    window_chars = 0;
                    if (cfg_.stop && cfg_.stop(pt)) break;
                }
            }
        }
        TrainResult r;
        r.weights = w_;
        r.state = states_.back();
        r.emotions = emotions_;
        r.curve = curve_;
        r.steps = steps_;
        r.updates = updates_;
        return r;
    }

    const net::WeightStore& weights() const { return w_; }

private:
    void step(std::uint8_t current, std::uint8_t next) {
        const auto& prev = states_.back();
        Vector raw = emotion::extract_raw(topo_, prev, cfg_.emotions);
        if (cfg_.emotions.surprise_index) raw[static_cast<Eigen::Index>(*cfg_.emotions.surprise_index)] = last_surprise_;
        emotions_ = emotion::update_emotions(emotions_, raw, cfg_.emotions);

        net::TrajectoryStep ts;
        ts.input.perception = net::encode_char(current, cfg_.input_confidence, topo_.p);
        ts.input.emotions = emotions_.values;
        ts.target = next;
        const Vector observed = net::encode_char(next, 1.0, topo_.p);
        if (topo_.decoder_layers > 0) ts.observed = observed;
        if (!cfg_.areas.empty()) ts.bias = emotion::effective_bias(w_.bias, cfg_.areas, emotions_.values);

        net::NetworkState nxt;
        net::StepOutput out;
        net::detail::forward_into(topo_, prev, w_, ts.input, ts.bias, nxt, out);
        last_surprise_ = net::surprise(net::perception_estimate(out), observed);
        states_.push_back(std::move(nxt));
        outs_.push_back(std::move(out));
        traj_.push_back(std::move(ts));
        ++steps_;
    }

    std::pair<double, int> update(long long step_index) {
        double ce = 0.0;
        int chars = 0;
        for (std::size_t t = 0; t < traj_.size(); ++t) {
            const auto& lg = outs_[t].char_logits;
            const double mx = lg.maxCoeff();
            ce += mx + std::log((lg.array() - mx).exp().sum()) - lg[*traj_[t].target];
            ++chars;
        }
        auto grad = net::backward(topo_, w_, traj_, states_, outs_, cfg_.loss);
        net::apply_gradient(w_, grad, cfg_.learning_rate, cfg_.clip_norm, "at step " + std::to_string(step_index));
        ++updates_;
        if (cfg_.hedonic_every > 0 && updates_ % cfg_.hedonic_every == 0)
            w_ = emotion::hedonic_reinforce(topo_, w_, emotions_.values, cfg_.emotions);
        net::NetworkState carry = std::move(states_.back());
        states_.clear();
        states_.push_back(std::move(carry));
        outs_.clear();
        traj_.clear();
        return {ce, chars};
    }

    net::NetworkTopology topo_;
    net::WeightStore w_;
    TrainConfig cfg_;
    emotion::EmotionVector emotions_;
    double last_surprise_ = 0.0;
    std::vector<net::NetworkState> states_;
    std::vector<net::StepOutput> outs_;
    std::vector<net::TrajectoryStep> traj_;
    std::vector<LossPoint> curve_;
    long long steps_ = 0;
    long long updates_ = 0;
};

}  // namespace reflex::harness
