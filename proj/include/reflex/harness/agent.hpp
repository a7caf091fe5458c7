#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflex/deliberation/dual_system.hpp"
#include "reflex/emotion/emotion.hpp"
#include "reflex/harness/config.hpp"
#include "reflex/net/checkpoint.hpp"
#include "reflex/net/sampling.hpp"
#include "reflex/net/unit.hpp"

namespace reflex::harness {

// Emotion state of one running unit: read from the previous network state,
// with the surprise channel fed by the last prediction error.
class EmotionTracker {
public:
    explicit EmotionTracker(emotion::EmotionConfig cfg)
        : cfg_(std::move(cfg)), e_(emotion::EmotionVector::zeros(cfg_.labels)) {}

    const Vector& advance(const net::NetworkTopology& topo, const net::NetworkState& prev) {
        Vector raw = emotion::extract_raw(topo, prev, cfg_);
        if (cfg_.surprise_index) raw[static_cast<Eigen::Index>(*cfg_.surprise_index)] = last_surprise_;
        e_ = emotion::update_emotions(e_, raw, cfg_);
        return e_.values;
    }

    void observe(const net::StepOutput& out, std::uint8_t actual, int p) {
        last_surprise_ = net::surprise(net::perception_estimate(out), net::encode_char(actual, 1.0, p));
    }

    void inject(const std::string& name, double v) {
        const auto i = e_.index_of(name);
        if (!i) throw ConfigError("unknown emotion '" + name + "'");
        e_ = emotion::inject(e_, *i, v);
    }
    void clear(const std::string& name) {
        const auto i = e_.index_of(name);
        if (!i) throw ConfigError("unknown emotion '" + name + "'");
        e_ = emotion::clear(e_, *i);
    }

    const emotion::EmotionVector& vector() const { return e_; }
    const emotion::EmotionConfig& config() const { return cfg_; }
    double last_surprise() const { return last_surprise_; }

private:
    emotion::EmotionConfig cfg_;
    emotion::EmotionVector e_;
    double last_surprise_ = 0.0;
};

// One step of a unit under emotions and cognitive-area bias.
inline const net::StepOutput& agent_step(net::ReflexiveUnit& u, EmotionTracker& et, std::uint8_t byte,
                                         double confidence, const std::vector<emotion::CognitiveArea>& areas) {
    const Vector& e = et.advance(u.topo, u.state);
    const net::LayerVectors bias = areas.empty() ? net::LayerVectors{} : emotion::effective_bias(u.weights.bias, areas, e);
    return u.step(u.input_for(byte, confidence, e), bias);
}

// Autoregressive generation from unit A alone: the prime is fed first, then
// each sampled byte becomes the next input.
inline std::string sample_text(const net::NetworkTopology& topo, const net::WeightStore& w, const TrainConfig& tc,
                               const SampleConfig& sc, std::uint64_t seed) {
    if (!(sc.temperature > 0.0)) throw ConfigError("temperature must be > 0");
    std::string out;
    if (sc.length <= 0) return out;
    net::ReflexiveUnit u(topo, w);
    EmotionTracker et(tc.emotions);
    SplitMix rng(seed);
    const std::string prime = sc.prime.empty() ? std::string(1, '\0') : sc.prime;
    for (std::size_t i = 0; i < prime.size(); ++i) {
        const auto& o = agent_step(u, et, static_cast<std::uint8_t>(prime[i]), 1.0, tc.areas);
        if (i + 1 < prime.size()) et.observe(o, static_cast<std::uint8_t>(prime[i + 1]), topo.p);
    }
    while (true) {
        const auto c = static_cast<std::uint8_t>(net::sample_char(u.last.char_logits, sc.temperature, rng));
        et.observe(u.last, c, topo.p);
        out += static_cast<char>(c);
        if (static_cast<long long>(out.size()) >= sc.length) break;
        agent_step(u, et, c, 1.0, tc.areas);
    }
    return out;
}

// A/B pipeline from a checkpoint: unit 0 is A, unit 1 (if present) is B and
// the extra blocks hold the decision head.
inline deliberation::DualSystem make_dual(const net::Checkpoint& ck, const DeliberationSettings& ds, std::uint64_t seed) {
    if (ck.units.empty()) throw BadCheckpoint("checkpoint holds no unit");
    auto sys = deliberation::DualSystem::create(ck.topology, ck.units[0], ck.topology, ds.b_identical_init, seed, ds.dual);
    if (ck.units.size() > 1) sys.unit_b().weights = ck.units[1];
    if (!ck.extra.empty()) {
        auto head = deliberation::DecisionHead::from_blocks(ck.extra);
        if (head.W1.cols() != sys.unit_b().topo.top_width() || head.W2.rows() != ds.dual.gate_mode.width())
            throw BadCheckpoint("decision head does not fit unit B / gate mode");
        sys.head() = std::move(head);
    }
    return sys;
}

struct GatedSample {
    std::string text;
    std::vector<deliberation::TraceRecord> trace;
};

// Generation through the gate: A is fed its previous proposal and only bytes
// released by B are kept. Gives up after `length * 8 + m` steps past the
// prime so an always-suppressing gate still terminates.
inline GatedSample sample_gated(deliberation::DualSystem sys, const TrainConfig& tc, const SampleConfig& sc) {
    if (!(sc.temperature > 0.0)) throw ConfigError("temperature must be > 0");
    GatedSample r;
    if (sc.length <= 0) return r;
    sys.config().proposal_temperature = sc.temperature;
    const auto& topo = sys.unit_a().topo;
    EmotionTracker et(tc.emotions);
    const std::string prime = sc.prime.empty() ? std::string(1, '\0') : sc.prime;
    const long long first_generated = static_cast<long long>(prime.size()) - 1;

    auto tick = [&](std::uint8_t byte) {
        const Vector e = et.advance(topo, sys.unit_a().state);
        auto rec = sys.deliberate_step(byte, e);
        et.observe(sys.unit_a().last, rec.proposal, topo.p);
        r.trace.push_back(rec);
        return rec.proposal;
    };
    auto collect = [&] {
        r.text.clear();
        for (const auto& em : sys.emissions())
            if (em.proposed_at >= first_generated && static_cast<long long>(r.text.size()) < sc.length)
                r.text += static_cast<char>(em.byte);
    };

    std::uint8_t next = 0;
    for (char ch : prime) next = tick(static_cast<std::uint8_t>(ch));
    const long long budget = sc.length * 8 + sys.m();
    for (long long i = 0; i < budget; ++i) {
        collect();
        if (static_cast<long long>(r.text.size()) >= sc.length) break;
        next = tick(next);
    }
    collect();
    return r;
}

}  // namespace reflex::harness
