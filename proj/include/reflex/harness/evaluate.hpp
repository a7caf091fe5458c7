#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reflex/deliberation/dual_system.hpp"
#include "reflex/emotion/emotion.hpp"
#include "reflex/eval/reflexivity.hpp"
#include "reflex/evolve/init_weights.hpp"
#include "reflex/knowledge/author.hpp"
#include "reflex/knowledge/confidence.hpp"
#include "reflex/knowledge/needs.hpp"
#include "reflex/knowledge/store.hpp"
#include "reflex/memory/corpus_cursor.hpp"
#include "reflex/memory/register_stack.hpp"
#include "reflex/memory/spatial_tree.hpp"
#include "reflex/memory/time_interval.hpp"
#include "reflex/net/checkpoint.hpp"
#include "reflex/net/forward.hpp"

namespace reflex::harness {

// Passed / attempted checks of one property suite.
struct SuiteScore {
    int passed = 0;
    int total = 0;

    void check(bool ok) {
        ++total;
        passed += ok ? 1 : 0;
    }
    template <typename F>
    void check_nothrow(F&& f) {
        try {
            check(f());
        } catch (const std::exception&) {
            check(false);
        }
    }
    template <typename E, typename F>
    void check_throws(F&& f) {
        try {
            f();
            check(false);
        } catch (const E&) {
            check(true);
        } catch (const std::exception&) {
            check(false);
        }
    }
    double rate() const { return total == 0 ? 0.0 : static_cast<double>(passed) / total; }
};

// Perturbing the top layer at step t must change layer 0 at t + 1, with
// identical external input. Each seed is one trial.
inline SuiteScore reflexivity_suite(const net::NetworkTopology& topo, const net::WeightStore& w, int trials = 100) {
    SuiteScore s;
    const Vector emotions = Vector::Zero(topo.emotion_count);
    for (int k = 0; k < trials; ++k) {
        SplitMix rng(static_cast<std::uint64_t>(k) + 1);
        auto input = [&](std::uint8_t b) {
            net::StepInput in;
            in.perception = net::encode_char(b, 1.0, topo.p);
            in.emotions = emotions;
            return in;
        };
        auto state = net::NetworkState::zeros(topo);
        const int warm = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < warm; ++i)
            state = net::forward_step(topo, state, w, input(static_cast<std::uint8_t>(rng.below(256)))).first;
        auto perturbed = state;
        for (Eigen::Index i = 0; i < perturbed.top(topo).size(); ++i) perturbed.top(topo)[i] += rng.uniform(-0.5, 0.5);
        const auto in = input(static_cast<std::uint8_t>(rng.below(256)));
        const auto a = net::forward_step(topo, state, w, in).first;
        const auto b = net::forward_step(topo, perturbed, w, in).first;
        s.check((a.S[0] - b.S[0]).cwiseAbs().maxCoeff() > 0.0);
    }
    return s;
}

// Emission delay equals n + j_max over a few pipelines with an open gate.
inline SuiteScore deliberation_suite(const net::NetworkTopology& topo, const net::WeightStore& w) {
    SuiteScore s;
    const Vector emotions = Vector::Zero(topo.emotion_count);
    for (int n = 0; n < 3; ++n) {
        deliberation::DualConfig cfg;
        cfg.n_decision = n;
        cfg.pinned_verdict = deliberation::Verdict::Output;
        auto sys = deliberation::DualSystem::create(topo, w, topo, true, 7, cfg);
        SplitMix rng(static_cast<std::uint64_t>(n) + 11);
        for (int i = 0; i < 24; ++i) sys.deliberate_step(static_cast<std::uint8_t>(rng.below(256)), emotions);
        bool ok = !sys.emissions().empty();
        for (const auto& e : sys.emissions()) ok = ok && e.emitted_at - e.proposed_at == sys.m();
        s.check(ok);
    }
    // A pinned suppress verdict emits nothing.
    deliberation::DualConfig cfg;
    cfg.pinned_verdict = deliberation::Verdict::Suppress;
    auto sys = deliberation::DualSystem::create(topo, w, topo, true, 7, cfg);
    for (int i = 0; i < 12; ++i) sys.deliberate_step('a', emotions);
    s.check(sys.emissions().empty());
    return s;
}

inline SuiteScore emotions_suite(const emotion::EmotionConfig& cfg) {
    SuiteScore s;
    const auto n = static_cast<Eigen::Index>(cfg.count());
    auto e = emotion::EmotionVector::zeros(cfg.labels);
    SplitMix rng(3);
    bool bounded = true;
    for (int i = 0; i < 50; ++i) {
        Vector raw(n);
        for (Eigen::Index k = 0; k < n; ++k) raw[k] = rng.uniform(-3.0, 3.0);
        e = emotion::update_emotions(e, raw, cfg);
        bounded = bounded && e.values.allFinite() && e.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-12;
    }
    s.check(bounded);
    auto pinned = emotion::inject(e, 0, 0.75);
    pinned = emotion::update_emotions(pinned, Vector::Constant(n, -1.0), cfg);
    s.check(pinned.values[0] == 0.75);
    auto cleared = emotion::clear(pinned, 0);
    cleared = emotion::update_emotions(cleared, Vector::Constant(n, -1.0), cfg);
    s.check(cleared.values[0] != 0.75);
    s.check_throws<IndexError>([&] { emotion::inject(e, cfg.count(), 1.0); });
    return s;
}

inline SuiteScore cognitive_areas_suite(const net::NetworkTopology& topo, const net::WeightStore& w, std::size_t emotion_count) {
    SuiteScore s;
    const auto n = static_cast<Eigen::Index>(emotion_count);
    emotion::CognitiveArea a{"a", {{1, 0}, {1, 1}}, Vector::Ones(n)};
    emotion::CognitiveArea b{"b", {{1, 1}}, Vector::Ones(n)};
    const Vector E = Vector::Constant(n, 0.1);
    s.check_nothrow([&] {
        auto bias = emotion::effective_bias(w.bias, {a}, E);
        return std::abs(bias[1][0] - w.bias[1][0] - 0.1 * static_cast<double>(n)) < 1e-12 &&
               (topo.h(1) < 3 || bias[1][2] == w.bias[1][2]);
    });
    s.check_throws<OverlapError>([&] { emotion::effective_bias(w.bias, {a, b}, E); });
    s.check_nothrow([&] { return emotion::effective_bias(w.bias, {a}, Vector::Zero(n)) == w.bias; });
    return s;
}

inline SuiteScore goals_suite() {
    SuiteScore s;
    knowledge::NeedsState st;
    st.threshold = 0.8;
    st.satisfaction = {0.9, 0.4, 0.7};
    const auto g = knowledge::derive_goals(st);
    s.check(g.size() == 2 && g[0].need == knowledge::Need::Social && g[1].need == knowledge::Need::Epistemic);
    st.satisfaction = {1.0, 1.0, 1.0};
    s.check(knowledge::derive_goals(st).empty());
    st.threshold = 1.0;
    st.satisfaction = {0.0, 0.0, 0.0};
    const auto t = knowledge::derive_goals(st);
    s.check(t.size() == 3 && t[0].need == knowledge::Need::Existence && t[2].need == knowledge::Need::Epistemic);
    return s;
}

inline SuiteScore attention_suite() {
    SuiteScore s;
    auto corpus = std::make_shared<const memory::Corpus>(memory::Corpus::from_documents({{"d/a.txt", "ab"}, {"d/e/b.txt", "xyz"}}));
    memory::CorpusCursor c(corpus);
    s.check(!c.exec(memory::CursorAction::Left) && c.boundary_flag() && c.offset() == 0);
    c.exec(memory::CursorAction::Right);
    s.check(c.exec(memory::CursorAction::Read) == std::optional<std::uint8_t>('b') && !c.boundary_flag());
    c.exec(memory::CursorAction::NextDoc);
    s.check(c.read() == std::optional<std::uint8_t>('x'));
    c.exec(memory::CursorAction::NextDoc);
    s.check(c.boundary_flag());
    SplitMix rng(5);
    bool valid = true;
    for (int i = 0; i < 200; ++i) {
        c.exec(static_cast<memory::CursorAction>(rng.below(7)));
        valid = valid && c.document() < corpus->docs.size() && c.offset() <= corpus->docs[c.document()].bytes.size();
    }
    s.check(valid);
    return s;
}

inline SuiteScore perception_suite(const net::NetworkTopology& topo, const net::WeightStore& w) {
    SuiteScore s;
    const Vector x = net::encode_char('q', 1.0, topo.p);
    s.check(net::surprise(x, x) == 0.0);
    net::StepInput in;
    in.perception = x;
    in.emotions = Vector::Zero(topo.emotion_count);
    const auto out = net::forward_step(topo, net::NetworkState::zeros(topo), w, in).second;
    const Vector est = net::perception_estimate(out);
    const double sur = net::surprise(est, x);
    s.check(est.size() == topo.p && sur >= 0.0 && sur <= 1.0);
    s.check(std::abs(net::encode_char('q', 0.0, topo.p).sum()) == 0.0);
    return s;
}

inline SuiteScore self_other_suite() {
    SuiteScore s;
    knowledge::AuthorRegistry r;
    s.check(r.find(knowledge::kSelfAuthor) != nullptr);
    s.check(r.get("alice").obs_count == 0 && r.get("alice").mean_V == 0.5 && r.get("alice").C == 0.0);
    r.observe("alice", 0.7);
    s.check(r.get("alice").obs_count == 1 && std::abs(r.get("alice").C - 0.5) < 1e-15);
    r.observe("alice", 0.3);
    s.check(std::abs(r.get("alice").mean_V - 0.5) < 1e-15);
    return s;
}

inline SuiteScore spatial_suite() {
    SuiteScore s;
    memory::SpatialTree t;
    t.assert_inclusion("a", "b");
    t.assert_inclusion("b", "c");
    s.check(t.contains("c", "a"));
    s.check(t.neighborhood("b", 1) == std::set<std::string>{"a", "c"});
    s.check_throws<CycleError>([&] { t.assert_inclusion("c", "a"); });
    s.check_throws<MultiParentError>([&] { t.assert_inclusion("a", "d"); });
    s.check(t.is_forest());
    return s;
}

inline SuiteScore temporal_suite() {
    SuiteScore s;
    using memory::IntervalRelation;
    using memory::TimeInterval;
    auto iv = [](memory::Rational a, memory::Rational d, std::string scale = "second") {
        return TimeInterval{std::move(scale), a, d, memory::TimeKind::EventTime};
    };
    s.check(memory::interval_relation(iv(0, 10), iv(2, 1)) == IntervalRelation::Includes);
    s.check(memory::interval_relation(iv(0, 1), iv(2, 1)) == IntervalRelation::Precedes);
    const auto event = TimeInterval{"year", -memory::Rational(13'800'000'000LL), 0, memory::TimeKind::EventTime};
    const auto recorded = TimeInterval{"year", 2015, memory::Rational(1, 12), memory::TimeKind::RecordingTime};
    s.check(memory::interval_relation(event, recorded) == IntervalRelation::Precedes);
    SplitMix rng(9);
    bool converse = true;
    for (int i = 0; i < 200; ++i) {
        const auto x = iv(static_cast<long long>(rng.below(20)), static_cast<long long>(rng.below(6)));
        const auto y = iv(static_cast<long long>(rng.below(20)), static_cast<long long>(rng.below(6)));
        converse = converse && memory::interval_relation(y, x) == memory::converse(memory::interval_relation(x, y));
    }
    s.check(converse);
    s.check_throws<UnknownScale>([&] { memory::interval_relation(iv(0, 1, "fortnight"), iv(0, 1)); });
    return s;
}

inline SuiteScore confidence_suite() {
    SuiteScore s;
    const knowledge::ConfidenceTriple a{0.9, 0.1, 0.7}, one{1, 1, 1};
    const auto c = knowledge::combine_confidence(a, one);
    s.check(std::abs(c.C - 0.9) < 1e-15 && c.X == 0.1 && std::abs(c.V - 0.85) < 1e-15);
    s.check(knowledge::combine_confidence(one, one) == one);
    s.check(knowledge::combine_confidence(a, c) == knowledge::combine_confidence(c, a));
    s.check(knowledge::scalar_confidence(a) == 0.9);
    return s;
}

inline SuiteScore non_monotony_suite(const net::WeightStore& w) {
    SuiteScore s;
    knowledge::KnowledgeStore st;
    s.check(st.query(knowledge::make_pattern({"penguin", "can", "fly"})).verdict == knowledge::Verdict::Unknown);
    knowledge::SentenceTuple t;
    t.terms = {"penguin", "can", "fly"};
    t.confidence.C = 0.2;
    st.assert_tuple(t);
    s.check(st.query(knowledge::make_pattern({"penguin", "can", "fly"})).verdict == knowledge::Verdict::True);
    t.polarity = knowledge::Polarity::Negated;
    t.confidence.C = 0.9;
    st.assert_tuple(t);
    s.check(st.query(knowledge::make_pattern({"penguin", "can", "fly"})).verdict == knowledge::Verdict::False);
    s.check(w.has_negative());
    return s;
}

inline SuiteScore external_interfaces_suite() {
    SuiteScore s;
    memory::RegisterStack st(2, 8);
    st.push("abc");
    s.check(st.pop() == std::string("abc\0\0\0\0\0", 8));
    s.check_throws<Underflow>([&] { st.pop(); });
    st.push("x");
    st.push("y");
    s.check_throws<Overflow>([&] { st.push("z"); });
    s.check(st.size() == 2);
    s.check_throws<PayloadTooWide>([&] { memory::RegisterStack(1, 2).push("abc"); });
    return s;
}

struct EvaluationOptions {
    bool zero_recurrence = false;
    int reflexivity_trials = 100;
    eval::IndexWeights weights = eval::IndexWeights::defaults();
    eval::FeatureFlags flags{true, false, false, true};
};

struct EvaluationReport {
    eval::CapabilityProfile profile;
    eval::IndexResult index;
    double cardinality = 0.0;
    eval::Classification classification;
    std::string text;
};

// Runs each module's property suite against the loaded network and turns the
// pass rates into capability coefficients. Dimensions this artifact does not
// implement (inference blending, multimedia, embodiment) score 0.
inline EvaluationReport evaluate(const net::NetworkTopology& topo, net::WeightStore w,
                                 const emotion::EmotionConfig& emotions, const EvaluationOptions& opt = {}) {
    if (opt.zero_recurrence) w.R.setZero();
    using eval::Dimension;
    EvaluationReport r;
    auto& p = r.profile;
    p[Dimension::reflexivity] = reflexivity_suite(topo, w, opt.reflexivity_trials).rate();
    p[Dimension::deliberation] = deliberation_suite(topo, w).rate();
    p[Dimension::emotions] = emotions_suite(emotions).rate();
    p[Dimension::cognitive_areas] = cognitive_areas_suite(topo, w, emotions.count()).rate();
    p[Dimension::inference_blending] = 0.0;
    p[Dimension::goals] = goals_suite().rate();
    p[Dimension::attention] = attention_suite().rate();
    p[Dimension::perception_estimation] = perception_suite(topo, w).rate();
    p[Dimension::self_other_models] = self_other_suite().rate();
    p[Dimension::spatial] = spatial_suite().rate();
    p[Dimension::temporal] = temporal_suite().rate();
    p[Dimension::confidence] = confidence_suite().rate();
    p[Dimension::non_monotony] = non_monotony_suite(w).rate();
    p[Dimension::multimedia] = 0.0;
    p[Dimension::embodiment_actions] = 0.0;
    p[Dimension::external_interfaces] = external_interfaces_suite().rate();
    r.index = eval::reflexivity_index(p, opt.weights);
    r.cardinality = eval::cardinality_index(topo);
    r.classification = eval::classify(p, opt.flags, opt.weights.epsilon);
    r.text = eval::format_report(p, opt.weights, r.index, r.cardinality, r.classification);
    return r;
}

}  // namespace reflex::harness
