#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "reflex/evolve/evolve.hpp"
#include "reflex/evolve/init_weights.hpp"

using namespace reflex;
using namespace reflex::evolve;

namespace {

MetaParams near_cap(int hidden) {
    MetaParams m;
    m.topology = reflex::testing::tiny(1, hidden, 0, 2, 2, 1, 0);
    return m;
}

}  // namespace

TEST(InitWeights, BoundedByFanIn) {
    auto t = reflex::testing::tiny(2, 7, 0, 100, 3, 2, 1);
    t.hidden = {7, 5};
    const auto w = init_weights(t, 3);
    const double r0 = 1.0 / std::sqrt(static_cast<double>(t.entry_width()));
    EXPECT_LE(w.W[0].cwiseAbs().maxCoeff(), r0);
    EXPECT_LE(w.W[1].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(7.0));
    EXPECT_LE(w.char_head.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
    for (const auto& b : w.bias) EXPECT_TRUE(b.size() == 0 || b.isZero(0.0));
    EXPECT_TRUE(w.char_bias.isZero(0.0));
    EXPECT_TRUE(w.has_negative());
}

TEST(InitWeights, FanInHundred) {
    auto t = reflex::testing::tiny(1, 50, 0, 90, 8, 2, 0);
    ASSERT_EQ(t.entry_width(), 100);
    const auto w = init_weights(t, 11);
    EXPECT_LE(w.W[0].cwiseAbs().maxCoeff(), 0.1);
    EXPECT_GT(w.W[0].cwiseAbs().maxCoeff(), 0.09);
}

TEST(InitWeights, DeterministicPerSeed) {
    const auto t = reflex::testing::tiny(2, 6);
    EXPECT_TRUE(init_weights(t, 1) == init_weights(t, 1));
    EXPECT_FALSE(init_weights(t, 1) == init_weights(t, 2));
}

TEST(InitWeights, DrawIsUnitIntervalAndPositionKeyed) {
    EXPECT_EQ(init_draw(1, 2, 3, 4), init_draw(1, 2, 3, 4));
    EXPECT_NE(init_draw(1, 2, 3, 4), init_draw(1, 2, 4, 3));
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double d = init_draw(9, 0, i, i * 7);
        ASSERT_GE(d, 0.0);
        ASSERT_LT(d, 1.0);
    }
}

TEST(SafetyCap, StrictInequality) {
    auto m = near_cap(29995);
    EXPECT_EQ(m.total_neurons(), 30000);
    EXPECT_NO_THROW(validate_cap(m, {}));
    m = near_cap(99995);
    EXPECT_EQ(m.total_neurons(), 100000);
    try {
        validate_cap(m, {});
        FAIL() << "exact cap accepted";
    } catch (const SafetyCapExceeded& e) {
        EXPECT_EQ(e.count(), 100000);
        EXPECT_EQ(e.code(), "SafetyCapExceeded");
    }
    EXPECT_NO_THROW(validate_cap(near_cap(99994), {}));
}

TEST(SafetyCap, TinySystemAndBadCap) {
    MetaParams m = near_cap(1);
    EXPECT_NO_THROW(validate_cap(m, {m.total_neurons() + 1}));
    EXPECT_THROW(validate_cap(m, {0}), ConfigError);
}

TEST(SafetyCap, UnitBCounts) {
    auto m = near_cap(50000);
    EXPECT_NO_THROW(validate_cap(m, {}));
    m.dual = true;
    EXPECT_THROW(validate_cap(m, {}), SafetyCapExceeded);
}

TEST(Evolve, NoSearchReturnsInitial) {
    const auto init = near_cap(10);
    long long calls = 0;
    auto trainer = [&](const MetaParams&, const FitnessSpec&, const SafetyCap&) { return ++calls, 5LL; };
    const auto r = evolve::evolve(init, {1.0, 100}, {}, 2, 0, 1, 42, trainer);
    EXPECT_EQ(r.best.canonical(), init.canonical());
    EXPECT_EQ(r.best_fitness, 5);
    EXPECT_EQ(calls, 1);
}

TEST(Evolve, FindsRiggedLearningRate) {
    auto init = near_cap(10);
    init.learning_rate = 0.1;
    SearchSpace space;
    space.mutate_hidden = false;
    space.learning_rate_grid = {0.1, 0.5, 0.9};
    auto trainer = [](const MetaParams& p, const FitnessSpec& f, const SafetyCap&) {
        return p.learning_rate == 0.5 ? 10LL : f.max_iterations;
    };
    const auto r = evolve::evolve(init, {1.0, 1000}, {}, 2, 4, 5, 7, trainer, space);
    EXPECT_EQ(r.best.learning_rate, 0.5);
    EXPECT_EQ(r.best_fitness, 10);
    for (double lr : space.learning_rate_grid)
        EXPECT_EQ(trainer([&] { auto m = init; m.learning_rate = lr; return m; }(), {1.0, 1000}, {}) == 10, lr == 0.5);
}

TEST(Evolve, CapDominance) {
    auto init = near_cap(10);
    long long calls = 0;
    auto trainer = [&](const MetaParams&, const FitnessSpec&, const SafetyCap&) { return ++calls, 1LL; };
    const auto r = evolve::evolve(init, {1.0, 77}, {5}, 2, 4, 3, 1, trainer);
    EXPECT_EQ(calls, 0);
    EXPECT_EQ(r.trained, 0);
    for (const auto& rec : r.history) {
        EXPECT_FALSE(rec.accepted);
        EXPECT_EQ(rec.fitness, 77);
    }
}

TEST(Evolve, StraddlingCapNeverBuildsOverCap) {
    construction_log() = {};
    SearchSpace space;
    space.hidden_step = 16;
    space.learning_rate_sigma = 0.0;
    auto trainer = [](const MetaParams& p, const FitnessSpec& f, const SafetyCap& cap) {
        guarded_init(p, cap);
        return std::min<long long>(f.max_iterations, std::llabs(p.topology.hidden[0] - 99990));
    };
    const auto r = evolve::evolve(near_cap(99985), {1.0, 1000}, {}, 2, 4, 4, 3, trainer, space);
    const auto& log = construction_log();
    EXPECT_EQ(log.over_cap, 0);
    EXPECT_LT(log.max_neurons, 100000);
    EXPECT_EQ(log.constructions, r.trained);
    int refused = 0;
    for (const auto& rec : r.history) {
        refused += !rec.accepted;
        EXPECT_EQ(rec.accepted, rec.neurons < 100000);
    }
    EXPECT_GT(refused, 0);
    EXPECT_GT(r.trained, 0);
}

TEST(Evolve, ElitistAndDeterministic) {
    auto trainer = [](const MetaParams& p, const FitnessSpec& f, const SafetyCap&) {
        const double d = std::abs(std::log(p.learning_rate / 0.2)) * 100 + std::abs(p.topology.hidden[0] - 40);
        return std::min<long long>(f.max_iterations, static_cast<long long>(d));
    };
    const auto a = evolve::evolve(near_cap(10), {1.0, 500}, {}, 3, 5, 8, 99, trainer);
    const auto b = evolve::evolve(near_cap(10), {1.0, 500}, {}, 3, 5, 8, 99, trainer);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(format_record(a.history[i]), format_record(b.history[i]));
    for (std::size_t g = 1; g < a.best_per_generation.size(); ++g)
        EXPECT_LE(a.best_per_generation[g], a.best_per_generation[g - 1]);
    EXPECT_LT(a.best_fitness, a.best_per_generation.front());
}

TEST(Evolve, ArgumentValidation) {
    auto t = [](const MetaParams&, const FitnessSpec&, const SafetyCap&) { return 1LL; };
    EXPECT_THROW(evolve::evolve(near_cap(3), {1.0, 10}, {}, 0, 1, 1, 1, t), ConfigError);
    EXPECT_THROW(evolve::evolve(near_cap(3), {1.0, 0}, {}, 1, 1, 1, 1, t), ConfigError);
    SearchSpace none;
    none.mutate_hidden = false;
    none.learning_rate_sigma = 0.0;
    EXPECT_THROW(evolve::evolve(near_cap(3), {1.0, 10}, {}, 1, 2, 1, 1, t, none), ConfigError);
}

TEST(Evolve, HistoryRecordFormat) {
    const EvolutionRecord r{2, 0xabcdef, 1234, 56, true};
    EXPECT_EQ(format_record(r), "generation=2 candidate=0000000000abcdef neurons=1234 fitness=56 status=accepted");
}
