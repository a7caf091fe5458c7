#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "reflex/eval/reflexivity.hpp"

using namespace reflex;
using namespace reflex::eval;

TEST(ReflexivityIndex, AllOnesIsIdentity) {
    const auto r = reflexivity_index(CapabilityProfile::uniform(1.0), IndexWeights::defaults());
    EXPECT_EQ(r.index, 1.0);
    EXPECT_EQ(r.log_score, 0.0);
}

TEST(ReflexivityIndex, HalvesClosedForm) {
    const auto r = reflexivity_index(CapabilityProfile::uniform(0.5), IndexWeights::unit());
    EXPECT_NEAR(r.index, 1.52587890625e-5, 1e-15);
    EXPECT_NEAR(r.log_score, 16.0 * std::log(0.5), 1e-12);
}

TEST(ReflexivityIndex, ZeroFlooredAtEpsilon) {
    auto p = CapabilityProfile::uniform(1.0);
    p[Dimension::spatial] = 0.0;
    EXPECT_NEAR(reflexivity_index(p, IndexWeights::unit()).index, 1e-6, 1e-18);
}

TEST(ReflexivityIndex, DefaultWeights) {
    const auto w = IndexWeights::defaults();
    EXPECT_EQ(w.weight[static_cast<std::size_t>(Dimension::reflexivity)], 2.0);
    EXPECT_EQ(w.weight[static_cast<std::size_t>(Dimension::deliberation)], 2.0);
    EXPECT_EQ(w.weight[static_cast<std::size_t>(Dimension::goals)], 1.0);
    EXPECT_EQ(w.epsilon, 1e-6);
}

TEST(ReflexivityIndex, InvalidWeightsRejected) {
    IndexWeights zero;
    EXPECT_THROW(reflexivity_index(CapabilityProfile::uniform(1.0), zero), ConfigError);
    auto neg = IndexWeights::unit();
    neg.weight[3] = -1.0;
    EXPECT_THROW(reflexivity_index(CapabilityProfile::uniform(1.0), neg), ConfigError);
    auto eps = IndexWeights::unit();
    eps.epsilon = 0.0;
    EXPECT_THROW(reflexivity_index(CapabilityProfile::uniform(1.0), eps), ConfigError);
}

TEST(ReflexivityIndex, MonotoneInEachCoefficient) {
    SplitMix rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        CapabilityProfile p;
        for (auto& c : p.coefficient) c = rng.uniform();
        const auto d = static_cast<std::size_t>(rng.below(kDimensions));
        auto q = p;
        q.coefficient[d] = p.coefficient[d] + (1.0 - p.coefficient[d]) * rng.uniform();
        ASSERT_GE(reflexivity_index(q, IndexWeights::defaults()).index, reflexivity_index(p, IndexWeights::defaults()).index);
    }
}

TEST(ReflexivityIndex, PermutationSymmetricUnderEqualWeights) {
    SplitMix rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        CapabilityProfile p;
        for (auto& c : p.coefficient) c = rng.uniform(0.1, 1.0);
        auto q = p;
        std::reverse(q.coefficient.begin(), q.coefficient.end());
        std::rotate(q.coefficient.begin(), q.coefficient.begin() + static_cast<long>(rng.below(16)), q.coefficient.end());
        ASSERT_NEAR(reflexivity_index(p, IndexWeights::unit()).log_score, reflexivity_index(q, IndexWeights::unit()).log_score, 1e-12);
    }
}

TEST(ReflexivityIndex, ReflexivityWeightSemantics) {
    auto p = CapabilityProfile::uniform(0.9);
    auto heavy = IndexWeights::unit();
    heavy.weight[0] = 3.0;
    EXPECT_LT(reflexivity_index(p, heavy).index, reflexivity_index(p, IndexWeights::unit()).index);
    p[Dimension::reflexivity] = 1.0;
    EXPECT_EQ(reflexivity_index(p, heavy).index, reflexivity_index(p, IndexWeights::unit()).index);
}

TEST(CardinalityIndex, Examples) {
    auto t = reflex::testing::tiny(2, 4);
    t.hidden = {5, 1000};
    EXPECT_DOUBLE_EQ(cardinality_index(t), 3.0);
    t.hidden = {5, 1};
    EXPECT_EQ(cardinality_index(t), 0.0);
    t.hidden = {5, 30000};
    EXPECT_NEAR(cardinality_index(t), 4.477, 1e-3);
}

TEST(Classify, TopElement) {
    const auto c = classify(CapabilityProfile::uniform(1.0), {true, true, true, true});
    EXPECT_TRUE(c.reflexive && c.deliberative && c.autonomous && c.fully_reflexive && c.complete && c.r_complete && c.d_complete);
}

TEST(Classify, MultimediaGate) {
    const auto c = classify(CapabilityProfile::uniform(1.0), {true, true, false, true});
    EXPECT_FALSE(c.fully_reflexive);
    EXPECT_FALSE(c.complete);
    EXPECT_TRUE(c.autonomous);
}

TEST(Classify, NonReflexiveIsNothing) {
    auto p = CapabilityProfile::uniform(1.0);
    p[Dimension::reflexivity] = 0.0;
    EXPECT_FALSE(classify(p, {true, true, true, true}).any());
}

TEST(Classify, ImplicationChainExhaustive) {
    for (double r : {0.0, 0.5, 1.0 - 1e-3, 1.0 - 1e-7, 1.0}) {
        for (int bits = 0; bits < 16; ++bits) {
            const FeatureFlags f{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
            auto p = CapabilityProfile::uniform(0.3);
            p[Dimension::reflexivity] = r;
            const auto c = classify(p, f);
            EXPECT_EQ(c.reflexive, r >= 1.0 - 1e-6);
            if (c.complete) EXPECT_TRUE(c.autonomous && c.fully_reflexive && c.reflexive);
            if (c.autonomous || c.deliberative || c.fully_reflexive) EXPECT_TRUE(c.reflexive);
            if (c.d_complete) EXPECT_TRUE(c.r_complete && c.deliberative);
            EXPECT_EQ(c.r_complete, c.complete);
            EXPECT_EQ(c.deliberative, c.reflexive && f.has_deliberation_unit);
            EXPECT_EQ(c.complete, c.reflexive && f.has_multimedia && f.has_effectors && f.has_goal_system);
        }
    }
}

TEST(Profile, TextRoundTrip) {
    CapabilityProfile p;
    for (std::size_t d = 0; d < kDimensions; ++d) p.coefficient[d] = static_cast<double>(d) / 17.0;
    const auto back = parse_profile(format_profile(p));
    EXPECT_EQ(back.coefficient, p.coefficient);
}

TEST(Profile, ParseErrors) {
    const auto good = format_profile(CapabilityProfile::uniform(0.5));
    EXPECT_THROW(parse_profile("reflexivity = 1\n"), ConfigError);
    EXPECT_THROW(parse_profile(good + "bogus = 0.1\n"), ConfigError);
    EXPECT_THROW(parse_profile(good + "spatial = 1.5\n"), ConfigError);
    EXPECT_THROW(parse_profile(good + "spatial\n"), ConfigError);
    EXPECT_NO_THROW(parse_profile("# comment\n" + good));
}

TEST(Profile, ReportListsEveryDimension) {
    const auto p = CapabilityProfile::uniform(1.0);
    const auto w = IndexWeights::defaults();
    const auto s = format_report(p, w, reflexivity_index(p, w), 2.0, classify(p, {}));
    for (auto name : kDimensionNames) EXPECT_NE(s.find(name), std::string::npos);
    EXPECT_NE(s.find("d_complete              no"), std::string::npos);
    EXPECT_NE(s.find("reflexive               yes"), std::string::npos);
}
