#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "oracles.hpp"
#include "saccade/planner.hpp"

using namespace saccade;

namespace {

BeliefState random_belief(const GridSpec& g, Rng& rng, const Fixation& at = {0, 0})
{
    BeliefState b = init_belief(g, 0.5, at);
    for (double& q : b.q) {
        const double u = rng.uniform();
        // mix in exact certainties so the edge cases get exercised too
        q = u < 0.1 ? 0.0 : (u < 0.2 ? 1.0 : rng.uniform());
    }
    return b;
}

} // namespace

TEST(BlockInfoGain, AnalyticAnchors)
{
    const auto det = SensorModel::deterministic();
    EXPECT_NEAR(block_info_gain(0.5, det), std::log(2.0), 1e-12);
    for (const SensorModel& s : {det, SensorModel{0.9, 0.05}, SensorModel{0.6, 0.3}}) {
        EXPECT_EQ(block_info_gain(0.0, s), 0.0);
        EXPECT_EQ(block_info_gain(1.0, s), 0.0);
    }
}

TEST(BlockInfoGain, NoisySensorMatchesEnumeration)
{
    // frozen from an independent enumeration of the 2x2 joint
    EXPECT_NEAR(block_info_gain(0.5, {0.9, 0.05}), 0.4300975508364197, 1e-12);
    EXPECT_NEAR(block_info_gain(0.5, {0.9, 0.05}), oracle::joint_info_gain({0.5}, 0.9, 0.05), 1e-12);
}

TEST(BlockInfoGain, EqualsEntropyForDeterministicSensor)
{
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const double q = rng.uniform();
        EXPECT_NEAR(block_info_gain(q, SensorModel::deterministic()), bernoulli_entropy(q), 1e-12);
        const double fa = rng.uniform(0.0, 0.9);
        const SensorModel s{rng.uniform(fa + 1e-3, 1.0), fa};
        const double ig = block_info_gain(q, s);
        EXPECT_GE(ig, 0.0);
        EXPECT_LE(ig, bernoulli_entropy(q) + 1e-12);
        EXPECT_NEAR(ig, oracle::joint_info_gain({q}, s.p_hit, s.p_fa), 1e-12);
    }
}

TEST(EvaluatePolicy, ExploreFreshInterior)
{
    const GridSpec g(9, 9, 3, 3);
    const BeliefState b = init_belief(g, 0.5, {0, 0});
    const auto ev = evaluate_policy(b, {4, 4}, SensorModel::deterministic(),
                                    Preferences::make(PreferenceMode::Explore, g), g);
    EXPECT_NEAR(ev.info_gain, 9 * std::log(2.0), 1e-12);
    EXPECT_EQ(ev.utility, 0.0);
    EXPECT_NEAR(ev.G, -9 * std::log(2.0), 1e-12);
}

TEST(EvaluatePolicy, ExploreKnownBlocks)
{
    const GridSpec g(9, 9, 3, 3);
    BeliefState b = init_belief(g, 0.0, {0, 0});
    for (std::size_t i = 0; i < b.q.size(); i += 2) b.q[i] = 1.0;
    const auto ev = evaluate_policy(b, {4, 4}, SensorModel::deterministic(),
                                    Preferences::make(PreferenceMode::Explore, g), g);
    EXPECT_EQ(ev.G, 0.0);
}

TEST(EvaluatePolicy, TrackCenteredObject)
{
    const GridSpec g(9, 9, 3, 3);
    BeliefState b = init_belief(g, 0.0, {0, 0});
    b.q[g.block_index({4, 4})] = 1.0;
    const auto ev = evaluate_policy(b, {4, 4}, SensorModel::deterministic(),
                                    Preferences::make(PreferenceMode::Track, g, 1.0), g);
    EXPECT_EQ(ev.utility, 1.0);
    EXPECT_EQ(ev.info_gain, 0.0);
    EXPECT_EQ(ev.G, -1.0);
}

TEST(EvaluatePolicy, OutOfBoundsIsContractViolation)
{
    const GridSpec g(4, 4, 2, 2);
    const BeliefState b = init_belief(g, 0.5, {0, 0});
    EXPECT_THROW(evaluate_policy(b, {0, 4}, {}, Preferences::make(PreferenceMode::Explore, g), g),
                 ContractViolation);
}

// The factorized sum must agree with enumeration over all joint FOV outcomes.
TEST(EvaluatePolicy, InfoGainMatchesJointEnumeration)
{
    const GridSpec g(4, 4, 2, 2);
    Rng rng(101);
    const std::vector<SensorModel> sensors{SensorModel::deterministic(), {0.9, 0.05}, {0.7, 0.2}};
    for (int c = 0; c < 60; ++c) {
        const BeliefState b = random_belief(g, rng);
        const SensorModel& s = sensors[c % sensors.size()];
        for (const Fixation& p : all_fixations(g)) {
            std::vector<double> qs;
            for (const auto& cell : visible_blocks(g, p)) {
                if (cell.in_grid()) qs.push_back(b.q[g.block_index(*cell.block)]);
            }
            const auto ev = evaluate_policy(b, p, s, Preferences::make(PreferenceMode::Explore, g), g);
            EXPECT_NEAR(ev.info_gain, oracle::joint_info_gain(qs, s.p_hit, s.p_fa), 1e-9);
        }
    }
}

TEST(EvaluatePolicy, PermutationSymmetry)
{
    const GridSpec g(5, 5, 3, 3);
    Rng rng(8);
    const SensorModel s{0.85, 0.1};
    for (int c = 0; c < 50; ++c) {
        BeliefState b = random_belief(g, rng);
        const auto prefs = Preferences::make(PreferenceMode::Explore, g);
        const double before = evaluate_policy(b, {2, 2}, s, prefs, g).info_gain;
        std::vector<double> window;
        std::vector<std::size_t> idx;
        for (const auto& cell : visible_blocks(g, {2, 2})) {
            idx.push_back(g.block_index(*cell.block));
            window.push_back(b.q[idx.back()]);
        }
        std::reverse(window.begin(), window.end());
        for (std::size_t i = 0; i < idx.size(); ++i) b.q[idx[i]] = window[i];
        EXPECT_NEAR(evaluate_policy(b, {2, 2}, s, prefs, g).info_gain, before, 1e-12);
    }
}

TEST(SelectAction, EvaluationsMatchEvaluatePolicy)
{
    const GridSpec g(6, 5, 3, 2);
    Rng rng(21);
    const SensorModel s{0.8, 0.1};
    for (auto mode : {PreferenceMode::Explore, PreferenceMode::Seek, PreferenceMode::Track}) {
        const BeliefState b = random_belief(g, rng, {2, 2});
        const auto prefs = Preferences::make(mode, g, 1.5);
        const auto choice = select_action(b, s, prefs, g);
        ASSERT_EQ(choice.evaluations.size(), g.num_blocks());
        for (std::size_t i = 0; i < choice.evaluations.size(); ++i) {
            EXPECT_EQ(choice.evaluations[i].fixation, g.block_at(i));
            EXPECT_EQ(choice.evaluations[i], evaluate_policy(b, g.block_at(i), s, prefs, g));
            EXPECT_EQ(choice.evaluations[i].G, -choice.evaluations[i].info_gain - choice.evaluations[i].utility);
            EXPECT_GE(choice.evaluations[i].info_gain, 0.0);
        }
    }
}

TEST(SelectAction, FreshUniformExplorePicksNearestFullInteriorFov)
{
    const GridSpec g(9, 9, 3, 3);
    const auto det = SensorModel::deterministic();
    const auto prefs = Preferences::make(PreferenceMode::Explore, g);
    for (const Fixation& start : {Fixation{0, 0}, Fixation{4, 4}, Fixation{8, 3}}) {
        const BeliefState b = init_belief(g, 0.5, start);
        // brute force: best G over all 81 candidates, then nearest to start, then row-major
        double best_g = 1e300;
        for (const Fixation& p : all_fixations(g)) best_g = std::min(best_g, evaluate_policy(b, p, det, prefs, g).G);
        std::optional<Fixation> expected;
        for (const Fixation& p : all_fixations(g)) {
            if (std::abs(evaluate_policy(b, p, det, prefs, g).G - best_g) > 1e-12) continue;
            if (!expected || chebyshev(p, start) < chebyshev(*expected, start)) expected = p;
        }
        const Fixation chosen = select_action(b, det, prefs, g).fixation;
        EXPECT_EQ(chosen, *expected);
        EXPECT_TRUE(chosen.k >= 1 && chosen.k <= 7 && chosen.l >= 1 && chosen.l <= 7);
        EXPECT_NEAR(evaluate_policy(b, chosen, det, prefs, g).info_gain, 9 * std::log(2.0), 1e-12);
    }
    EXPECT_EQ(select_action(init_belief(g, 0.5, {0, 0}), det, prefs, g).fixation, (Fixation{1, 1}));
    EXPECT_EQ(select_action(init_belief(g, 0.5, {4, 4}), det, prefs, g).fixation, (Fixation{4, 4}));
}

TEST(SelectAction, CertainBeliefStaysPut)
{
    const GridSpec g(9, 9, 3, 3);
    BeliefState b = init_belief(g, 0.0, {6, 2});
    const auto choice = select_action(b, SensorModel::deterministic(), Preferences::make(PreferenceMode::Explore, g), g);
    for (const auto& ev : choice.evaluations) EXPECT_EQ(ev.G, 0.0);
    EXPECT_EQ(choice.fixation, (Fixation{6, 2}));
}

TEST(SelectAction, TrackCentersCertainObject)
{
    const GridSpec g(9, 9, 3, 3);
    BeliefState b = init_belief(g, 0.0, {0, 0});
    b.q[g.block_index({4, 4})] = 1.0;
    const auto prefs = Preferences::make(PreferenceMode::Track, g);
    const auto choice = select_action(b, SensorModel::deterministic(), prefs, g);
    int at_minimum = 0;
    for (const auto& ev : choice.evaluations) at_minimum += ev.G == -1.0 ? 1 : 0;
    EXPECT_EQ(at_minimum, 1);
    EXPECT_EQ(choice.fixation, (Fixation{4, 4}));
}

TEST(SelectAction, ExploreSelectionIgnoresPreferenceScale)
{
    const GridSpec g(7, 6, 3, 3);
    Rng rng(31);
    for (int c = 0; c < 50; ++c) {
        const BeliefState b = random_belief(g, rng, {int(rng.index(7)), int(rng.index(6))});
        const Fixation base = select_action(b, {0.9, 0.05}, Preferences::make(PreferenceMode::Explore, g, 1.0), g).fixation;
        for (double lambda : {0.1, 3.0, 100.0}) {
            EXPECT_EQ(select_action(b, {0.9, 0.05}, Preferences::make(PreferenceMode::Explore, g, lambda), g).fixation,
                      base);
        }
    }
}

TEST(SelectAction, DeterministicExploreMaximizesFovEntropy)
{
    const GridSpec g(8, 7, 3, 3);
    Rng rng(44);
    const auto det = SensorModel::deterministic();
    for (int c = 0; c < 100; ++c) {
        const BeliefState b = random_belief(g, rng, {int(rng.index(8)), int(rng.index(7))});
        const Fixation chosen = select_action(b, det, Preferences::make(PreferenceMode::Explore, g), g).fixation;
        auto fov_entropy = [&](const Fixation& p) {
            double h = 0.0;
            for (const auto& cell : visible_blocks(g, p)) {
                if (cell.in_grid()) h += bernoulli_entropy(b.q[g.block_index(*cell.block)]);
            }
            return h;
        };
        double best = 0.0;
        for (const Fixation& p : all_fixations(g)) best = std::max(best, fov_entropy(p));
        EXPECT_NEAR(fov_entropy(chosen), best, 1e-9);
    }
}

TEST(SelectAction, PureFunctionOfInputs)
{
    const GridSpec g(9, 9, 3, 3);
    Rng rng(55);
    const BeliefState b = random_belief(g, rng, {3, 3});
    const auto prefs = Preferences::make(PreferenceMode::Seek, g);
    const auto first = select_action(b, {0.9, 0.05}, prefs, g);
    for (int i = 0; i < 5; ++i) {
        const auto again = select_action(b, {0.9, 0.05}, prefs, g);
        EXPECT_EQ(again.fixation, first.fixation);
        EXPECT_EQ(again.evaluations, first.evaluations);
    }
}

TEST(SelectAction, SoftmaxIsSeededAndConcentratesAtLowTemperature)
{
    const GridSpec g(9, 9, 3, 3);
    const BeliefState b = init_belief(g, 0.5, {0, 0});
    const auto prefs = Preferences::make(PreferenceMode::Explore, g);
    const SelectionPolicy soft{SelectionPolicy::Kind::Softmax, 0.5};
    EXPECT_THROW(select_action(b, {}, prefs, g, soft), ContractViolation);

    Rng a(9), c(9);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(select_action(b, {}, prefs, g, soft, &a).fixation, select_action(b, {}, prefs, g, soft, &c).fixation);
    }

    // at a tiny temperature only minimum-G fixations get sampled
    Rng r(1);
    const SelectionPolicy cold{SelectionPolicy::Kind::Softmax, 1e-6};
    const auto det = SensorModel::deterministic();
    for (int i = 0; i < 50; ++i) {
        const Fixation p = select_action(b, det, prefs, g, cold, &r).fixation;
        EXPECT_NEAR(evaluate_policy(b, p, det, prefs, g).info_gain, 9 * std::log(2.0), 1e-12);
    }

    // at a high temperature many fixations get sampled
    Rng hot_rng(2);
    std::map<std::pair<int, int>, int> seen;
    for (int i = 0; i < 400; ++i) {
        const Fixation p = select_action(b, det, prefs, g, {SelectionPolicy::Kind::Softmax, 100.0}, &hot_rng).fixation;
        ++seen[{p.k, p.l}];
    }
    EXPECT_GT(seen.size(), 40u);
}
