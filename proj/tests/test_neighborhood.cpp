#include <cmath>

#include "core/neighborhood.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace hybridrec;

namespace {

// Five users, four items; u4 rated only item 0 so everything it needs
// falls back. Fit with shrink 2, two neighbors per item.
RatingsTable cf_toy() {
    return oracle::make_table(5, 4, {{0, 0, 8.0}, {0, 1, 6.0}, {0, 2, 4.0},
                                     {1, 0, 6.0}, {1, 1, 7.0}, {1, 3, 5.0},
                                     {2, 1, 3.0}, {2, 2, 5.0}, {2, 3, 6.0},
                                     {3, 0, 7.0}, {3, 2, 6.0}, {3, 3, 8.0},
                                     {4, 0, 5.0}});
}

constexpr double kS02 = -0.4472135954999579;
constexpr double kS12 = -0.08219949365267858;
constexpr double kS13 = -0.4973458969132757;
constexpr double kS23 = -0.15811388300841916;

}  // namespace

TEST_CASE("the four-item toy produces the hand-computed neighbor lists") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    REQUIRE(m.store.num_entities() == 4);

    REQUIRE(m.store.neighbors[0].size() == 1);  // pairs (0,1) and (0,3) score zero
    CHECK(m.store.neighbors[0][0].index == 2);
    CHECK(m.store.neighbors[0][0].score == doctest::Approx(kS02).epsilon(1e-12));

    REQUIRE(m.store.neighbors[1].size() == 2);
    CHECK(m.store.neighbors[1][0].index == 2);
    CHECK(m.store.neighbors[1][0].score == doctest::Approx(kS12).epsilon(1e-12));
    CHECK(m.store.neighbors[1][1].index == 3);
    CHECK(m.store.neighbors[1][1].score == doctest::Approx(kS13).epsilon(1e-12));

    REQUIRE(m.store.neighbors[2].size() == 2);
    CHECK(m.store.neighbors[2][0].index == 1);
    CHECK(m.store.neighbors[2][0].score == doctest::Approx(kS12).epsilon(1e-12));
    CHECK(m.store.neighbors[2][1].index == 3);
    CHECK(m.store.neighbors[2][1].score == doctest::Approx(kS23).epsilon(1e-12));

    REQUIRE(m.store.neighbors[3].size() == 2);
    CHECK(m.store.neighbors[3][0].index == 2);
    CHECK(m.store.neighbors[3][0].score == doctest::Approx(kS23).epsilon(1e-12));
    CHECK(m.store.neighbors[3][1].index == 1);
    CHECK(m.store.neighbors[3][1].score == doctest::Approx(kS13).epsilon(1e-12));
}

TEST_CASE("every toy prediction matches the hand-worked value and fallback flag") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});

    struct Expect {
        uint32_t u, i;
        double value;
        bool fallback;
    };
    const Expect table[] = {
        {0, 0, 5.5, false},
        {0, 1, 4.333333333333333, false},
        {0, 2, 5.666666666666667, false},
        {0, 3, 6.597956813797412, false},
        {1, 0, 6.653846153846154, true},  // its one neighbor is unrated by u1
        {1, 1, 4.0, false},
        {1, 2, 4.692820451296815, false},
        {1, 3, 8.0, false},
        {2, 0, 6.5, false},
        {2, 1, 5.047278145359421, false},
        {2, 2, 3.9825641435799017, false},
        {2, 3, 4.562860460683623, false},
        {3, 0, 7.5, false},
        {3, 1, 6.905443709281158, false},
        {3, 2, 6.666666666666667, false},
        {3, 3, 7.333333333333333, false},
        {4, 0, 5.653846153846154, true},
        {4, 1, 4.487179487179487, true},
        {4, 2, 4.153846153846154, true},
        {4, 3, 5.487179487179487, true},
    };
    for (const Expect& e : table) {
        CfPrediction p = predict_cf(m, t, e.u, e.i);
        CAPTURE(e.u);
        CAPTURE(e.i);
        CHECK(p.value == doctest::Approx(e.value).epsilon(1e-10));
        CHECK(p.fallback == e.fallback);
    }
}

TEST_CASE("toy predictions also equal the direct-summation reference") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    // hand the reference the engine's stored lists; it re-derives the rest
    std::vector<std::vector<Neighbor>> lists = m.store.neighbors;
    for (uint32_t u = 0; u < t.num_users; ++u)
        for (uint32_t i = 0; i < t.num_items; ++i) {
            bool oracle_fb = false;
            double expect = oracle::cf_predict(t, lists, Axis::Item, u, i, &oracle_fb);
            CfPrediction got = predict_cf(m, t, u, i);
            CHECK(got.value == doctest::Approx(expect).epsilon(1e-12));
            CHECK(got.fallback == oracle_fb);
        }
}

TEST_CASE("user-axis predictions equal the direct-summation reference") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::User});
    for (uint32_t u = 0; u < t.num_users; ++u)
        for (uint32_t i = 0; i < t.num_items; ++i) {
            bool oracle_fb = false;
            double expect =
                oracle::cf_predict(t, m.store.neighbors, Axis::User, u, i, &oracle_fb);
            CfPrediction got = predict_cf(m, t, u, i);
            CHECK(got.value == doctest::Approx(expect).epsilon(1e-12));
            CHECK(got.fallback == oracle_fb);
        }
}

TEST_CASE("a single neighbor's weight cancels, leaving bias plus deviation") {
    // Force the situation by hand: one stored neighbor with score 0.5
    // and a rating sitting 2 above its bias estimate.
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    BiasModel& b = m.bias;
    m.store.neighbors[0] = {{1, 0.5}};
    double dev = *t.find(0, 1) - predict_baseline(b, 0, 1);
    CfPrediction p = predict_cf(m, t, 0, 0);
    CHECK_FALSE(p.fallback);
    CHECK(p.value == doctest::Approx(predict_baseline(b, 0, 0) + dev).epsilon(1e-12));
}

TEST_CASE("no eligible neighbor falls back to the bias estimate") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    m.store.neighbors[0].clear();
    CfPrediction p = predict_cf(m, t, 0, 0);
    CHECK(p.fallback);
    CHECK(p.value == predict_baseline(m.bias, 0, 0));
}

TEST_CASE("a vanishing denominator falls back instead of exploding") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    // two neighbors of item 0 rated by u0 with opposite scores
    m.store.neighbors[0] = {{1, 0.25}, {2, -0.25}};
    CfPrediction p = predict_cf(m, t, 0, 0);
    CHECK(p.fallback);
    CHECK(p.value == predict_baseline(m.bias, 0, 0));
}

TEST_CASE("equal deviations with positive weights shift the bias by that deviation") {
    // items 1 and 2 rated exactly d above their estimates by user 0
    auto t = oracle::make_table(3, 3, {{0, 0, 5.0}, {0, 1, 8.0}, {0, 2, 8.0},
                                       {1, 0, 4.0}, {1, 1, 5.0}, {1, 2, 5.0},
                                       {2, 0, 6.0}, {2, 1, 7.0}, {2, 2, 7.0}});
    CfModel m = fit_cf(t, {1.0, 3, Axis::Item});
    BiasModel& b = m.bias;
    double d1 = *t.find(0, 1) - predict_baseline(b, 0, 1);
    double d2 = *t.find(0, 2) - predict_baseline(b, 0, 2);
    REQUIRE(d1 == doctest::Approx(d2).epsilon(1e-12));
    REQUIRE(std::abs(d1) > 0.1);
    m.store.neighbors[0] = {{1, 0.7}, {2, 0.2}};
    CfPrediction p = predict_cf(m, t, 0, 0);
    CHECK(p.value == doctest::Approx(predict_baseline(b, 0, 0) + d1).epsilon(1e-12));
}

TEST_CASE("prediction is invariant under positive rescaling of the scores") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 2, Axis::Item});
    CfPrediction before = predict_cf(m, t, 2, 1);
    REQUIRE_FALSE(before.fallback);
    for (auto& list : m.store.neighbors)
        for (auto& n : list) n.score *= 37.5;
    CfPrediction after = predict_cf(m, t, 2, 1);
    CHECK(after.value == doctest::Approx(before.value).epsilon(1e-12));
}

TEST_CASE("zero neighbors per list makes the predictor the bias estimate everywhere") {
    auto t = cf_toy();
    CfModel m = fit_cf(t, {2.0, 0, Axis::Item});
    for (uint32_t u = 0; u < t.num_users; ++u)
        for (uint32_t i = 0; i < t.num_items; ++i) {
            CfPrediction p = predict_cf(m, t, u, i);
            CHECK(p.fallback);
            CHECK(p.value == predict_baseline(m.bias, u, i));
        }
}
