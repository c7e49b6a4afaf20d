#include "core/baseline.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace hybridrec;

TEST_CASE("single rating gives the global mean and zero offsets") {
    auto t = oracle::make_table(1, 1, {{0, 0, 4.0}});
    BiasModel b = fit_bias(t);
    CHECK(b.global_mean == 4.0);
    CHECK(b.user_offset(0) == 0.0);
    CHECK(b.item_offset(0) == 0.0);
    CHECK(predict_baseline(b, 0, 0) == 4.0);
}

TEST_CASE("three-rating table: means and the plug-in prediction") {
    // u0: i0=2, i1=4; u1: i0=6
    auto t = oracle::make_table(2, 2, {{0, 0, 2.0}, {0, 1, 4.0}, {1, 0, 6.0}});
    BiasModel b = fit_bias(t);
    CHECK(b.global_mean == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(b.user_mean[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(b.user_mean[1] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(b.item_mean[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(b.item_mean[1] == doctest::Approx(4.0).epsilon(1e-15));
    // 4 + (6-4) + (4-4) = 6
    CHECK(predict_baseline(b, 1, 1) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("out-of-range entities act cold: zero offset, global-mean prediction") {
    auto t = oracle::make_table(2, 2, {{0, 0, 2.0}, {0, 1, 4.0}, {1, 0, 6.0}});
    BiasModel b = fit_bias(t);
    CHECK(b.user_offset(99) == 0.0);
    CHECK(b.item_offset(99) == 0.0);
    CHECK(predict_baseline(b, 99, 99) == b.global_mean);
    CHECK(predict_baseline(b, 1, 99) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("an entity present in the table but without ratings is cold") {
    // item 1 exists in the universe but nobody rated it
    auto t = oracle::make_table(2, 2, {{0, 0, 3.0}, {1, 0, 5.0}});
    BiasModel b = fit_bias(t);
    CHECK(b.item_mean[1] == b.global_mean);
    CHECK(b.item_offset(1) == 0.0);
}

TEST_CASE("fitting an empty table is a configuration error") {
    auto t = oracle::make_table(1, 1, {});
    try {
        fit_bias(t);
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("predictions agree with the independently computed estimate") {
    auto t = oracle::make_table(
        3, 3, {{0, 0, 1.0}, {0, 1, 7.0}, {1, 1, 4.0}, {1, 2, 9.0}, {2, 0, 5.0}, {2, 2, 2.0}});
    BiasModel b = fit_bias(t);
    for (uint32_t u = 0; u < 3; ++u)
        for (uint32_t i = 0; i < 3; ++i)
            CHECK(predict_baseline(b, u, i) ==
                  doctest::Approx(oracle::baseline(t, u, i)).epsilon(1e-14));
}

TEST_CASE("shifting every rating by a constant shifts every prediction by it") {
    std::vector<Rating> triples = {{0, 0, 1.0}, {0, 1, 7.0}, {1, 1, 4.0}, {2, 0, 5.0}};
    auto t1 = oracle::make_table(3, 2, triples);
    for (auto& r : triples) r.value += 2.5;
    auto t2 = oracle::make_table(3, 2, triples);
    BiasModel b1 = fit_bias(t1), b2 = fit_bias(t2);
    for (uint32_t u = 0; u < 3; ++u)
        for (uint32_t i = 0; i < 2; ++i)
            CHECK(predict_baseline(b2, u, i) ==
                  doctest::Approx(predict_baseline(b1, u, i) + 2.5).epsilon(1e-14));
}

TEST_CASE("the literal sum-of-means variant triple-counts the mean") {
    auto t = oracle::make_table(2, 2, {{0, 0, 2.0}, {0, 1, 4.0}, {1, 0, 6.0}});
    BiasModel b = fit_bias(t, BaselineMode::MeanSum);
    // 4 + 6 + 4 = 14: roughly twice the rating scale, which is why
    // the offsets combination is the default.
    CHECK(predict_baseline(b, 1, 1) == doctest::Approx(14.0).epsilon(1e-15));
    BiasModel offsets = fit_bias(t, BaselineMode::Offsets);
    CHECK(predict_baseline(b, 1, 1) ==
          doctest::Approx(predict_baseline(offsets, 1, 1) + 2.0 * b.global_mean)
              .epsilon(1e-14));
}

TEST_CASE("residuals against the estimate sum to the oracle value") {
    auto t = oracle::make_table(
        3, 3, {{0, 0, 1.0}, {0, 1, 7.0}, {1, 1, 4.0}, {1, 2, 9.0}, {2, 0, 5.0}, {2, 2, 2.0}});
    BiasModel b = fit_bias(t);
    double engine_sum = 0.0, oracle_sum = 0.0;
    for (const Rating& r : t.triples) {
        engine_sum += r.value - predict_baseline(b, r.user, r.item);
        oracle_sum += r.value - oracle::baseline(t, r.user, r.item);
    }
    CHECK(engine_sum == doctest::Approx(oracle_sum).epsilon(1e-12));
}
