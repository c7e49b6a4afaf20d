#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "core/als.hpp"
#include "core/baseline.hpp"
#include "core/synthetic.hpp"
#include "doctest.h"

using namespace hybridrec;

namespace {

std::set<std::pair<std::string, std::string>> cell_set(const GeneratedData& g) {
    std::set<std::pair<std::string, std::string>> s;
    for (const RawRating& r : g.train_raw) s.insert({r.user_id, r.item_id});
    for (const RawRating& r : g.test_raw) s.insert({r.user_id, r.item_id});
    return s;
}

}  // namespace

TEST_CASE("the same seed reproduces the generated data bit for bit") {
    GenParams p;
    p.users = 30;
    p.items = 25;
    p.density = 0.3;
    p.seed = 77;
    GeneratedData a = generate_synthetic(p);
    GeneratedData b = generate_synthetic(p);
    REQUIRE(a.train_raw.size() == b.train_raw.size());
    REQUIRE(a.test_raw.size() == b.test_raw.size());
    for (size_t i = 0; i < a.train_raw.size(); ++i) {
        CHECK(a.train_raw[i].user_id == b.train_raw[i].user_id);
        CHECK(a.train_raw[i].item_id == b.train_raw[i].item_id);
        CHECK(a.train_raw[i].rating == b.train_raw[i].rating);
        CHECK(a.train_raw[i].timestamp == b.train_raw[i].timestamp);
    }
    for (size_t i = 0; i < a.test_raw.size(); ++i) {
        CHECK(a.test_raw[i].user_id == b.test_raw[i].user_id);
        CHECK(a.test_raw[i].item_id == b.test_raw[i].item_id);
        CHECK(a.test_raw[i].rating == b.test_raw[i].rating);
    }
    CHECK(a.dataset.train.size() == b.dataset.train.size());
    CHECK(a.dataset.test.size() == b.dataset.test.size());
}

TEST_CASE("degenerate generator parameters are rejected") {
    GenParams p;
    p.users = 0;
    CHECK_THROWS_AS(generate_synthetic(p), Error);
    p = {};
    p.items = 0;
    CHECK_THROWS_AS(generate_synthetic(p), Error);
    p = {};
    p.k_true = 0;
    CHECK_THROWS_AS(generate_synthetic(p), Error);
    p = {};
    p.density = 0.0;
    CHECK_THROWS_AS(generate_synthetic(p), Error);
    p = {};
    p.density = 1.0000001;
    CHECK_THROWS_AS(generate_synthetic(p), Error);
    p = {};
    p.noise_sd = -0.1;
    CHECK_THROWS_AS(generate_synthetic(p), Error);

    try {
        p = {};
        p.users = 0;
        generate_synthetic(p);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
    }
}

TEST_CASE("a density that keeps nothing is reported, not returned empty") {
    GenParams p;
    p.users = 1;
    p.items = 1;
    p.density = 1e-300;
    p.seed = 3;
    try {
        generate_synthetic(p);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("a tenth of the kept cells land in the test split") {
    GenParams p;
    p.users = 40;
    p.items = 30;
    p.density = 0.25;
    p.seed = 11;
    GeneratedData g = generate_synthetic(p);
    size_t total = g.train_raw.size() + g.test_raw.size();
    CHECK(g.test_raw.size() == total / 10);
    CHECK(g.train_raw.size() == total - total / 10);
    // external ids follow the u<N>/i<N> scheme
    CHECK(g.train_raw.front().user_id.rfind('u', 0) == 0);
    CHECK(g.train_raw.front().item_id.rfind('i', 0) == 0);
}

TEST_CASE("the built dataset accounts for every generated record") {
    GenParams p;
    p.users = 35;
    p.items = 20;
    p.density = 0.15;
    p.seed = 23;
    GeneratedData g = generate_synthetic(p);
    CHECK(g.dataset.train.size() == g.train_raw.size());
    CHECK(g.dataset.test.size() + g.dataset.test_records_pruned == g.test_raw.size());
    // pruning keeps the universes aligned: every test row references
    // entities that carry at least one training rating
    for (const Rating& r : g.dataset.test.triples) {
        CHECK_FALSE(g.dataset.train.by_user[r.user].empty());
        CHECK_FALSE(g.dataset.train.by_item[r.item].empty());
    }
}

TEST_CASE("the noise level changes values, never which cells exist") {
    GenParams quiet;
    quiet.users = 25;
    quiet.items = 25;
    quiet.density = 0.2;
    quiet.noise_sd = 0.0;
    quiet.seed = 5;
    GenParams loud = quiet;
    loud.noise_sd = 2.0;
    GeneratedData a = generate_synthetic(quiet);
    GeneratedData b = generate_synthetic(loud);
    REQUIRE(a.train_raw.size() == b.train_raw.size());
    REQUIRE(a.test_raw.size() == b.test_raw.size());
    bool any_diff = false;
    for (size_t i = 0; i < a.train_raw.size(); ++i) {
        CHECK(a.train_raw[i].user_id == b.train_raw[i].user_id);
        CHECK(a.train_raw[i].item_id == b.train_raw[i].item_id);
        any_diff = any_diff || a.train_raw[i].rating != b.train_raw[i].rating;
    }
    CHECK(any_diff);
}

TEST_CASE("raising the density keeps a superset of the same seed's cells") {
    GenParams lo;
    lo.users = 30;
    lo.items = 30;
    lo.density = 0.05;
    lo.noise_sd = 0.0;
    lo.seed = 13;
    GenParams hi = lo;
    hi.density = 0.3;
    GeneratedData a = generate_synthetic(lo);
    GeneratedData b = generate_synthetic(hi);
    auto small = cell_set(a), big = cell_set(b);
    CHECK(small.size() < big.size());
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));

    // without noise the shared cells carry identical values
    std::map<std::pair<std::string, std::string>, double> values;
    for (const RawRating& r : b.train_raw) values[{r.user_id, r.item_id}] = r.rating;
    for (const RawRating& r : b.test_raw) values[{r.user_id, r.item_id}] = r.rating;
    for (const RawRating& r : a.train_raw) CHECK(values.at({r.user_id, r.item_id}) == r.rating);
    for (const RawRating& r : a.test_raw) CHECK(values.at({r.user_id, r.item_id}) == r.rating);
}

TEST_CASE("wild noise is clamped into the rating scale") {
    GenParams p;
    p.users = 30;
    p.items = 30;
    p.density = 0.5;
    p.noise_sd = 50.0;
    p.seed = 19;
    GeneratedData g = generate_synthetic(p);
    bool hit_low = false, hit_high = false;
    for (const RawRating& r : g.train_raw) {
        CHECK(r.rating >= 0.0);
        CHECK(r.rating <= 10.0);
        hit_low = hit_low || r.rating == 0.0;
        hit_high = hit_high || r.rating == 10.0;
    }
    CHECK(hit_low);
    CHECK(hit_high);
}

TEST_CASE("noiseless additive data is recovered by the mean-offset predictor") {
    GenParams p;
    p.users = 200;
    p.items = 200;
    p.density = 1.0;
    p.noise_sd = 0.0;
    p.mixture = MixtureProfile::PureBias;
    p.seed = 2;
    GeneratedData g = generate_synthetic(p);
    REQUIRE_FALSE(g.dataset.test.empty());
    BiasModel bias = fit_bias(g.dataset.train);
    double err = 0.0;
    for (const Rating& r : g.dataset.test.triples)
        err += std::abs(r.value - predict_baseline(bias, r.user, r.item));
    err /= static_cast<double>(g.dataset.test.size());
    CHECK(err < 0.05);
}

TEST_CASE("noiseless low-rank data is interpolated to numerical zero by the factor model") {
    GenParams p;
    p.users = 10;
    p.items = 10;
    p.k_true = 2;
    p.density = 1.0;
    p.noise_sd = 0.0;
    p.mixture = MixtureProfile::PureFactor;
    p.seed = 4;
    GeneratedData g = generate_synthetic(p);
    AlsConfig cfg;
    cfg.k = 2;
    cfg.lambda = 1e-6;
    cfg.max_iter = 300;
    cfg.epsilon = 1e-13;
    cfg.init = FactorInit::SeededUniform;
    cfg.seed = 42;
    cfg.select_by = SelectBy::Final;
    AlsResult res = fit_als(g.dataset, cfg);
    double sq = 0.0;
    for (const Rating& r : g.dataset.train.triples) {
        double d = r.value - predict_mf(res.model, r.user, r.item);
        sq += d * d;
    }
    double rmse = std::sqrt(sq / static_cast<double>(g.dataset.train.size()));
    CHECK(rmse < 1e-3);
}

TEST_CASE("the flat global-mean guess never beats the mean-offset predictor here") {
    GenParams p;
    p.users = 120;
    p.items = 100;
    p.density = 0.3;
    p.noise_sd = 0.5;
    p.mixture = MixtureProfile::PureBias;
    p.seed = 9;
    GeneratedData g = generate_synthetic(p);
    REQUIRE_FALSE(g.dataset.test.empty());
    BiasModel bias = fit_bias(g.dataset.train);
    double flat = 0.0, offs = 0.0;
    for (const Rating& r : g.dataset.test.triples) {
        flat += std::abs(r.value - bias.global_mean);
        offs += std::abs(r.value - predict_baseline(bias, r.user, r.item));
    }
    CHECK(offs <= flat);
    CHECK(offs < 0.75 * flat);  // and decisively so on bias-dominated data
}
