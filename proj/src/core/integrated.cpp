#include "core/integrated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/rng.hpp"

namespace hybridrec {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double relative_change(double prev, double cur) {
    if (prev == 0.0) return cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(cur - prev) / prev;
}

double dot_k(const double* a, const double* b, uint32_t k) {
    double s = 0.0;
    for (uint32_t t = 0; t < k; ++t) s += a[t] * b[t];
    return s;
}

double sum_sq(const std::vector<double>& v, double center = 0.0) {
    double s = 0.0;
    for (double x : v) s += (x - center) * (x - center);
    return s;
}

struct Terms {
    double base = 0.0;
    double mf = 0.0;
    double cf = 0.0;
};

Terms eval_terms(const IntegratedModel& m, const RatingsTable& table, uint32_t u, uint32_t i) {
    Terms t;
    t.base = m.global_mean + m.bu[u] + m.bi[i];
    t.mf = dot_k(&m.p[static_cast<size_t>(u) * m.k], &m.q[static_cast<size_t>(i) * m.k], m.k);
    const auto& neigh = m.store.neighbors[i];
    for (size_t n = 0; n < neigh.size(); ++n) {
        const double* r = table.find(u, neigh[n].index);
        if (!r) continue;
        t.cf += (*r - predict_baseline(m.bias, u, neigh[n].index)) * m.w[i][n];
    }
    return t;
}

double blend(const IntegratedModel& m, uint32_t u, const Terms& t) {
    return m.a1[u] * t.base + m.a2[u] * t.mf + m.a3[u] * t.cf;
}

double test_mae(const Dataset& data, const IntegratedModel& m) {
    if (data.test.empty()) return kNan;
    double sum = 0.0;
    for (const Rating& r : data.test.triples)
        sum += std::abs(r.value - predict_integrated(m, data.train, r.user, r.item));
    return sum / static_cast<double>(data.test.size());
}

struct Snapshot {
    std::vector<double> bu, bi, p, q, a1, a2, a3;
    std::vector<std::vector<double>> w;

    void take(const IntegratedModel& m) {
        bu = m.bu;
        bi = m.bi;
        p = m.p;
        q = m.q;
        w = m.w;
        a1 = m.a1;
        a2 = m.a2;
        a3 = m.a3;
    }
    void restore(IntegratedModel& m) {
        m.bu = std::move(bu);
        m.bi = std::move(bi);
        m.p = std::move(p);
        m.q = std::move(q);
        m.w = std::move(w);
        m.a1 = std::move(a1);
        m.a2 = std::move(a2);
        m.a3 = std::move(a3);
    }
};

void validate(const Dataset& data, const NeighborStore& store, const BiasModel& bias,
              const SgdConfig& cfg) {
    const RatingsTable& train = data.train;
    if (train.empty()) fail(ErrorKind::Config, "cannot fit on an empty training set");
    if (cfg.k < 1) fail(ErrorKind::Config, "factor count must be >= 1");
    if (!(cfg.r1 > 0.0 && cfg.r2 > 0.0 && cfg.r3 > 0.0))
        fail(ErrorKind::Config, "learning rates r1..r3 must be > 0");
    // r4 = 0 is allowed: it freezes the per-user blend weights at 1
    if (cfg.r4 < 0.0) fail(ErrorKind::Config, "learning rate r4 must be >= 0");
    if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0 || cfg.lambda3 < 0.0 || cfg.lambda4 < 0.0)
        fail(ErrorKind::Config, "all lambdas must be >= 0");
    if (!(cfg.epsilon > 0.0)) fail(ErrorKind::Config, "epsilon must be > 0");
    if (cfg.max_iter < 1) fail(ErrorKind::Config, "max_iter must be >= 1");
    if (store.params.axis != Axis::Item)
        fail(ErrorKind::Usage, "integrated training needs an item-axis neighbor store");
    if (store.params.top_n != cfg.top_n)
        fail(ErrorKind::Usage, "neighbor store was built with top_n=" +
                                   std::to_string(store.params.top_n) + ", config says " +
                                   std::to_string(cfg.top_n));
    if (store.neighbors.size() != train.num_items)
        fail(ErrorKind::Usage, "neighbor store does not cover the training items");
    if (bias.user_mean.size() != train.num_users || bias.item_mean.size() != train.num_items)
        fail(ErrorKind::Usage, "bias model does not cover the training universe");
}

}  // namespace

SgdConfig default_sgd_config(IntegratedVersion v) {
    SgdConfig cfg;
    if (v == IntegratedVersion::V2) cfg.r2 = 0.01;
    return cfg;
}

double predict_integrated(const IntegratedModel& m, const RatingsTable& table, uint32_t u,
                          uint32_t i) {
    if (u >= m.bu.size() || i >= m.bi.size())
        fail(ErrorKind::Usage, "prediction index out of range (user " + std::to_string(u) +
                                   ", item " + std::to_string(i) + ")");
    return blend(m, u, eval_terms(m, table, u, i));
}

double integrated_objective(const IntegratedModel& m, const RatingsTable& train,
                            const SgdConfig& cfg) {
    double f = 0.0;
    for (const Rating& r : train.triples) {
        double e = r.value - blend(m, r.user, eval_terms(m, train, r.user, r.item));
        f += e * e;
    }
    f += cfg.lambda1 * (sum_sq(m.bu) + sum_sq(m.bi));
    f += cfg.lambda2 * (sum_sq(m.p) + sum_sq(m.q));
    double w2 = 0.0;
    for (const auto& row : m.w) w2 += sum_sq(row);
    f += cfg.lambda3 * w2;
    if (m.version == IntegratedVersion::V2) {
        double center = cfg.a_reg_center == ARegCenter::One ? 1.0 : 0.0;
        f += cfg.lambda4 * (sum_sq(m.a1, center) + sum_sq(m.a2, center) + sum_sq(m.a3, center));
    }
    return f;
}

double sgd_step(IntegratedModel& m, const RatingsTable& train, uint32_t u, uint32_t i, double r,
                const SgdConfig& cfg) {
    Terms t = eval_terms(m, train, u, i);
    double e = r - blend(m, u, t);
    const double a1 = m.a1[u], a2 = m.a2[u], a3 = m.a3[u];

    m.bu[u] += cfg.r1 * (a1 * e - cfg.lambda1 * m.bu[u]);
    m.bi[i] += cfg.r1 * (a1 * e - cfg.lambda1 * m.bi[i]);

    double* pu = &m.p[static_cast<size_t>(u) * m.k];
    double* qi = &m.q[static_cast<size_t>(i) * m.k];
    for (uint32_t k = 0; k < m.k; ++k) {
        // both deltas from pre-update values, then applied together
        double dp = cfg.r2 * (a2 * e * qi[k] - cfg.lambda2 * pu[k]);
        double dq = cfg.r2 * (a2 * e * pu[k] - cfg.lambda2 * qi[k]);
        pu[k] += dp;
        qi[k] += dq;
    }

    const auto& neigh = m.store.neighbors[i];
    for (size_t n = 0; n < neigh.size(); ++n) {
        const double* rj = train.find(u, neigh[n].index);
        if (!rj) continue;
        double dev = *rj - predict_baseline(m.bias, u, neigh[n].index);
        m.w[i][n] += cfg.r3 * (a3 * e * dev - cfg.lambda3 * m.w[i][n]);
    }

    if (m.version == IntegratedVersion::V2) {
        double center = cfg.a_reg_center == ARegCenter::One ? 1.0 : 0.0;
        m.a1[u] += cfg.r4 * (e * t.base - cfg.lambda4 * (a1 - center));
        m.a2[u] += cfg.r4 * (e * t.mf - cfg.lambda4 * (a2 - center));
        m.a3[u] += cfg.r4 * (e * t.cf - cfg.lambda4 * (a3 - center));
    }
    return e;
}

IntegratedResult fit_integrated(const Dataset& data, const NeighborStore& store,
                                const BiasModel& bias, const SgdConfig& cfg,
                                IntegratedVersion version) {
    validate(data, store, bias, cfg);
    const RatingsTable& train = data.train;

    IntegratedResult res;
    IntegratedModel& m = res.model;
    m.version = version;
    m.k = cfg.k;
    m.global_mean = bias.global_mean;
    m.bias = bias;
    m.store = store;
    m.bu.resize(train.num_users);
    m.bi.resize(train.num_items);
    for (uint32_t u = 0; u < train.num_users; ++u) m.bu[u] = bias.user_offset(u);
    for (uint32_t i = 0; i < train.num_items; ++i) m.bi[i] = bias.item_offset(i);
    m.p.assign(static_cast<size_t>(train.num_users) * cfg.k, 1.0 / cfg.k);
    m.q.assign(static_cast<size_t>(train.num_items) * cfg.k, 1.0 / cfg.k);
    m.w.resize(store.neighbors.size());
    for (size_t i = 0; i < store.neighbors.size(); ++i) {
        m.w[i].resize(store.neighbors[i].size());
        for (size_t n = 0; n < store.neighbors[i].size(); ++n)
            m.w[i][n] = store.neighbors[i][n].score;
    }
    m.a1.assign(train.num_users, 1.0);
    m.a2.assign(train.num_users, 1.0);
    m.a3.assign(train.num_users, 1.0);

    std::vector<uint32_t> order(train.size());
    std::iota(order.begin(), order.end(), 0u);
    if (cfg.seed != 0) {
        Rng rng(cfg.seed);
        shuffle_vector(order, rng);
    }

    const double f0 = integrated_objective(m, train, cfg);
    const bool track_best = cfg.select_by == SelectBy::MinTestMae && !data.test.empty();
    double f_prev = f0;
    double best_mae = std::numeric_limits<double>::infinity();
    uint32_t best_epoch = 0;
    Snapshot best;

    for (uint32_t t = 1; t <= cfg.max_iter; ++t) {
        for (uint32_t idx : order) {
            const Rating& rec = train.triples[idx];
            sgd_step(m, train, rec.user, rec.item, rec.value, cfg);
        }
        double f = integrated_objective(m, train, cfg);
        if (!std::isfinite(f) || f > 10.0 * f0 + 1e-12)
            fail(ErrorKind::Diverged,
                 "training diverged at epoch " + std::to_string(t) + " (objective " +
                     std::to_string(f) + ", started at " + std::to_string(f0) +
                     "); lower the learning rates");
        double mae = test_mae(data, m);
        res.trace.epochs.push_back({t, f, mae});
        if (track_best && mae < best_mae) {
            best_mae = mae;
            best_epoch = t;
            best.take(m);
        }
        double rel = relative_change(f_prev, f);
        f_prev = f;
        if (rel < cfg.epsilon) {
            res.trace.converged = true;
            break;
        }
    }

    res.trace.selected_epoch = res.trace.epochs.back().epoch;
    if (track_best && best_epoch != 0) {
        best.restore(m);
        res.trace.selected_epoch = best_epoch;
    }
    return res;
}

}  // namespace hybridrec
