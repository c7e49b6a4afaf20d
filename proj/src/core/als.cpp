#include "core/als.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace hybridrec {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Relative objective change, guarding the zero-objective fixed point.
double relative_change(double prev, double cur) {
    if (prev == 0.0) return cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(cur - prev) / prev;
}

// Solves A x = b for symmetric positive definite A (k x k, row-major,
// lower triangle filled) via Cholesky, in place; b becomes x. A pivot
// below 1e-12 of the largest diagonal counts as singular.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, uint32_t k) {
    double max_diag = 0.0;
    for (uint32_t i = 0; i < k; ++i) max_diag = std::max(max_diag, a[i * k + i]);
    const double pivot_floor = max_diag * 1e-12;
    for (uint32_t j = 0; j < k; ++j) {
        double d = a[j * k + j];
        for (uint32_t t = 0; t < j; ++t) d -= a[j * k + t] * a[j * k + t];
        if (!(d > pivot_floor) || !(d > 0.0)) return false;
        double l = std::sqrt(d);
        a[j * k + j] = l;
        for (uint32_t i = j + 1; i < k; ++i) {
            double s = a[i * k + j];
            for (uint32_t t = 0; t < j; ++t) s -= a[i * k + t] * a[j * k + t];
            a[i * k + j] = s / l;
        }
    }
    for (uint32_t i = 0; i < k; ++i) {
        double s = b[i];
        for (uint32_t t = 0; t < i; ++t) s -= a[i * k + t] * b[t];
        b[i] = s / a[i * k + i];
    }
    for (uint32_t i = k; i-- > 0;) {
        double s = b[i];
        for (uint32_t t = i + 1; t < k; ++t) s -= a[t * k + i] * b[t];
        b[i] = s / a[i * k + i];
    }
    return true;
}

double dot_k(const double* a, const double* b, uint32_t k) {
    double s = 0.0;
    for (uint32_t t = 0; t < k; ++t) s += a[t] * b[t];
    return s;
}

struct Workspace {
    std::vector<double> gram;
    std::vector<double> rhs;
};

// One least-squares pass over every entity on one axis: for each, solve
// [lambda I + sum g g^T] x = sum y g over its ratings, g being the
// opposite-axis factor row. Accumulation runs in ascending opposite id.
void solve_axis(const std::vector<std::vector<Entry>>& lists, const std::vector<double>& opposite,
                std::vector<double>& out, uint32_t k, double lambda, double target_offset,
                const std::vector<std::string>& names, const char* axis_word, uint32_t sweep,
                Workspace& ws) {
    ws.gram.assign(static_cast<size_t>(k) * k, 0.0);
    ws.rhs.assign(k, 0.0);
    for (size_t e = 0; e < lists.size(); ++e) {
        std::fill(ws.gram.begin(), ws.gram.end(), 0.0);
        std::fill(ws.rhs.begin(), ws.rhs.end(), 0.0);
        for (const Entry& entry : lists[e]) {
            const double* g = &opposite[static_cast<size_t>(entry.index) * k];
            double y = entry.value - target_offset;
            for (uint32_t a = 0; a < k; ++a) {
                ws.rhs[a] += y * g[a];
                for (uint32_t b = 0; b <= a; ++b) ws.gram[a * k + b] += g[a] * g[b];
            }
        }
        if (lambda == 0.0) {
            // All opposite factors exactly zero: any solution fits, take
            // the minimum-norm one instead of calling the system singular.
            double max_diag = 0.0;
            for (uint32_t a = 0; a < k; ++a) max_diag = std::max(max_diag, ws.gram[a * k + a]);
            if (max_diag == 0.0) {
                std::fill_n(out.begin() + static_cast<size_t>(e) * k, k, 0.0);
                continue;
            }
        }
        for (uint32_t a = 0; a < k; ++a) ws.gram[a * k + a] += lambda;
        if (!cholesky_solve(ws.gram, ws.rhs, k))
            fail(ErrorKind::Solver, std::string("normal equations singular for ") + axis_word +
                                        " '" + names[e] + "' (index " + std::to_string(e) +
                                        ") during sweep " + std::to_string(sweep) +
                                        "; use lambda > 0 or a non-constant init");
        std::copy(ws.rhs.begin(), ws.rhs.end(), out.begin() + static_cast<size_t>(e) * k);
    }
}

double objective(const RatingsTable& train, const FactorModel& m, double lambda,
                 double target_offset) {
    double sse = 0.0;
    for (const Rating& r : train.triples) {
        double e = (r.value - target_offset) -
                   dot_k(&m.p[static_cast<size_t>(r.user) * m.k],
                         &m.q[static_cast<size_t>(r.item) * m.k], m.k);
        sse += e * e;
    }
    double reg = 0.0;
    for (double v : m.p) reg += v * v;
    for (double v : m.q) reg += v * v;
    return sse + lambda * reg;
}

double test_mae(const RatingsTable& test, const FactorModel& m) {
    if (test.empty()) return kNan;
    double sum = 0.0;
    for (const Rating& r : test.triples) sum += std::abs(r.value - predict_mf(m, r.user, r.item));
    return sum / static_cast<double>(test.size());
}

}  // namespace

AlsResult fit_als(const Dataset& data, const AlsConfig& cfg) {
    if (cfg.k < 1) fail(ErrorKind::Config, "factor count must be >= 1");
    if (cfg.lambda < 0.0) fail(ErrorKind::Config, "lambda must be >= 0");
    if (!(cfg.epsilon > 0.0)) fail(ErrorKind::Config, "epsilon must be > 0");
    if (cfg.max_iter < 1) fail(ErrorKind::Config, "max_iter must be >= 1");
    const RatingsTable& train = data.train;
    if (train.empty()) fail(ErrorKind::Config, "cannot fit on an empty training set");

    AlsResult res;
    FactorModel& m = res.model;
    m.k = cfg.k;
    double sum = 0.0;
    for (const Rating& r : train.triples) sum += r.value;
    m.global_mean = sum / static_cast<double>(train.size());

    const double init = cfg.init_value > 0.0 ? cfg.init_value : 1.0 / cfg.k;
    m.p.assign(static_cast<size_t>(train.num_users) * cfg.k, init);
    m.q.assign(static_cast<size_t>(train.num_items) * cfg.k, init);
    if (cfg.init == FactorInit::SeededUniform) {
        Rng rng(cfg.seed);
        for (double& v : m.p) v = rng.uniform(0.0, init);
        for (double& v : m.q) v = rng.uniform(0.0, init);
    }

    const double offset = cfg.targets == AlsTargets::Residual ? m.global_mean : 0.0;
    const bool track_best = cfg.select_by == SelectBy::MinTestMae && !data.test.empty();

    Workspace ws;
    double f_prev = objective(train, m, cfg.lambda, offset);
    double best_mae = std::numeric_limits<double>::infinity();
    uint32_t best_epoch = 0;
    std::vector<double> best_p, best_q;

    for (uint32_t t = 1; t <= cfg.max_iter; ++t) {
        solve_axis(train.by_user, m.q, m.p, cfg.k, cfg.lambda, offset, train.user_ids, "user", t,
                   ws);
        res.trace.half_sweep_objectives.push_back(objective(train, m, cfg.lambda, offset));
        solve_axis(train.by_item, m.p, m.q, cfg.k, cfg.lambda, offset, train.item_ids, "item", t,
                   ws);
        double f = objective(train, m, cfg.lambda, offset);
        res.trace.half_sweep_objectives.push_back(f);

        double mae = test_mae(data.test, m);
        res.trace.epochs.push_back({t, f, mae});
        if (track_best && mae < best_mae) {
            best_mae = mae;
            best_epoch = t;
            best_p = m.p;
            best_q = m.q;
        }
        double rel = relative_change(f_prev, f);
        f_prev = f;
        if (rel <= cfg.epsilon) {
            res.trace.converged = true;
            break;
        }
    }

    res.trace.selected_epoch = res.trace.epochs.back().epoch;
    if (track_best && best_epoch != 0) {
        m.p = std::move(best_p);
        m.q = std::move(best_q);
        res.trace.selected_epoch = best_epoch;
    }
    return res;
}

double predict_mf(const FactorModel& model, uint32_t u, uint32_t i) {
    if (u >= model.num_users() || i >= model.num_items())
        fail(ErrorKind::Usage, "factor prediction index out of range (user " + std::to_string(u) +
                                   ", item " + std::to_string(i) + ")");
    return model.global_mean + dot_k(&model.p[static_cast<size_t>(u) * model.k],
                                     &model.q[static_cast<size_t>(i) * model.k], model.k);
}

}  // namespace hybridrec
