#include "core/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "json.hpp"

namespace hybridrec {
namespace {

const char* kAlgoNames[] = {"baseline", "cf_user", "cf_item", "mf_als", "cf_mf_v1", "cf_mf_v2"};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

AlsConfig als_config(const ExperimentConfig& cfg) {
    AlsConfig a;
    a.k = cfg.k;
    a.lambda = cfg.lambda;
    a.max_iter = cfg.max_iter;
    a.epsilon = cfg.epsilon;
    a.init_value = cfg.init_value;
    a.init = cfg.als_init;
    a.seed = cfg.seed;
    a.targets = cfg.als_targets;
    a.select_by = cfg.select_by;
    return a;
}

SgdConfig sgd_config(const ExperimentConfig& cfg) {
    SgdConfig s;
    s.k = cfg.k;
    s.top_n = cfg.top_n;
    s.lambda1 = cfg.lambda1;
    s.lambda2 = cfg.lambda2;
    s.lambda3 = cfg.lambda3;
    s.lambda4 = cfg.lambda4;
    s.r1 = cfg.r1;
    s.r2 = cfg.r2;
    s.r3 = cfg.r3;
    s.r4 = cfg.r4;
    s.max_iter = cfg.max_iter;
    s.epsilon = cfg.epsilon;
    s.seed = cfg.seed;
    s.select_by = cfg.select_by;
    s.a_reg_center = cfg.a_reg_center;
    return s;
}

const char* select_by_name(SelectBy s) {
    return s == SelectBy::MinTestMae ? "min-test-mae" : "final";
}

nlohmann::ordered_json params_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["baseline_mode"] = c.baseline_mode == BaselineMode::Offsets ? "offsets" : "mean-sum";
    j["shrink"] = c.shrink;
    j["top_n"] = c.top_n;
    j["k"] = c.k;
    j["lambda"] = c.lambda;
    j["als_targets"] = c.als_targets == AlsTargets::Residual ? "residual" : "raw";
    j["als_init"] = c.als_init == FactorInit::Constant ? "constant" : "seeded-uniform";
    j["init_value"] = c.init_value;
    j["lambda1"] = c.lambda1;
    j["lambda2"] = c.lambda2;
    j["lambda3"] = c.lambda3;
    j["lambda4"] = c.lambda4;
    j["r1"] = c.r1;
    j["r2"] = c.r2;
    j["r3"] = c.r3;
    j["r4"] = c.r4;
    j["a_reg_center"] = c.a_reg_center == ARegCenter::Zero ? "zero" : "one";
    j["max_iter"] = c.max_iter;
    j["epsilon"] = c.epsilon;
    j["seed"] = c.seed;
    j["select_by"] = select_by_name(c.select_by);
    j["clamp"] = c.clamp;
    return j;
}

}  // namespace

const char* algo_name(Algo a) { return kAlgoNames[static_cast<int>(a)]; }

Algo algo_from_name(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kAlgoNames[i]) return static_cast<Algo>(i);
    fail(ErrorKind::Usage,
         "unknown algorithm '" + name +
             "' (expected baseline, cf_user, cf_item, mf_als, cf_mf_v1, or cf_mf_v2)");
}

ExperimentConfig default_config(Algo a) {
    ExperimentConfig cfg;
    cfg.algo = a;
    if (a == Algo::CfMfV2) cfg.r2 = 0.01;
    return cfg;
}

Algo model_algo(const TrainedModel& m) {
    struct Visitor {
        Algo operator()(const BiasModel&) const { return Algo::Baseline; }
        Algo operator()(const CfModel& c) const {
            return c.store.params.axis == Axis::Item ? Algo::CfItem : Algo::CfUser;
        }
        Algo operator()(const FactorModel&) const { return Algo::MfAls; }
        Algo operator()(const IntegratedModel& i) const {
            return i.version == IntegratedVersion::V1 ? Algo::CfMfV1 : Algo::CfMfV2;
        }
    };
    return std::visit(Visitor{}, m);
}

Prediction predict_any(const TrainedModel& m, const RatingsTable& table, uint32_t u, uint32_t i) {
    struct Visitor {
        const RatingsTable& table;
        uint32_t u, i;
        Prediction operator()(const BiasModel& b) const {
            return {predict_baseline(b, u, i), false};
        }
        Prediction operator()(const CfModel& c) const {
            CfPrediction p = predict_cf(c, table, u, i);
            return {p.value, p.fallback};
        }
        Prediction operator()(const FactorModel& f) const { return {predict_mf(f, u, i), false}; }
        Prediction operator()(const IntegratedModel& im) const {
            return {predict_integrated(im, table, u, i), false};
        }
    };
    return std::visit(Visitor{table, u, i}, m);
}

double mae(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) fail(ErrorKind::Usage, "mae needs at least one prediction");
    double sum = 0.0;
    for (const auto& [predicted, actual] : pairs) sum += std::abs(predicted - actual);
    return sum / static_cast<double>(pairs.size());
}

TrainedModel train_model(const Dataset& data, const ExperimentConfig& cfg, FitTrace* trace_out) {
    if (trace_out) *trace_out = {};
    switch (cfg.algo) {
        case Algo::Baseline:
            return fit_bias(data.train, cfg.baseline_mode);
        case Algo::CfUser:
        case Algo::CfItem: {
            SimilarityParams sp{cfg.shrink, cfg.top_n,
                                cfg.algo == Algo::CfItem ? Axis::Item : Axis::User};
            return fit_cf(data.train, sp, cfg.baseline_mode);
        }
        case Algo::MfAls: {
            AlsResult res = fit_als(data, als_config(cfg));
            if (trace_out) *trace_out = std::move(res.trace);
            return std::move(res.model);
        }
        case Algo::CfMfV1:
        case Algo::CfMfV2: {
            BiasModel bias = fit_bias(data.train, cfg.baseline_mode);
            NeighborStore store =
                build_neighbor_store(data.train, bias, {cfg.shrink, cfg.top_n, Axis::Item});
            IntegratedResult res =
                fit_integrated(data, store, bias, sgd_config(cfg),
                               cfg.algo == Algo::CfMfV1 ? IntegratedVersion::V1
                                                        : IntegratedVersion::V2);
            if (trace_out) *trace_out = std::move(res.trace);
            return std::move(res.model);
        }
    }
    fail(ErrorKind::Usage, "unknown algorithm");
}

EvalSummary evaluate_model(const TrainedModel& m, const Dataset& data, bool clamp) {
    if (data.test.empty()) fail(ErrorKind::Usage, "no test pairs to evaluate");
    double sum = 0.0;
    uint64_t covered = 0;
    for (const Rating& r : data.test.triples) {
        Prediction p = predict_any(m, data.train, r.user, r.item);
        double value = clamp ? std::clamp(p.value, 0.0, 10.0) : p.value;
        sum += std::abs(value - r.value);
        if (!p.fallback) ++covered;
    }
    double n = static_cast<double>(data.test.size());
    return {sum / n, static_cast<double>(covered) / n};
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
    if (data.test.empty()) fail(ErrorKind::Usage, "experiment needs a nonempty test set");
    ExperimentResult res;
    EvalReport& rep = res.report;
    rep.algo = cfg.algo;
    rep.params = cfg;
    rep.train_size = data.train.size();
    rep.test_size = data.test.size();

    auto start = std::chrono::steady_clock::now();
    FitTrace trace;
    res.model = train_model(data, cfg, &trace);
    rep.wall_time = seconds_since(start);
    rep.per_epoch = std::move(trace.epochs);
    rep.converged = trace.converged;
    rep.selected_epoch = trace.selected_epoch;

    EvalSummary s = evaluate_model(res.model, data, cfg.clamp);
    rep.mae = s.mae;
    rep.coverage = s.coverage;
    return res;
}

std::string report_to_json(const EvalReport& r, bool include_timings) {
    nlohmann::ordered_json j;
    j["algorithm"] = algo_name(r.algo);
    if (r.has_params) j["params"] = params_to_json(r.params);
    j["train_size"] = r.train_size;
    j["test_size"] = r.test_size;
    if (!std::isnan(r.mae)) {
        j["mae"] = r.mae;
        j["coverage"] = r.coverage;
    }
    if (!r.per_epoch.empty()) {
        j["converged"] = r.converged;
        j["selected_epoch"] = r.selected_epoch;
        auto& epochs = j["per_epoch"] = nlohmann::ordered_json::array();
        for (const EpochStat& e : r.per_epoch) {
            nlohmann::ordered_json row;
            row["epoch"] = e.epoch;
            row["objective"] = e.objective;
            if (!std::isnan(e.test_mae)) row["test_mae"] = e.test_mae;
            epochs.push_back(std::move(row));
        }
    }
    if (include_timings) j["wall_time_s"] = r.wall_time;
    return j.dump(2) + "\n";
}

std::vector<SweepRow> run_sweep(const Dataset& data, const SweepSpec& spec,
                                const std::vector<Algo>& algos, unsigned jobs) {
    if (algos.empty()) fail(ErrorKind::Usage, "sweep needs at least one algorithm");
    if (spec.values.empty()) fail(ErrorKind::Usage, "sweep needs at least one value");
    for (size_t i = 0; i < spec.values.size(); ++i) {
        if (spec.values[i] == 0) fail(ErrorKind::Usage, "sweep values must be positive");
        if (i > 0 && spec.values[i] <= spec.values[i - 1])
            fail(ErrorKind::Usage, "sweep values must be strictly increasing");
    }
    if (data.test.empty()) fail(ErrorKind::Usage, "sweep needs a nonempty test set");

    struct Cell {
        Algo algo;
        uint32_t value;
    };
    std::vector<Cell> cells;
    for (Algo a : algos)
        for (uint32_t v : spec.values) cells.push_back({a, v});

    auto run_cell = [&](const Cell& c) -> SweepRow {
        ExperimentConfig cfg = spec.base;
        cfg.algo = c.algo;
        (spec.axis == SweepAxis::N ? cfg.top_n : cfg.k) = c.value;
        auto start = std::chrono::steady_clock::now();
        ExperimentResult res = run_experiment(data, cfg);
        return {c.algo, spec.axis, c.value, res.report.mae, seconds_since(start)};
    };

    std::vector<SweepRow> rows(cells.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(cells[i]);
        return rows;
    }
    for (size_t batch = 0; batch < cells.size(); batch += jobs) {
        size_t end = std::min(batch + static_cast<size_t>(jobs), cells.size());
        std::vector<std::future<SweepRow>> futures;
        for (size_t i = batch; i < end; ++i)
            futures.push_back(std::async(std::launch::async, run_cell, std::cref(cells[i])));
        for (size_t i = batch; i < end; ++i) rows[i] = futures[i - batch].get();
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "algorithm,axis,value,mae,wall_time_s\n";
    char buf[160];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%u,%.17g,%.6f\n", algo_name(r.algo),
                      r.axis == SweepAxis::N ? "N" : "K", r.value, r.mae, r.wall_time);
        out += buf;
    }
    return out;
}

}  // namespace hybridrec
