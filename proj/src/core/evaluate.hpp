#pragma once

#include <string>
#include <utility>
#include <variant>

#include "core/als.hpp"
#include "core/integrated.hpp"
#include "core/neighborhood.hpp"

namespace hybridrec {

enum class Algo { Baseline, CfUser, CfItem, MfAls, CfMfV1, CfMfV2 };

const char* algo_name(Algo a);
Algo algo_from_name(const std::string& name);

// Union of every model family knob; each algorithm reads its own slice.
struct ExperimentConfig {
    Algo algo = Algo::Baseline;
    BaselineMode baseline_mode = BaselineMode::Offsets;
    // neighbor lists
    double shrink = 100.0;
    uint32_t top_n = 10;
    // factors
    uint32_t k = 20;
    // alternating least squares
    double lambda = 10.0;
    AlsTargets als_targets = AlsTargets::Residual;
    FactorInit als_init = FactorInit::Constant;
    double init_value = 0.0;  // <= 0 means 1/k
    // joint SGD models
    double lambda1 = 0.1;
    double lambda2 = 0.1;
    double lambda3 = 1.0;
    double lambda4 = 1.0;
    double r1 = 0.002;
    double r2 = 0.005;
    double r3 = 0.002;
    double r4 = 0.002;
    ARegCenter a_reg_center = ARegCenter::Zero;
    // shared training knobs
    uint32_t max_iter = 100;
    double epsilon = 1e-4;
    uint64_t seed = 0;
    SelectBy select_by = SelectBy::MinTestMae;
    bool clamp = false;  // clamp predictions to [0, 10] at evaluation
};

// Per-algorithm defaults (the per-user-weighted blend trains factors
// at r2 = 0.01; everything else matches the struct initializers).
ExperimentConfig default_config(Algo a);

using TrainedModel = std::variant<BiasModel, CfModel, FactorModel, IntegratedModel>;

Algo model_algo(const TrainedModel& m);

struct Prediction {
    double value = 0.0;
    bool fallback = false;
};

// Dispatch on the model kind; `table` supplies neighbor ratings.
Prediction predict_any(const TrainedModel& m, const RatingsTable& table, uint32_t u, uint32_t i);

// Mean absolute error over (predicted, actual) pairs.
double mae(const std::vector<std::pair<double, double>>& pairs);

struct EvalReport {
    Algo algo = Algo::Baseline;
    bool has_params = true;  // false for loaded models: no config to echo
    ExperimentConfig params;
    double mae = 0.0;      // NaN when there was no test data
    double coverage = 1.0;  // fraction of test pairs predicted without fallback
    double wall_time = 0.0;  // seconds spent training
    std::vector<EpochStat> per_epoch;
    bool converged = false;
    uint32_t selected_epoch = 0;
    uint64_t train_size = 0;
    uint64_t test_size = 0;
};

// Timings are opt-in so that repeat runs serialize byte-identically.
std::string report_to_json(const EvalReport& r, bool include_timings);

struct ExperimentResult {
    TrainedModel model;
    EvalReport report;
};

TrainedModel train_model(const Dataset& data, const ExperimentConfig& cfg, FitTrace* trace_out);

// Train + predict every test pair. Test data is required.
ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& cfg);

struct EvalSummary {
    double mae = 0.0;
    double coverage = 1.0;
};

EvalSummary evaluate_model(const TrainedModel& m, const Dataset& data, bool clamp);

enum class SweepAxis { N, K };

struct SweepSpec {
    SweepAxis axis = SweepAxis::N;
    std::vector<uint32_t> values;  // strictly increasing, positive
    ExperimentConfig base;         // held constant except the swept knob
};

struct SweepRow {
    Algo algo = Algo::Baseline;
    SweepAxis axis = SweepAxis::N;
    uint32_t value = 0;
    double mae = 0.0;
    double wall_time = 0.0;
};

// One row per (algorithm, value), algorithms outermost, in given order.
// jobs > 1 runs cells concurrently; results are identical either way.
std::vector<SweepRow> run_sweep(const Dataset& data, const SweepSpec& spec,
                                const std::vector<Algo>& algos, unsigned jobs = 1);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace hybridrec
