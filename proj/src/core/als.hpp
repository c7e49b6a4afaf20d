#pragma once

#include "core/dataset.hpp"
#include "core/trace.hpp"

namespace hybridrec {

enum class FactorInit {
    Constant,       // every entry = init_value
    SeededUniform,  // entries ~ uniform(0, init_value), from cfg.seed
};

// Which value the least-squares solves regress on. The prediction is
// always global_mean + p·q; fitting raw ratings instead of residuals
// is kept as a study knob (it biases predictions high by the mean).
enum class AlsTargets { Residual, Raw };

struct AlsConfig {
    uint32_t k = 20;
    double lambda = 10.0;
    uint32_t max_iter = 100;
    double epsilon = 1e-4;
    double init_value = 0.0;  // <= 0 means 1/k
    FactorInit init = FactorInit::Constant;
    uint64_t seed = 0;
    AlsTargets targets = AlsTargets::Residual;
    SelectBy select_by = SelectBy::MinTestMae;
};

struct FactorModel {
    uint32_t k = 0;
    double global_mean = 0.0;
    std::vector<double> p;  // num_users x k, row-major
    std::vector<double> q;  // num_items x k, row-major

    uint32_t num_users() const { return k ? static_cast<uint32_t>(p.size() / k) : 0; }
    uint32_t num_items() const { return k ? static_cast<uint32_t>(q.size() / k) : 0; }
};

struct AlsResult {
    FactorModel model;
    FitTrace trace;
};

AlsResult fit_als(const Dataset& data, const AlsConfig& cfg);

double predict_mf(const FactorModel& model, uint32_t u, uint32_t i);

}  // namespace hybridrec
