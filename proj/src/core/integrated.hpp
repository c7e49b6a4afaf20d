#pragma once

#include "core/baseline.hpp"
#include "core/similarity.hpp"
#include "core/trace.hpp"

namespace hybridrec {

enum class IntegratedVersion { V1, V2 };

// How the per-user blend weights are regularized: toward 0, as the
// printed objective does (which biases predictions low at large
// lambda4), or toward 1, keeping the blend near additive.
enum class ARegCenter { Zero, One };

struct SgdConfig {
    uint32_t k = 20;
    uint32_t top_n = 10;
    double lambda1 = 0.1;
    double lambda2 = 0.1;
    double lambda3 = 1.0;
    double lambda4 = 1.0;  // v2 only
    double r1 = 0.002;
    double r2 = 0.005;
    double r3 = 0.002;
    double r4 = 0.002;  // v2 only
    uint32_t max_iter = 100;
    double epsilon = 1e-4;
    uint64_t seed = 0;  // nonzero: shuffle traversal order once, up front
    SelectBy select_by = SelectBy::MinTestMae;
    ARegCenter a_reg_center = ARegCenter::Zero;
};

// The defaults above; the per-user-weighted version trains factors
// faster (r2 = 0.01).
SgdConfig default_sgd_config(IntegratedVersion v);

// Three-term blend: bias baseline + latent factors + weighted neighbor
// deviations, all trained jointly by SGD. The per-user a-weights are
// fixed at 1 in v1 and learned in v2.
struct IntegratedModel {
    IntegratedVersion version = IntegratedVersion::V1;
    uint32_t k = 0;
    double global_mean = 0.0;
    std::vector<double> bu;
    std::vector<double> bi;
    std::vector<double> p;               // num_users x k, row-major
    std::vector<double> q;               // num_items x k, row-major
    std::vector<std::vector<double>> w;  // aligned with store.neighbors
    std::vector<double> a1, a2, a3;
    BiasModel bias;       // frozen; supplies deviations inside the CF term
    NeighborStore store;  // item-axis neighbor lists, frozen before training
};

struct IntegratedResult {
    IntegratedModel model;
    FitTrace trace;
};

// `store` must be item-axis with cfg.top_n; `bias` must be fitted on
// data.train.
IntegratedResult fit_integrated(const Dataset& data, const NeighborStore& store,
                                const BiasModel& bias, const SgdConfig& cfg,
                                IntegratedVersion version);

// Neighbor ratings come from `table` (normally the training table).
double predict_integrated(const IntegratedModel& m, const RatingsTable& table, uint32_t u,
                          uint32_t i);

// Regularized training objective: squared prediction errors plus each
// parameter group's norm scaled by its lambda (a-norms in v2 only).
double integrated_objective(const IntegratedModel& m, const RatingsTable& train,
                            const SgdConfig& cfg);

// One gradient step on a single training pair; returns the pre-update
// error. All parameter groups step from pre-update values using that
// one error. Exposed so tests can compare steps to finite differences.
double sgd_step(IntegratedModel& m, const RatingsTable& train, uint32_t u, uint32_t i, double r,
                const SgdConfig& cfg);

}  // namespace hybridrec
