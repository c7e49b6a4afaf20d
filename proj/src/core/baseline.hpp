#pragma once

#include <vector>

#include "core/dataset.hpp"

namespace hybridrec {

// The baseline combines the global mean with per-user and per-item
// deviations: b(u,i) = r + (r_u - r) + (r_i - r). MeanSum is the
// literal sum-of-means variant b(u,i) = r + r_u + r_i, kept as a
// study knob; on a 0-10 scale it lands near twice the ratings.
enum class BaselineMode { Offsets, MeanSum };

struct BiasModel {
    double global_mean = 0.0;
    std::vector<double> user_mean;  // entities with no ratings hold global_mean
    std::vector<double> item_mean;
    BaselineMode mode = BaselineMode::Offsets;

    double user_offset(uint32_t u) const {
        return u < user_mean.size() ? user_mean[u] - global_mean : 0.0;
    }
    double item_offset(uint32_t i) const {
        return i < item_mean.size() ? item_mean[i] - global_mean : 0.0;
    }
};

BiasModel fit_bias(const RatingsTable& table, BaselineMode mode = BaselineMode::Offsets);

// Unclamped. Indices beyond the table are treated as cold entities.
double predict_baseline(const BiasModel& bias, uint32_t u, uint32_t i);

}  // namespace hybridrec
