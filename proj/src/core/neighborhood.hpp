#pragma once

#include "core/baseline.hpp"
#include "core/similarity.hpp"

namespace hybridrec {

// Neighborhood collaborative filtering: the bias estimate plus a
// similarity-weighted average of neighbor deviations from their own
// bias estimates. Works on either axis; the store decides which.
struct CfModel {
    BiasModel bias;
    NeighborStore store;
};

struct CfPrediction {
    double value = 0.0;
    bool fallback = false;  // no usable neighbor; value is the bias estimate
};

CfModel fit_cf(const RatingsTable& table, const SimilarityParams& params,
               BaselineMode mode = BaselineMode::Offsets);

// Neighbor ratings are looked up in `table` (normally the training table).
CfPrediction predict_cf(const CfModel& model, const RatingsTable& table, uint32_t user,
                        uint32_t item);

}  // namespace hybridrec
