#pragma once

#include <cstdint>
#include <vector>

namespace hybridrec {

// One completed training epoch (ALS full sweep or SGD pass).
struct EpochStat {
    uint32_t epoch = 0;      // 1-based
    double objective = 0.0;  // regularized training objective after the epoch
    double test_mae = 0.0;   // NaN when the test set is empty
};

struct FitTrace {
    std::vector<EpochStat> epochs;
    // ALS only: objective after each half sweep (user pass, item pass, ...).
    std::vector<double> half_sweep_objectives;
    bool converged = false;
    uint32_t selected_epoch = 0;  // epoch whose parameters the model kept
};

}  // namespace hybridrec
