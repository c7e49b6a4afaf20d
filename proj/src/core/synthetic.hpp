#pragma once

#include "core/dataset.hpp"

namespace hybridrec {

// Which signals drive the generated ratings. PerUser draws a random
// blend of all three per user, giving every predictor family something
// to find.
enum class MixtureProfile { PureBias, PureFactor, PureNeighbor, PerUser };

struct GenParams {
    uint32_t users = 100;
    uint32_t items = 100;
    uint32_t k_true = 2;   // latent rank of the factor signal
    double density = 0.1;  // inclusion probability per (user, item) cell
    double noise_sd = 0.5;
    MixtureProfile mixture = MixtureProfile::PerUser;
    uint64_t seed = 1;
};

struct GeneratedData {
    std::vector<RawRating> train_raw;
    std::vector<RawRating> test_raw;
    Dataset dataset;
};

// Fully deterministic in params. Ratings are
//   clamp(5 + m1*(bias) + m2*(factors) + m3*(item-group affinity) + noise, 0, 10)
// with per-user mixture (m1, m2, m3). Cells are kept with probability
// `density` (same seed + higher density keeps a superset of cells), and
// a tenth of the kept cells become the test split.
GeneratedData generate_synthetic(const GenParams& params);

}  // namespace hybridrec
