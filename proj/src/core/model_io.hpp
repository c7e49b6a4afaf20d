#pragma once

#include "core/evaluate.hpp"

namespace hybridrec {

// Binary model file: magic "HRECMDL1", a u32 algorithm tag, then the
// payload (little-endian u32/f64 fields; layout documented in the
// README). Saving the same model twice produces identical bytes.
void save_model(const TrainedModel& m, const std::string& path);

TrainedModel load_model(const std::string& path);

}  // namespace hybridrec
