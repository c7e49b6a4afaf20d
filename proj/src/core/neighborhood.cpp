#include "core/neighborhood.hpp"

#include <cmath>

namespace hybridrec {

CfModel fit_cf(const RatingsTable& table, const SimilarityParams& params, BaselineMode mode) {
    CfModel model;
    model.bias = fit_bias(table, mode);
    model.store = build_neighbor_store(table, model.bias, params);
    return model;
}

CfPrediction predict_cf(const CfModel& model, const RatingsTable& table, uint32_t user,
                        uint32_t item) {
    const bool item_axis = model.store.params.axis == Axis::Item;
    double base = predict_baseline(model.bias, user, item);
    uint32_t anchor = item_axis ? item : user;
    if (anchor >= model.store.neighbors.size()) return {base, true};

    // Accumulate in stored (rank) order so repeat runs agree bit for bit.
    double num = 0.0;
    double den = 0.0;
    bool any = false;
    for (const Neighbor& n : model.store.neighbors[anchor]) {
        const double* r = item_axis ? table.find(user, n.index) : table.find(n.index, item);
        if (!r) continue;
        double b = item_axis ? predict_baseline(model.bias, user, n.index)
                             : predict_baseline(model.bias, n.index, item);
        num += n.score * (*r - b);
        den += n.score;
        any = true;
    }
    // Similarities may be negative, so the weight sum can cancel to
    // (near) zero even with neighbors present; treat that as no signal.
    if (!any || std::abs(den) < 1e-12) return {base, true};
    return {base + num / den, false};
}

}  // namespace hybridrec
