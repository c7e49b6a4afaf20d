#include "core/baseline.hpp"

namespace hybridrec {

BiasModel fit_bias(const RatingsTable& table, BaselineMode mode) {
    if (table.empty()) fail(ErrorKind::Config, "cannot fit bias model on an empty table");
    BiasModel bias;
    bias.mode = mode;

    double sum = 0.0;
    for (const auto& r : table.triples) sum += r.value;
    bias.global_mean = sum / static_cast<double>(table.size());

    bias.user_mean.assign(table.num_users, bias.global_mean);
    for (uint32_t u = 0; u < table.num_users; ++u) {
        const auto& list = table.by_user[u];
        if (list.empty()) continue;
        double s = 0.0;
        for (const auto& e : list) s += e.value;
        bias.user_mean[u] = s / static_cast<double>(list.size());
    }
    bias.item_mean.assign(table.num_items, bias.global_mean);
    for (uint32_t i = 0; i < table.num_items; ++i) {
        const auto& list = table.by_item[i];
        if (list.empty()) continue;
        double s = 0.0;
        for (const auto& e : list) s += e.value;
        bias.item_mean[i] = s / static_cast<double>(list.size());
    }
    return bias;
}

double predict_baseline(const BiasModel& bias, uint32_t u, uint32_t i) {
    double user_mean = u < bias.user_mean.size() ? bias.user_mean[u] : bias.global_mean;
    double item_mean = i < bias.item_mean.size() ? bias.item_mean[i] : bias.global_mean;
    if (bias.mode == BaselineMode::MeanSum) return bias.global_mean + user_mean + item_mean;
    return bias.global_mean + (user_mean - bias.global_mean) + (item_mean - bias.global_mean);
}

}  // namespace hybridrec
