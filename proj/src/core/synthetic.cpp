#include "core/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "core/rng.hpp"

namespace hybridrec {
namespace {

struct Mixture {
    double bias = 0.0;
    double factor = 0.0;
    double neighbor = 0.0;
};

Mixture profile_weights(MixtureProfile p) {
    switch (p) {
        case MixtureProfile::PureBias:
            return {1.0, 0.0, 0.0};
        case MixtureProfile::PureFactor:
            return {0.0, 1.0, 0.0};
        case MixtureProfile::PureNeighbor:
            return {0.0, 0.0, 1.0};
        case MixtureProfile::PerUser:
            break;
    }
    return {};
}

}  // namespace

GeneratedData generate_synthetic(const GenParams& params) {
    if (params.users < 1 || params.items < 1) fail(ErrorKind::Usage, "need at least 1 user and 1 item");
    if (params.k_true < 1) fail(ErrorKind::Usage, "latent rank must be >= 1");
    if (!(params.density > 0.0) || params.density > 1.0)
        fail(ErrorKind::Usage, "density must be in (0, 1]");
    if (params.noise_sd < 0.0) fail(ErrorKind::Usage, "noise_sd must be >= 0");

    const uint32_t m = params.users, n = params.items, kt = params.k_true;
    Rng rng(params.seed);

    // Signal structure. Draw order is fixed; changing one size shifts
    // everything after it, but identical params always reproduce.
    std::vector<double> bu(m), bi(n);
    for (auto& v : bu) v = rng.uniform(-2.0, 2.0);
    for (auto& v : bi) v = rng.uniform(-2.0, 2.0);

    // Factor signal q0[i] + sum_{k>=1} p[u][k]*q[i][k]: the first user
    // direction is constant, so the signal minus any global shift still
    // has rank <= k_true and low-rank fits can recover it exactly.
    std::vector<double> q0(n);
    for (auto& v : q0) v = rng.uniform(-1.5, 1.5);
    std::vector<double> pf(static_cast<size_t>(m) * kt, 0.0);
    std::vector<double> qf(static_cast<size_t>(n) * kt, 0.0);
    for (uint32_t u = 0; u < m; ++u)
        for (uint32_t k = 1; k < kt; ++k) pf[static_cast<size_t>(u) * kt + k] = rng.uniform(-1.0, 1.0);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t k = 1; k < kt; ++k) qf[static_cast<size_t>(i) * kt + k] = rng.uniform(-1.0, 1.0);

    // Neighbor signal: items fall into groups; each user has a per-group
    // affinity, so same-group items co-vary across users.
    const uint32_t n_groups = std::max(2u, n / 15);
    std::vector<double> affinity(static_cast<size_t>(m) * n_groups);
    for (auto& v : affinity) v = rng.uniform(-2.0, 2.0);

    std::vector<Mixture> mix(m, profile_weights(params.mixture));
    if (params.mixture == MixtureProfile::PerUser) {
        for (auto& w : mix) {
            double x1 = rng.uniform(), x2 = rng.uniform(), x3 = rng.uniform();
            double s = x1 + x2 + x3;
            w = s > 0.0 ? Mixture{x1 / s, x2 / s, x3 / s}
                        : Mixture{1.0 / 3, 1.0 / 3, 1.0 / 3};
        }
    }

    // Every cell draws its inclusion uniform and its noise value whether
    // or not it is kept, so the stream position only depends on the cell
    // index: the same seed at a higher density keeps a superset of the
    // cells with identical values, and the noise level never changes
    // which cells exist.
    std::vector<Rating> cells;
    for (uint32_t u = 0; u < m; ++u) {
        for (uint32_t i = 0; i < n; ++i) {
            double d = rng.uniform();
            double noise = rng.gauss();
            if (d >= params.density) continue;
            double factor = q0[i];
            for (uint32_t k = 1; k < kt; ++k)
                factor += pf[static_cast<size_t>(u) * kt + k] * qf[static_cast<size_t>(i) * kt + k];
            double value = 5.0 + mix[u].bias * (bu[u] + bi[i]) + mix[u].factor * factor +
                           mix[u].neighbor * affinity[static_cast<size_t>(u) * n_groups + i % n_groups] +
                           params.noise_sd * noise;
            cells.push_back({u, i, std::clamp(value, 0.0, 10.0)});
        }
    }
    if (cells.empty()) fail(ErrorKind::Config, "density produced no ratings");

    const size_t n_test = cells.size() / 10;
    std::vector<uint32_t> order(cells.size());
    std::iota(order.begin(), order.end(), 0u);
    shuffle_vector(order, rng);
    std::vector<char> is_test(cells.size(), 0);
    for (size_t t = 0; t < n_test; ++t) is_test[order[t]] = 1;

    GeneratedData out;
    int64_t stamp = 0;
    for (size_t c = 0; c < cells.size(); ++c) {
        RawRating rec{"u" + std::to_string(cells[c].user), "i" + std::to_string(cells[c].item),
                      cells[c].value, stamp++};
        (is_test[c] ? out.test_raw : out.train_raw).push_back(std::move(rec));
    }
    out.dataset = out.test_raw.empty() ? build_dataset_train_only(out.train_raw)
                                       : build_dataset(out.train_raw, out.test_raw);
    return out;
}

}  // namespace hybridrec
