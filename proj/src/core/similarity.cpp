#include "core/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace hybridrec {
namespace {

struct PairSums {
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    uint32_t count = 0;
};

double score_from_sums(const PairSums& s, double shrink) {
    if (s.count == 0 || s.norm_a == 0.0 || s.norm_b == 0.0) return 0.0;
    double cosine = s.dot / (std::sqrt(s.norm_a) * std::sqrt(s.norm_b));
    cosine = std::clamp(cosine, -1.0, 1.0);
    return cosine * (static_cast<double>(s.count) / (static_cast<double>(s.count) + shrink));
}

// Entity views: the entity list (who rated it / what they rated) plus
// the opposite-axis means used for centering.
struct AxisView {
    const std::vector<std::vector<Entry>>* lists;    // per entity
    const std::vector<std::vector<Entry>>* inverse;  // per opposite-axis id
    const std::vector<double>* center;               // opposite-axis means
    uint32_t count;
};

AxisView make_view(const RatingsTable& table, const BiasModel& bias, Axis axis) {
    if (axis == Axis::Item)
        return {&table.by_item, &table.by_user, &bias.user_mean, table.num_items};
    return {&table.by_user, &table.by_item, &bias.item_mean, table.num_users};
}

void check_index(uint32_t e, const AxisView& view, const char* what) {
    if (e >= view.count)
        fail(ErrorKind::Usage,
             std::string(what) + " index " + std::to_string(e) + " out of range [0, " +
                 std::to_string(view.count) + ")");
}

bool neighbor_order(const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
}

}  // namespace

double pair_similarity(uint32_t a, uint32_t b, const RatingsTable& table, const BiasModel& bias,
                       const SimilarityParams& params) {
    AxisView view = make_view(table, bias, params.axis);
    check_index(a, view, "entity");
    check_index(b, view, "entity");
    if (a == b) fail(ErrorKind::Usage, "pair_similarity requires two distinct entities");

    const auto& la = (*view.lists)[a];
    const auto& lb = (*view.lists)[b];
    PairSums sums;
    // merge on the shared axis; both lists are sorted by it
    size_t ia = 0, ib = 0;
    while (ia < la.size() && ib < lb.size()) {
        if (la[ia].index < lb[ib].index) {
            ++ia;
        } else if (lb[ib].index < la[ia].index) {
            ++ib;
        } else {
            double mean = (*view.center)[la[ia].index];
            double ca = la[ia].value - mean;
            double cb = lb[ib].value - mean;
            sums.dot += ca * cb;
            sums.norm_a += ca * ca;
            sums.norm_b += cb * cb;
            ++sums.count;
            ++ia;
            ++ib;
        }
    }
    return score_from_sums(sums, params.shrink);
}

NeighborStore build_neighbor_store(const RatingsTable& table, const BiasModel& bias,
                                   const SimilarityParams& params) {
    if (table.empty()) fail(ErrorKind::Usage, "cannot build neighbor lists on an empty table");
    AxisView view = make_view(table, bias, params.axis);

    NeighborStore store;
    store.params = params;
    store.neighbors.resize(view.count);

    // One entity row at a time via the inverted index. Sums accumulate in
    // ascending opposite-axis order, exactly as the pairwise merge does.
    std::vector<PairSums> row(view.count);
    std::vector<uint32_t> touched;
    std::vector<Neighbor> candidates;
    for (uint32_t a = 0; a < view.count; ++a) {
        touched.clear();
        for (const auto& ea : (*view.lists)[a]) {
            double mean = (*view.center)[ea.index];
            double ca = ea.value - mean;
            for (const auto& eb : (*view.inverse)[ea.index]) {
                uint32_t b = eb.index;
                if (b == a) continue;
                double cb = eb.value - mean;
                PairSums& s = row[b];
                if (s.count == 0) touched.push_back(b);
                s.dot += ca * cb;
                s.norm_a += ca * ca;
                s.norm_b += cb * cb;
                ++s.count;
            }
        }
        candidates.clear();
        for (uint32_t b : touched) {
            double score = score_from_sums(row[b], params.shrink);
            row[b] = PairSums{};
            if (score != 0.0) candidates.push_back({b, score});
        }
        // touched order follows the scan, so sort by index first for a
        // deterministic tie-break, then take the top N by score.
        std::sort(candidates.begin(), candidates.end(), neighbor_order);
        if (candidates.size() > params.top_n) candidates.resize(params.top_n);
        store.neighbors[a] = candidates;
    }
    return store;
}

void save_neighbor_store(const NeighborStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    char buf[32];
    for (size_t e = 0; e < store.neighbors.size(); ++e) {
        for (const auto& n : store.neighbors[e]) {
            std::snprintf(buf, sizeof(buf), "%.9g", n.score);
            out << e << '\t' << n.index << '\t' << buf << '\n';
        }
    }
    if (!out.flush()) fail(ErrorKind::Io, "write error on '" + path + "'");
}

NeighborStore load_neighbor_store(const std::string& path, const SimilarityParams& params,
                                  size_t num_entities) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open neighbor cache '" + path + "'");
    NeighborStore store;
    store.params = params;
    store.neighbors.resize(num_entities);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        uint64_t entity = 0, neighbor = 0;
        double score = 0.0;
        const char* p = line.data();
        const char* end = p + line.size();
        auto r1 = std::from_chars(p, end, entity);
        if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != '\t')
            fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": malformed line");
        auto r2 = std::from_chars(r1.ptr + 1, end, neighbor);
        if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != '\t')
            fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": malformed line");
        auto r3 = std::from_chars(r2.ptr + 1, end, score);
        if (r3.ec != std::errc() || r3.ptr != end || !std::isfinite(score))
            fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": bad score");
        if (entity >= num_entities || neighbor >= num_entities || entity == neighbor)
            fail(ErrorKind::Parse,
                 path + ":" + std::to_string(line_no) + ": entity index out of range");
        auto& list = store.neighbors[entity];
        if (list.size() >= params.top_n)
            fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": more than top_n=" +
                                       std::to_string(params.top_n) + " neighbors for entity " +
                                       std::to_string(entity));
        list.push_back({static_cast<uint32_t>(neighbor), score});
    }
    for (const auto& list : store.neighbors) {
        for (size_t k = 1; k < list.size(); ++k)
            if (neighbor_order(list[k], list[k - 1]))
                fail(ErrorKind::Parse, path + ": neighbor list out of order");
    }
    return store;
}

}  // namespace hybridrec
