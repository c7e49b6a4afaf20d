#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/baseline.hpp"
#include "core/dataset.hpp"

namespace hybridrec {

struct SimilarityParams {
    double shrink = 100.0;
    uint32_t top_n = 10;
    Axis axis = Axis::Item;
};

struct Neighbor {
    uint32_t index = 0;
    double score = 0.0;
};

// Per-entity top-N neighbor lists, scores descending, ties broken by
// lower index. Pairs whose score is exactly zero are not stored.
struct NeighborStore {
    SimilarityParams params;
    std::vector<std::vector<Neighbor>> neighbors;

    size_t num_entities() const { return neighbors.size(); }
};

// Shrunk mean-centered cosine between two users (centered by item
// means) or two items (centered by user means). Zero when the
// co-rating set is empty or either centered vector has zero norm.
double pair_similarity(uint32_t a, uint32_t b, const RatingsTable& table, const BiasModel& bias,
                       const SimilarityParams& params);

NeighborStore build_neighbor_store(const RatingsTable& table, const BiasModel& bias,
                                   const SimilarityParams& params);

// Text cache: one "entity<TAB>neighbor<TAB>score" line per stored pair,
// scores printed with 9 significant digits.
void save_neighbor_store(const NeighborStore& store, const std::string& path);
NeighborStore load_neighbor_store(const std::string& path, const SimilarityParams& params,
                                  size_t num_entities);

}  // namespace hybridrec
