#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/types.hpp"

namespace hybridrec {

struct Rating {
    uint32_t user = 0;
    uint32_t item = 0;
    double value = 0.0;
};

// One entry of a per-user or per-item index: the opposite-axis id plus the rating.
struct Entry {
    uint32_t index = 0;
    double value = 0.0;
};

enum class FileFormat { MovieTweetings, Csv };

// Sparse rating store over dense internal ids. by_user/by_item are
// re-indexings of triples, each list sorted by the opposite-axis id.
struct RatingsTable {
    uint32_t num_users = 0;
    uint32_t num_items = 0;
    std::vector<Rating> triples;
    std::vector<std::vector<Entry>> by_user;
    std::vector<std::vector<Entry>> by_item;
    std::vector<std::string> user_ids;  // internal -> external
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, uint32_t> user_index;  // external -> internal
    std::unordered_map<std::string, uint32_t> item_index;

    size_t size() const { return triples.size(); }
    bool empty() const { return triples.empty(); }

    // Rating of (u, i), or nullptr when the pair is absent.
    const double* find(uint32_t u, uint32_t i) const;
};

// Train plus test over the training universe. Every user and item in
// test also appears in train; records that broke that rule were pruned.
struct Dataset {
    RatingsTable train;
    RatingsTable test;
    uint64_t test_records_pruned = 0;
    bool test_empty_after_pruning = false;
};

std::vector<RawRating> parse_ratings_file(const std::string& path, FileFormat format);

void write_ratings_file(const std::vector<RawRating>& records, const std::string& path,
                        FileFormat format);

// Remaps ids (assigned by first appearance in the training stream),
// resolves duplicate (user, item) pairs in favor of the latest
// timestamp, and drops test records whose user or item is unknown
// to the training set.
Dataset build_dataset(const std::vector<RawRating>& train_raw,
                      const std::vector<RawRating>& test_raw);

// Same, for runs that train without held-out data: the test table is
// empty but shares the training universe.
Dataset build_dataset_train_only(const std::vector<RawRating>& train_raw);

}  // namespace hybridrec
