#include "core/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace hybridrec {
namespace {

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int64(const std::string& s, int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& line, const std::string& sep) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

[[noreturn]] void parse_fail(const std::string& path, size_t line_no, const std::string& what) {
    fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": " + what);
}

RawRating parse_movietweetings_line(const std::string& path, size_t line_no,
                                    const std::string& line) {
    auto fields = split(line, "::");
    if (fields.size() != 4)
        parse_fail(path, line_no, "expected 4 '::'-separated fields, got " +
                                      std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
        parse_fail(path, line_no, "empty user or item id");
    RawRating rec;
    rec.user_id = fields[0];
    rec.item_id = fields[1];
    if (!parse_double(fields[2], rec.rating))
        parse_fail(path, line_no, "non-numeric rating '" + fields[2] + "'");
    if (rec.rating < 0.0 || rec.rating > 10.0)
        fail(ErrorKind::Range, path + ":" + std::to_string(line_no) + ": rating " + fields[2] +
                                   " outside [0, 10]");
    if (!parse_int64(fields[3], rec.timestamp))
        parse_fail(path, line_no, "non-numeric timestamp '" + fields[3] + "'");
    return rec;
}

bool parse_csv_line(const std::string& path, size_t line_no, const std::string& line,
                    bool allow_header, RawRating& rec) {
    auto fields = split(line, ",");
    if (fields.size() != 3 && fields.size() != 4)
        parse_fail(path, line_no,
                   "expected 3 or 4 comma-separated fields, got " + std::to_string(fields.size()));
    if (!parse_double(fields[2], rec.rating)) {
        if (allow_header) return false;  // header row
        parse_fail(path, line_no, "non-numeric rating '" + fields[2] + "'");
    }
    if (fields[0].empty() || fields[1].empty())
        parse_fail(path, line_no, "empty user or item id");
    rec.user_id = fields[0];
    rec.item_id = fields[1];
    rec.timestamp = 0;
    if (fields.size() == 4 && !parse_int64(fields[3], rec.timestamp))
        parse_fail(path, line_no, "non-numeric timestamp '" + fields[3] + "'");
    return true;
}

struct Dedup {
    size_t kept_pos;  // position in the deduplicated list
    int64_t timestamp;
};

// Keeps the record with the latest timestamp per (user, item); pairs stay in
// first-appearance order. Assumes ids were already remapped.
std::vector<Rating> dedup_latest(const std::vector<RawRating>& raw,
                                 const std::unordered_map<std::string, uint32_t>& users,
                                 const std::unordered_map<std::string, uint32_t>& items,
                                 bool drop_unknown, uint64_t* dropped) {
    std::vector<Rating> out;
    std::vector<int64_t> ts;
    std::unordered_map<uint64_t, Dedup> seen;
    out.reserve(raw.size());
    for (const auto& rec : raw) {
        auto ui = users.find(rec.user_id);
        auto ii = items.find(rec.item_id);
        if (ui == users.end() || ii == items.end()) {
            if (!drop_unknown)
                fail(ErrorKind::Usage, "unmapped id in training stream");  // unreachable
            ++*dropped;
            continue;
        }
        uint64_t key = (static_cast<uint64_t>(ui->second) << 32) | ii->second;
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, Dedup{out.size(), rec.timestamp});
            out.push_back({ui->second, ii->second, rec.rating});
            ts.push_back(rec.timestamp);
        } else if (rec.timestamp >= it->second.timestamp) {
            // ties go to the later record in file order
            it->second.timestamp = rec.timestamp;
            out[it->second.kept_pos].value = rec.rating;
        }
    }
    return out;
}

void build_indexes(RatingsTable& t) {
    t.by_user.assign(t.num_users, {});
    t.by_item.assign(t.num_items, {});
    for (const auto& r : t.triples) {
        t.by_user[r.user].push_back({r.item, r.value});
        t.by_item[r.item].push_back({r.user, r.value});
    }
    for (auto& list : t.by_user)
        std::sort(list.begin(), list.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (auto& list : t.by_item)
        std::sort(list.begin(), list.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
}

}  // namespace

const double* RatingsTable::find(uint32_t u, uint32_t i) const {
    if (u >= num_users) return nullptr;
    const auto& list = by_user[u];
    auto it = std::lower_bound(list.begin(), list.end(), i,
                               [](const Entry& e, uint32_t idx) { return e.index < idx; });
    if (it == list.end() || it->index != i) return nullptr;
    return &it->value;
}

std::vector<RawRating> parse_ratings_file(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open ratings file '" + path + "'");
    std::vector<RawRating> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (format == FileFormat::MovieTweetings) {
            records.push_back(parse_movietweetings_line(path, line_no, line));
        } else {
            RawRating rec;
            if (parse_csv_line(path, line_no, line, /*allow_header=*/line_no == 1, rec))
                records.push_back(std::move(rec));
        }
    }
    if (in.bad()) fail(ErrorKind::Io, "read error on '" + path + "'");
    return records;
}

void write_ratings_file(const std::vector<RawRating>& records, const std::string& path,
                        FileFormat format) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    char num[64];
    for (const auto& rec : records) {
        std::snprintf(num, sizeof(num), "%.17g", rec.rating);
        if (format == FileFormat::MovieTweetings) {
            if (rec.rating < 0.0 || rec.rating > 10.0)
                fail(ErrorKind::Range, "rating " + std::string(num) +
                                           " outside [0, 10]; not representable in "
                                           "MovieTweetings format");
            out << rec.user_id << "::" << rec.item_id << "::" << num << "::" << rec.timestamp
                << '\n';
        } else {
            out << rec.user_id << ',' << rec.item_id << ',' << num << ',' << rec.timestamp << '\n';
        }
    }
    if (!out.flush()) fail(ErrorKind::Io, "write error on '" + path + "'");
}

namespace {

Dataset build_train_side(const std::vector<RawRating>& train_raw) {
    if (train_raw.empty()) fail(ErrorKind::Config, "training set is empty");

    Dataset ds;
    RatingsTable& train = ds.train;
    for (const auto& rec : train_raw) {
        if (train.user_index.emplace(rec.user_id, train.num_users).second) {
            train.user_ids.push_back(rec.user_id);
            ++train.num_users;
        }
        if (train.item_index.emplace(rec.item_id, train.num_items).second) {
            train.item_ids.push_back(rec.item_id);
            ++train.num_items;
        }
    }

    uint64_t dropped = 0;
    train.triples = dedup_latest(train_raw, train.user_index, train.item_index,
                                 /*drop_unknown=*/false, &dropped);
    if (train.triples.empty()) fail(ErrorKind::Config, "training set is empty after dedup");
    build_indexes(train);

    RatingsTable& test = ds.test;
    test.num_users = train.num_users;
    test.num_items = train.num_items;
    test.user_ids = train.user_ids;
    test.item_ids = train.item_ids;
    test.user_index = train.user_index;
    test.item_index = train.item_index;
    build_indexes(test);
    return ds;
}

}  // namespace

Dataset build_dataset(const std::vector<RawRating>& train_raw,
                      const std::vector<RawRating>& test_raw) {
    if (test_raw.empty()) fail(ErrorKind::Config, "test set is empty");
    Dataset ds = build_train_side(train_raw);
    ds.test.triples = dedup_latest(test_raw, ds.train.user_index, ds.train.item_index,
                                   /*drop_unknown=*/true, &ds.test_records_pruned);
    build_indexes(ds.test);
    ds.test_empty_after_pruning = ds.test.triples.empty();
    return ds;
}

Dataset build_dataset_train_only(const std::vector<RawRating>& train_raw) {
    Dataset ds = build_train_side(train_raw);
    ds.test_empty_after_pruning = true;
    return ds;
}

}  // namespace hybridrec
