#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hybridrec {

enum class ErrorKind {
    Io,        // unreadable/unwritable file
    Parse,     // malformed record or file content
    Range,     // value outside the declared scale
    Config,    // invalid or inconsistent configuration
    Usage,     // caller violated an API precondition
    Solver,    // singular system in a least-squares solve
    Diverged,  // training objective blew up
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

// One record as read from a ratings file. Timestamps are kept for
// duplicate resolution but never used by the models.
struct RawRating {
    std::string user_id;
    std::string item_id;
    double rating = 0.0;
    int64_t timestamp = 0;
};

enum class Axis { User, Item };

enum class SelectBy { MinTestMae, Final };

// Draws doubles from a mt19937_64 stream without going through
// std::uniform_real_distribution, whose output is not pinned by the
// standard. Keeps generated data identical across standard libraries.
inline double unit_uniform(uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

}  // namespace hybridrec
