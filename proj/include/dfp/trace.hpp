#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dfp/types.hpp"

namespace dfp {

/// One protocol transition. Serialized as a single JSON object per line with a
/// fixed key order so identical runs produce identical bytes.
struct TraceRecord {
    std::uint64_t seq = 0;
    TimestampMs at = 0;
    std::string kind;
    std::uint64_t commitment = 0;
    std::uint32_t step = 0;
    std::uint64_t sign_offs = 0;
    std::uint64_t required = 0;
    std::string status;
    std::optional<NodeId> node;

    std::string to_line() const;
};

/// Append-only transition log with a running SHA-256 over the serialized lines.
class TraceLog {
public:
    explicit TraceLog(bool retain = true);
    ~TraceLog();
    TraceLog(TraceLog&&) noexcept;
    TraceLog& operator=(TraceLog&&) noexcept;

    /// Also write every line to `sink` (not owned; must outlive the log or be detached).
    void attach(std::ostream* sink) { sink_ = sink; }

    /// Assigns the next sequence number and returns it.
    std::uint64_t append(TraceRecord record);

    std::uint64_t size() const { return next_seq_; }
    const std::vector<TraceRecord>& records() const { return records_; }
    bool retains() const { return retain_; }

    /// Hex SHA-256 of all lines appended so far (each terminated by '\n').
    std::string digest_hex() const;

private:
    struct Hasher;
    std::unique_ptr<Hasher> hasher_;
    std::ostream* sink_ = nullptr;
    bool retain_;
    std::uint64_t next_seq_ = 0;
    std::vector<TraceRecord> records_;
};

} // namespace dfp
