#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dfp {

/// Virtual time in integer milliseconds.
using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;

/// Integer currency unit. There is no fractional currency.
using Lamports = std::uint64_t;

using Bytes = std::vector<std::uint8_t>;

/// Opaque 32-byte account identifier.
struct AccountId {
    std::array<std::uint8_t, 32> bytes{};

    /// Deterministic identifier for the i-th account of a world.
    static AccountId from_index(std::uint64_t index);

    std::string to_hex() const;

    auto operator<=>(const AccountId&) const = default;
};

struct NodeId {
    std::uint32_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct DelegationId {
    std::uint64_t value = 0;
    auto operator<=>(const DelegationId&) const = default;
};

struct CommitmentId {
    std::uint64_t value = 0;
    auto operator<=>(const CommitmentId&) const = default;
};

struct ChallengeId {
    std::uint64_t value = 0;
    auto operator<=>(const ChallengeId&) const = default;
};

} // namespace dfp

template <>
struct std::hash<dfp::AccountId> {
    std::size_t operator()(const dfp::AccountId& id) const noexcept {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t); ++i)
            h = (h << 8) | id.bytes[i];
        return h;
    }
};

template <>
struct std::hash<dfp::NodeId> {
    std::size_t operator()(const dfp::NodeId& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
