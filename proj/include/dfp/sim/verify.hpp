#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dfp/protocol.hpp"

namespace dfp::sim {

/// Toy transaction: overwrite `bytes` at `offset` in an account's data,
/// growing the data with zeros if needed.
struct BytePatch {
    AccountId account;
    std::uint32_t offset = 0;
    Bytes bytes;
};

/// What the operator publishes for a commitment so anyone can re-execute it.
struct DaRecord {
    std::vector<BytePatch> transactions;
};

using DaStore = std::map<std::string, DaRecord>;

enum class Verification : std::uint8_t { Valid, Invalid, DataUnavailable };

struct ReplayResult {
    std::vector<StateDiff> diffs; // sorted by account
    std::uint64_t checksum = 0;
};

/// Deterministic state transition: applies the patches in order over
/// `pre_state` and emits one diff per touched account (version + 1).
/// Throws Domain if a patch targets an account missing from `pre_state`.
ReplayResult replay(std::span<const AccountState> pre_state, const DaRecord& da);

/// FNV-1a over (account, version, data) of each diff, in account order.
std::uint64_t diff_checksum(std::span<const StateDiff> diffs);

/// Re-executes the published transactions and compares with the committed
/// diff. A null `da` means the data is unavailable.
Verification verify_diff(std::span<const AccountState> pre_state, std::span<const StateDiff> committed,
                         const DaRecord* da);

} // namespace dfp::sim
