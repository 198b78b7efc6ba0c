#include "dfp/sim/verify.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp::sim {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv(std::uint64_t& h, std::uint8_t b) {
    h ^= b;
    h *= kFnvPrime;
}

std::vector<StateDiff> sorted(std::span<const StateDiff> diffs) {
    std::vector<StateDiff> out(diffs.begin(), diffs.end());
    std::sort(out.begin(), out.end(), [](const StateDiff& a, const StateDiff& b) { return a.account < b.account; });
    return out;
}

} // namespace

std::uint64_t diff_checksum(std::span<const StateDiff> diffs) {
    std::uint64_t h = kFnvOffset;
    for (const auto& d : diffs) {
        for (auto b : d.account.bytes)
            fnv(h, b);
        for (int i = 0; i < 8; ++i)
            fnv(h, static_cast<std::uint8_t>(d.new_version >> (8 * i)));
        for (auto b : d.data)
            fnv(h, b);
        fnv(h, 0xFF);
    }
    return h;
}

ReplayResult replay(std::span<const AccountState> pre_state, const DaRecord& da) {
    std::map<AccountId, AccountState> work;
    for (const auto& s : pre_state)
        work.emplace(s.account, s);
    std::map<AccountId, bool> touched;
    for (const auto& tx : da.transactions) {
        auto it = work.find(tx.account);
        if (it == work.end())
            throw ProtocolError(ErrorKind::Domain,
                                fmt::format("transaction touches account {} outside the bundle", tx.account.to_hex()));
        auto& data = it->second.data;
        if (data.size() < tx.offset + tx.bytes.size())
            data.resize(tx.offset + tx.bytes.size(), 0);
        std::copy(tx.bytes.begin(), tx.bytes.end(), data.begin() + tx.offset);
        touched[tx.account] = true;
    }
    ReplayResult out;
    for (const auto& [account, _] : touched) {
        const auto& s = work.at(account);
        out.diffs.push_back(StateDiff{account, s.data, s.version + 1});
    }
    out.checksum = diff_checksum(out.diffs);
    return out;
}

Verification verify_diff(std::span<const AccountState> pre_state, std::span<const StateDiff> committed,
                         const DaRecord* da) {
    if (!da)
        return Verification::DataUnavailable;
    ReplayResult expected;
    try {
        expected = replay(pre_state, *da);
    } catch (const ProtocolError&) {
        return Verification::Invalid;
    }
    auto claimed = sorted(committed);
    if (diff_checksum(claimed) != expected.checksum)
        return Verification::Invalid;
    bool same = claimed.size() == expected.diffs.size() &&
                std::equal(claimed.begin(), claimed.end(), expected.diffs.begin(), [](const auto& a, const auto& b) {
                    return a.account == b.account && a.new_version == b.new_version && a.data == b.data;
                });
    return same ? Verification::Valid : Verification::Invalid;
}

} // namespace dfp::sim
