#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "dfp/types.hpp"

namespace dfp {

enum class BondPurpose : std::uint8_t { OperatorBond, ChallengerBond, DisputeBond };

enum class SlashReason : std::uint8_t { FraudProven, FalseChallenge, LazyProbeFailure };

std::string_view to_string(BondPurpose purpose);
std::string_view to_string(SlashReason reason);

/// Shares are expressed in parts per million so the split is exact integer math.
inline constexpr std::uint32_t kShareScale = 1'000'000;

/// Converts a fraction in [0, 1] to parts per million. Throws Configuration outside the range.
std::uint32_t share_from_fraction(double fraction);

struct SlashEvent {
    NodeId party;
    BondPurpose purpose = BondPurpose::OperatorBond;
    Lamports amount = 0;
    SlashReason reason = SlashReason::FraudProven;
    std::optional<NodeId> reward_to;
    std::uint32_t reward_share_ppm = 0;

    std::uint32_t burn_share_ppm() const { return kShareScale - reward_share_ppm; }
};

struct SlashOutcome {
    Lamports rewarded = 0;
    Lamports burned = 0;
};

struct LedgerEntry {
    NodeId node;
    Lamports balance = 0;
    Lamports operator_bond = 0;
    Lamports challenger_bond = 0;
    Lamports dispute_bond = 0;
};

/// Balances, escrowed bonds and burned funds.
///
/// sum(balances) + sum(escrow) + burned == total_supply after every call;
/// a call that would break this throws before touching anything.
class BondLedger {
public:
    /// Genesis allocation. The only operation that changes total_supply.
    void mint(NodeId party, Lamports amount);

    void post_bond(NodeId party, Lamports amount, BondPurpose purpose);
    void release_bond(NodeId party, Lamports amount, BondPurpose purpose);

    /// Removes slash.amount from the party's escrow; floor(amount * share) goes to
    /// reward_to and the remainder is burned.
    SlashOutcome apply_verdict(const SlashEvent& slash);

    Lamports balance(NodeId party) const;
    Lamports escrow(NodeId party, BondPurpose purpose) const;
    Lamports burned() const { return burned_; }
    Lamports total_supply() const { return total_supply_; }

    Lamports sum_balances() const;
    Lamports sum_escrow() const;
    bool conserved() const;

    /// One entry per known node, ordered by node id.
    std::vector<LedgerEntry> snapshot() const;

private:
    std::map<NodeId, Lamports> balances_;
    std::map<std::pair<NodeId, BondPurpose>, Lamports> escrow_;
    Lamports burned_ = 0;
    Lamports total_supply_ = 0;
};

} // namespace dfp
