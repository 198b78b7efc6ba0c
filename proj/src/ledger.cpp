#include "dfp/ledger.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp {

std::string_view to_string(BondPurpose purpose) {
    switch (purpose) {
    case BondPurpose::OperatorBond: return "operator_bond";
    case BondPurpose::ChallengerBond: return "challenger_bond";
    case BondPurpose::DisputeBond: return "dispute_bond";
    }
    return "unknown";
}

std::string_view to_string(SlashReason reason) {
    switch (reason) {
    case SlashReason::FraudProven: return "fraud_proven";
    case SlashReason::FalseChallenge: return "false_challenge";
    case SlashReason::LazyProbeFailure: return "lazy_probe_failure";
    }
    return "unknown";
}

std::uint32_t share_from_fraction(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ProtocolError(ErrorKind::Configuration, fmt::format("share {} outside [0, 1]", fraction));
    return static_cast<std::uint32_t>(std::llround(fraction * kShareScale));
}

void BondLedger::mint(NodeId party, Lamports amount) {
    if (total_supply_ > std::numeric_limits<Lamports>::max() - amount)
        throw ProtocolError(ErrorKind::Amount, "total supply overflow");
    balances_[party] += amount;
    total_supply_ += amount;
}

void BondLedger::post_bond(NodeId party, Lamports amount, BondPurpose purpose) {
    if (amount == 0)
        throw ProtocolError(ErrorKind::Bond, "bonds must be positive");
    auto it = balances_.find(party);
    if (it == balances_.end() || it->second < amount)
        throw ProtocolError(ErrorKind::Funds, fmt::format("node {} cannot post {} lamports (balance {})", party.value,
                                                          amount, balance(party)));
    it->second -= amount;
    escrow_[{party, purpose}] += amount;
}

void BondLedger::release_bond(NodeId party, Lamports amount, BondPurpose purpose) {
    auto it = escrow_.find({party, purpose});
    if (it == escrow_.end() || it->second < amount)
        throw ProtocolError(ErrorKind::Amount, fmt::format("node {} has less than {} in {}", party.value, amount,
                                                           to_string(purpose)));
    it->second -= amount;
    balances_[party] += amount;
}

SlashOutcome BondLedger::apply_verdict(const SlashEvent& slash) {
    if (slash.reward_share_ppm > kShareScale)
        throw ProtocolError(ErrorKind::Amount, "reward share above 1");
    if (!slash.reward_to && slash.reward_share_ppm != 0)
        throw ProtocolError(ErrorKind::Amount, "reward share without a recipient");
    auto it = escrow_.find({slash.party, slash.purpose});
    Lamports available = it == escrow_.end() ? 0 : it->second;
    if (slash.amount > available)
        throw ProtocolError(ErrorKind::Amount, fmt::format("slash of {} exceeds escrow {} of node {}", slash.amount,
                                                           available, slash.party.value));
    SlashOutcome out;
    out.rewarded = static_cast<Lamports>(static_cast<unsigned __int128>(slash.amount) * slash.reward_share_ppm /
                                         kShareScale);
    out.burned = slash.amount - out.rewarded;
    if (slash.amount == 0)
        return out;
    it->second -= slash.amount;
    if (out.rewarded)
        balances_[*slash.reward_to] += out.rewarded;
    burned_ += out.burned;
    return out;
}

Lamports BondLedger::balance(NodeId party) const {
    auto it = balances_.find(party);
    return it == balances_.end() ? 0 : it->second;
}

Lamports BondLedger::escrow(NodeId party, BondPurpose purpose) const {
    auto it = escrow_.find({party, purpose});
    return it == escrow_.end() ? 0 : it->second;
}

Lamports BondLedger::sum_balances() const {
    Lamports sum = 0;
    for (const auto& [_, v] : balances_)
        sum += v;
    return sum;
}

Lamports BondLedger::sum_escrow() const {
    Lamports sum = 0;
    for (const auto& [_, v] : escrow_)
        sum += v;
    return sum;
}

bool BondLedger::conserved() const {
    return sum_balances() + sum_escrow() + burned_ == total_supply_;
}

std::vector<LedgerEntry> BondLedger::snapshot() const {
    std::map<NodeId, LedgerEntry> rows;
    for (const auto& [node, v] : balances_) {
        rows[node].node = node;
        rows[node].balance = v;
    }
    for (const auto& [key, v] : escrow_) {
        auto& row = rows[key.first];
        row.node = key.first;
        switch (key.second) {
        case BondPurpose::OperatorBond: row.operator_bond = v; break;
        case BondPurpose::ChallengerBond: row.challenger_bond = v; break;
        case BondPurpose::DisputeBond: row.dispute_bond = v; break;
        }
    }
    std::vector<LedgerEntry> out;
    out.reserve(rows.size());
    for (auto& [_, row] : rows)
        out.push_back(row);
    return out;
}

} // namespace dfp
