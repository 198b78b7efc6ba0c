#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfp/ledger.hpp"
#include "dfp/protocol.hpp"

namespace dfp {

/// A decoy commitment with a deliberately wrong diff, sent to a set of
/// challengers to catch those who sign without verifying.
struct Probe {
    CommitmentId commitment;
    std::vector<NodeId> targets; // sorted
    TimestampMs issued_at = 0;
    bool assessed = false;

    bool finalizable() const { return false; }
};

struct ProbeResponses {
    std::vector<NodeId> signers;
    std::vector<NodeId> challengers;
};

struct ProbePenalty {
    /// Taken from each lazy signer's challenger bond, clamped to what is escrowed.
    Lamports lazy_slash = 0;
    std::uint32_t reward_share_ppm = kShareScale / 2;
};

/// Corrupts one byte of `honest` (position and mask drawn from `seed`) and opens
/// it as a probe window addressed to `targets`. `da_pointer` should reference the
/// data that reproduces `honest`, so verification exposes the decoy.
Probe issue_probe(ProtocolEngine& engine, DelegationId delegation, std::vector<NodeId> targets,
                  const StateDiff& honest, std::string da_pointer, TimestampMs now, std::uint64_t seed);

/// Sign-offs and challenges the probe window collected.
ProbeResponses collect_probe_responses(const ProtocolEngine& engine, const Probe& probe);

/// Slashes every target that signed the decoy. Rewards come out of those slashes
/// and are dealt round-robin to targets that challenged it; with no challengers
/// the whole slash is burned. Responses from non-targets are ignored.
/// Applies the slashes to `ledger` and returns them. Throws State on a second call.
std::vector<SlashEvent> assess_probe(BondLedger& ledger, Probe& probe, const ProbeResponses& responses,
                                     const ProbePenalty& penalty);

} // namespace dfp
