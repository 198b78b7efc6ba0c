#include "dfp/probe.hpp"

#include <algorithm>

#include "dfp/error.hpp"
#include "dfp/sim/random.hpp"

namespace dfp {

Probe issue_probe(ProtocolEngine& engine, DelegationId delegation, std::vector<NodeId> targets,
                  const StateDiff& honest, std::string da_pointer, TimestampMs now, std::uint64_t seed) {
    if (targets.empty())
        throw ProtocolError(ErrorKind::Domain, "probe needs at least one target");
    StateDiff decoy = honest;
    sim::Rng rng(seed);
    if (decoy.data.empty()) {
        decoy.data.push_back(static_cast<std::uint8_t>(1 + sim::uniform_below(rng, 255)));
    } else {
        auto pos = sim::uniform_below(rng, decoy.data.size());
        decoy.data[pos] ^= static_cast<std::uint8_t>(1 + sim::uniform_below(rng, 255));
    }
    auto id = engine.open_probe(delegation, std::move(targets), {std::move(decoy)}, std::move(da_pointer), now);
    Probe p;
    p.commitment = id;
    p.targets = engine.window(id).sampled;
    p.issued_at = now;
    return p;
}

ProbeResponses collect_probe_responses(const ProtocolEngine& engine, const Probe& probe) {
    const auto& w = engine.window(probe.commitment);
    return ProbeResponses{{w.sign_offs.begin(), w.sign_offs.end()}, engine.probe_challengers(probe.commitment)};
}

std::vector<SlashEvent> assess_probe(BondLedger& ledger, Probe& probe, const ProbeResponses& responses,
                                     const ProbePenalty& penalty) {
    if (probe.assessed)
        throw ProtocolError(ErrorKind::State, "probe already assessed");
    auto is_target = [&](NodeId n) { return std::binary_search(probe.targets.begin(), probe.targets.end(), n); };

    std::vector<NodeId> detectors;
    for (auto n : responses.challengers)
        if (is_target(n) && std::find(detectors.begin(), detectors.end(), n) == detectors.end())
            detectors.push_back(n);
    std::vector<NodeId> signers;
    for (auto n : responses.signers)
        if (is_target(n) && std::find(signers.begin(), signers.end(), n) == signers.end())
            signers.push_back(n);

    std::vector<SlashEvent> events;
    events.reserve(signers.size());
    for (std::size_t i = 0; i < signers.size(); ++i) {
        SlashEvent e;
        e.party = signers[i];
        e.purpose = BondPurpose::ChallengerBond;
        e.amount = std::min(penalty.lazy_slash, ledger.escrow(signers[i], BondPurpose::ChallengerBond));
        e.reason = SlashReason::LazyProbeFailure;
        if (!detectors.empty()) {
            e.reward_to = detectors[i % detectors.size()];
            e.reward_share_ppm = penalty.reward_share_ppm;
        }
        events.push_back(e);
    }
    for (const auto& e : events)
        ledger.apply_verdict(e);
    probe.assessed = true;
    return events;
}

} // namespace dfp
