#pragma once

#include <vector>

#include "dfp/protocol.hpp"
#include "dfp/sim/scenario.hpp"

namespace dfp::testing {

inline FinalitySchedule reference_schedule() {
    return FinalitySchedule{500, 4, 100, Ratio{7, 10}, 10};
}

inline std::vector<NodeId> node_range(std::uint32_t first, std::uint32_t count) {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < count; ++i)
        out.push_back(NodeId{first + i});
    return out;
}

/// Next-version diff that writes `data` into `account`.
inline StateDiff diff_for(const ProtocolEngine& engine, const AccountId& account, Bytes data) {
    return StateDiff{account, std::move(data), engine.account(account).version + 1};
}

/// 1 honest operator + `challengers` always-online honest challengers.
inline sim::ScenarioConfig honest_scenario(std::uint64_t seed, std::uint32_t challengers = 100) {
    sim::ScenarioConfig c;
    c.seed = seed;
    c.duration = 20'000;
    c.schedule = reference_schedule();
    c.commitment_cadence = 1'000;
    c.population.push_back({"operator", sim::HonestOperator{}, 1, 10'000'000});
    c.population.push_back({"verifiers", sim::HonestChallenger{1.0}, challengers, 100'000});
    return c;
}

} // namespace dfp::testing
