#include "dfp/sim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp::sim {

namespace {

void require(bool ok, std::string_view field, std::string_view why) {
    if (!ok)
        throw ProtocolError(ErrorKind::Configuration, fmt::format("{}: {}", field, why));
}

} // namespace

void ScenarioConfig::validate() const {
    require(duration > 0, "duration_ms", "must be positive");
    require(commitment_cadence > 0, "commitment_cadence_ms", "must be positive");
    require(dispute_latency >= 0, "dispute_latency_ms", "must be non-negative");
    require(verification_latency >= 0, "verification_latency_ms", "must be non-negative");
    require(probe_rate >= 0.0 && std::isfinite(probe_rate), "probe_rate", "must be a non-negative number");
    require(p_window_adequate >= 0.0 && p_window_adequate <= 1.0, "p_window_adequate", "must lie in [0, 1]");
    require(accounts_per_operator > 0, "accounts_per_operator", "must be positive");
    require(bundle_size > 0 && bundle_size <= accounts_per_operator, "bundle_size",
            "must be in [1, accounts_per_operator]");
    require(reward_share >= 0.0 && reward_share <= 1.0, "reward_share", "must lie in [0, 1]");
    require(deterrence_scale >= 0.0, "deterrence_scale", "must be non-negative");
    require(bonds.min_challenge_bond > 0, "bonds.min_challenge_bond", "must be positive");
    require(bonds.challenge_bond >= bonds.min_challenge_bond, "bonds.challenge_bond",
            "must be at least bonds.min_challenge_bond");
    require(!population.empty(), "population", "must not be empty");

    std::uint64_t operators = 0, challengers = 0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        const auto& entry = population[i];
        auto field = fmt::format("population[{}]", i);
        require(entry.count > 0, field + ".count", "must be positive");
        try {
            validate_policy(entry.policy);
        } catch (const ProtocolError& e) {
            throw ProtocolError(ErrorKind::Configuration, fmt::format("{}.policy: {}", field, e.what()));
        }
        switch (policy_role(entry.policy)) {
        case Role::Operator:
            operators += entry.count;
            require(entry.balance >= bonds.operator_bond, field + ".balance", "cannot cover bonds.operator_bond");
            break;
        case Role::Challenger:
            challengers += entry.count;
            require(entry.balance >= bonds.challenger_bond, field + ".balance", "cannot cover bonds.challenger_bond");
            break;
        case Role::Observer: break;
        }
    }
    require(operators > 0, "population", "needs at least one operator");
    require(challengers >= schedule.c0, "population",
            fmt::format("{} challengers cannot meet schedule.c0 = {}", challengers, schedule.c0));
    try {
        schedule.validate();
    } catch (const ProtocolError& e) {
        throw ProtocolError(ErrorKind::Configuration, fmt::format("schedule: {}", e.what()));
    }
}

DurationMs percentile(std::vector<DurationMs> values, double q) {
    if (values.empty())
        return 0;
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

} // namespace dfp::sim
