#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <variant>

#include "dfp/sim/random.hpp"
#include "dfp/sim/verify.hpp"

namespace dfp::sim {

enum class Role : std::uint8_t { Operator, Challenger, Observer };

std::string_view to_string(Role role);

struct HonestOperator {};

struct FraudulentOperator {
    double p_fraud_attempt = 0.0;
    /// Chance that a fraud is exposed by re-execution. The rest forge the
    /// published transactions so the bad diff replays cleanly.
    double p_detectable = 1.0;
};

struct HonestChallenger {
    double p_online = 1.0;
};

/// Signs without checking unless it draws a verification (p_verify).
struct LazyChallenger {
    double p_verify = 0.0;
};

/// Drops sign-off and/or challenge messages while its budget lasts and the
/// target window is below `until_step`.
struct CensoringAdversary {
    double p_suppress = 1.0;
    std::uint64_t budget = 0;
    bool sign_offs = true;
    bool challenges = false;
    std::uint32_t until_step = std::numeric_limits<std::uint32_t>::max();
};

using NodePolicy = std::variant<HonestOperator, FraudulentOperator, HonestChallenger, LazyChallenger, CensoringAdversary>;

std::string_view policy_name(const NodePolicy& policy);

/// Throws Configuration for probabilities outside [0, 1].
void validate_policy(const NodePolicy& policy);

/// The role a policy belongs to.
Role policy_role(const NodePolicy& policy);

enum class Action : std::uint8_t { SignOff, Challenge, Abstain };

std::string_view to_string(Action action);

/// What a node sees of a commitment or probe; the two are indistinguishable here.
struct Observation {
    std::span<const AccountState> pre_state;
    std::span<const StateDiff> diffs;
    const DaRecord* da = nullptr;
    bool sampled = false;
};

Action decide_action(const NodePolicy& policy, const Observation& observation, Rng& rng);

/// Operator-side deterrence: the attempt probability shrinks as the amount at
/// stake (bond * slash_fraction) grows relative to `scale`. A zero scale
/// disables deterrence. Non-increasing in bond and in slash_fraction.
double effective_fraud_probability(double p_attempt, Lamports bond, double slash_fraction, double scale);

} // namespace dfp::sim
