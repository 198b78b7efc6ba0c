#include "dfp/sim/policy.hpp"

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp::sim {

namespace {

void check(double p, std::string_view name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ProtocolError(ErrorKind::Configuration, fmt::format("{} = {} is not a probability", name, p));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Action verify_and_respond(const Observation& obs) {
    switch (verify_diff(obs.pre_state, obs.diffs, obs.da)) {
    case Verification::Valid: return obs.sampled ? Action::SignOff : Action::Abstain;
    case Verification::Invalid:
    case Verification::DataUnavailable: return Action::Challenge;
    }
    return Action::Abstain;
}

} // namespace

std::string_view to_string(Role role) {
    switch (role) {
    case Role::Operator: return "operator";
    case Role::Challenger: return "challenger";
    case Role::Observer: return "observer";
    }
    return "unknown";
}

std::string_view to_string(Action action) {
    switch (action) {
    case Action::SignOff: return "sign_off";
    case Action::Challenge: return "challenge";
    case Action::Abstain: return "abstain";
    }
    return "unknown";
}

std::string_view policy_name(const NodePolicy& policy) {
    return std::visit(overloaded{
                          [](const HonestOperator&) { return std::string_view("honest_operator"); },
                          [](const FraudulentOperator&) { return std::string_view("fraudulent_operator"); },
                          [](const HonestChallenger&) { return std::string_view("honest_challenger"); },
                          [](const LazyChallenger&) { return std::string_view("lazy_challenger"); },
                          [](const CensoringAdversary&) { return std::string_view("censoring_adversary"); },
                      },
                      policy);
}

void validate_policy(const NodePolicy& policy) {
    std::visit(overloaded{
                   [](const HonestOperator&) {},
                   [](const FraudulentOperator& p) {
                       check(p.p_fraud_attempt, "p_fraud_attempt");
                       check(p.p_detectable, "p_detectable");
                   },
                   [](const HonestChallenger& p) { check(p.p_online, "p_online"); },
                   [](const LazyChallenger& p) { check(p.p_verify, "p_verify"); },
                   [](const CensoringAdversary& p) { check(p.p_suppress, "p_suppress"); },
               },
               policy);
}

Role policy_role(const NodePolicy& policy) {
    return std::visit(overloaded{
                          [](const HonestOperator&) { return Role::Operator; },
                          [](const FraudulentOperator&) { return Role::Operator; },
                          [](const HonestChallenger&) { return Role::Challenger; },
                          [](const LazyChallenger&) { return Role::Challenger; },
                          [](const CensoringAdversary&) { return Role::Observer; },
                      },
                      policy);
}

Action decide_action(const NodePolicy& policy, const Observation& obs, Rng& rng) {
    return std::visit(overloaded{
                          [&](const HonestChallenger& p) {
                              if (!bernoulli(rng, p.p_online))
                                  return Action::Abstain;
                              return verify_and_respond(obs);
                          },
                          [&](const LazyChallenger& p) {
                              if (bernoulli(rng, p.p_verify))
                                  return verify_and_respond(obs);
                              return obs.sampled ? Action::SignOff : Action::Abstain;
                          },
                          [](const auto&) { return Action::Abstain; },
                      },
                      policy);
}

double effective_fraud_probability(double p_attempt, Lamports bond, double slash_fraction, double scale) {
    check(p_attempt, "p_fraud_attempt");
    check(slash_fraction, "slash_fraction");
    if (scale <= 0.0)
        return p_attempt;
    double at_stake = static_cast<double>(bond) * slash_fraction;
    return p_attempt / (1.0 + at_stake / scale);
}

} // namespace dfp::sim
