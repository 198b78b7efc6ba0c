#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfp/schedule.hpp"

namespace dfp {

/// Inputs of the challenge-probability model. P(R) is carried for reporting
/// and simulator policies; it is not a factor of P(E).
struct SecurityParams {
    double p_fraud = 0.0;              // P(F)
    double p_detect_given_fraud = 0.0; // P(D|F)
    double p_window = 1.0;             // P(T)
    std::uint64_t n_nodes = 0;         // N
    double p_node_challenge = 0.0;     // P(C_i)
    double p_participation = 1.0;      // P(R)

    /// Throws Domain when a probability lies outside [0, 1] or is NaN.
    void validate() const;
};

/// 1 - (1 - p)^n. Zero for n == 0.
double p_at_least_one_challenge(double p_node_challenge, std::uint64_t n_nodes);

/// P(E) = P(F) * P(D|F) * P(T) * [1 - (1 - P(C_i))^N]
double p_challenge(const SecurityParams& params);

/// 1 - P(E): the share of commitments that settle at the first deadline.
double p_fast_finality(const SecurityParams& params);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t events = 0;
};

/// Simulates the gates independently per trial. Trial i draws from a stream
/// seeded by (seed, i), so the result does not depend on `threads`.
MonteCarloEstimate monte_carlo_p_challenge(const SecurityParams& params, std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads = 0);

/// True when |estimate - closed_form| <= k standard errors. A zero sample
/// standard error (all trials agreed) falls back to the closed-form binomial one.
bool agrees_within(const MonteCarloEstimate& mc, double closed_form, double k = 3.0);

struct SettlementAnalysis {
    /// Sum over steps of (probability of settling there) * (time from submission to that deadline).
    double expected_settled_ms = 0.0;
    std::vector<double> finality_mass;
    /// Probability of still being unsettled after the last listed step.
    double unsettled_mass = 0.0;
};

/// Combines window lengths with per-step probabilities of meeting the
/// sign-off threshold, assuming each extension starts at the previous deadline.
SettlementAnalysis expected_settlement_time(const FinalitySchedule& schedule,
                                            std::span<const double> p_meet_threshold_per_step);

struct SecurityReportRow {
    SecurityParams params;
    double p_challenge = 0.0;
    double p_fast_finality = 0.0;
    MonteCarloEstimate monte_carlo;
    bool agrees = true;
};

/// Closed form plus Monte Carlo check for one parameter set.
SecurityReportRow security_report(const SecurityParams& params, std::uint64_t trials, std::uint64_t seed);

} // namespace dfp
