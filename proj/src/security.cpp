#include "dfp/security.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "dfp/error.hpp"
#include "dfp/sim/random.hpp"

namespace dfp {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ProtocolError(ErrorKind::Domain, fmt::format("{} = {} is not a probability", name, p));
}

bool run_trial(const SecurityParams& p, std::uint64_t seed, std::uint64_t trial) {
    sim::SplitMix64 gen(sim::derive_seed(seed, trial));
    if (!sim::bernoulli(gen, p.p_fraud))
        return false;
    if (!sim::bernoulli(gen, p.p_detect_given_fraud))
        return false;
    if (!sim::bernoulli(gen, p.p_window))
        return false;
    bool any = false;
    for (std::uint64_t i = 0; i < p.n_nodes; ++i)
        any |= sim::bernoulli(gen, p.p_node_challenge);
    return any;
}

} // namespace

void SecurityParams::validate() const {
    check_probability(p_fraud, "p_fraud");
    check_probability(p_detect_given_fraud, "p_detect_given_fraud");
    check_probability(p_window, "p_window");
    check_probability(p_node_challenge, "p_node_challenge");
    check_probability(p_participation, "p_participation");
}

double p_at_least_one_challenge(double p_node_challenge, std::uint64_t n_nodes) {
    check_probability(p_node_challenge, "p_node_challenge");
    if (n_nodes == 0 || p_node_challenge == 0.0)
        return 0.0;
    if (p_node_challenge == 1.0)
        return 1.0;
    // -expm1(n log1p(-p)) keeps precision when p is small
    return -std::expm1(static_cast<double>(n_nodes) * std::log1p(-p_node_challenge));
}

double p_challenge(const SecurityParams& params) {
    params.validate();
    return params.p_fraud * params.p_detect_given_fraud * params.p_window *
           p_at_least_one_challenge(params.p_node_challenge, params.n_nodes);
}

double p_fast_finality(const SecurityParams& params) {
    return 1.0 - p_challenge(params);
}

MonteCarloEstimate monte_carlo_p_challenge(const SecurityParams& params, std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads) {
    params.validate();
    if (trials == 0)
        throw ProtocolError(ErrorKind::Domain, "Monte Carlo needs at least one trial");
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

    std::vector<std::uint64_t> counts(threads, 0);
    auto work = [&](unsigned t) {
        std::uint64_t begin = trials * t / threads, end = trials * (t + 1) / threads, n = 0;
        for (auto i = begin; i < end; ++i)
            n += run_trial(params, seed, i);
        counts[t] = n;
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
    }

    MonteCarloEstimate out;
    out.trials = trials;
    for (auto c : counts)
        out.events += c;
    out.estimate = static_cast<double>(out.events) / static_cast<double>(trials);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
    return out;
}

bool agrees_within(const MonteCarloEstimate& mc, double closed_form, double k) {
    double se = mc.std_error;
    if (se == 0.0)
        se = std::sqrt(closed_form * (1.0 - closed_form) / static_cast<double>(mc.trials));
    return std::abs(mc.estimate - closed_form) <= k * se;
}

SettlementAnalysis expected_settlement_time(const FinalitySchedule& schedule,
                                            std::span<const double> p_meet_threshold_per_step) {
    schedule.validate();
    if (p_meet_threshold_per_step.size() > static_cast<std::size_t>(schedule.max_step) + 1)
        throw ProtocolError(ErrorKind::Domain, "more step probabilities than schedule steps");
    for (double p : p_meet_threshold_per_step)
        check_probability(p, "p_meet_threshold");

    SettlementAnalysis out;
    double survive = 1.0;
    DurationMs cumulative = 0;
    for (std::size_t k = 0; k < p_meet_threshold_per_step.size(); ++k) {
        cumulative += window_duration(static_cast<std::uint32_t>(k), schedule);
        double mass = survive * p_meet_threshold_per_step[k];
        out.finality_mass.push_back(mass);
        out.expected_settled_ms += mass * static_cast<double>(cumulative);
        survive *= 1.0 - p_meet_threshold_per_step[k];
    }
    out.unsettled_mass = survive;
    return out;
}

SecurityReportRow security_report(const SecurityParams& params, std::uint64_t trials, std::uint64_t seed) {
    SecurityReportRow row;
    row.params = params;
    row.p_challenge = p_challenge(params);
    row.p_fast_finality = p_fast_finality(params);
    row.monte_carlo = monte_carlo_p_challenge(params, trials, seed);
    row.agrees = agrees_within(row.monte_carlo, row.p_challenge);
    return row;
}

} // namespace dfp
