#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfp/ledger.hpp"
#include "dfp/schedule.hpp"
#include "dfp/sim/policy.hpp"
#include "dfp/trace.hpp"

namespace dfp::sim {

/// A group of identical nodes. Ids are assigned in file order starting at 1.
struct PopulationEntry {
    std::string label;
    NodePolicy policy;
    std::uint32_t count = 1;
    Lamports balance = 0;
};

struct BondConfig {
    Lamports operator_bond = 1'000'000;
    Lamports challenger_bond = 10'000;
    Lamports min_challenge_bond = 100;
    /// Amount a challenger escrows when raising a challenge.
    Lamports challenge_bond = 100;
    Lamports operator_slash = 100'000;
    Lamports lazy_slash = 1'000;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    DurationMs duration = 60'000;
    std::vector<PopulationEntry> population;
    FinalitySchedule schedule;
    DurationMs commitment_cadence = 1'000;
    DurationMs dispute_latency = 200;
    DurationMs verification_latency = 0;
    /// Probes per real commitment; the fractional part is a Bernoulli draw.
    double probe_rate = 0.0;
    /// Chance that challengers finish verifying a commitment before its first deadline.
    double p_window_adequate = 1.0;
    std::uint32_t accounts_per_operator = 16;
    std::uint32_t bundle_size = 1;
    BondConfig bonds;
    double reward_share = 0.5;
    /// Operator deterrence scale, see effective_fraud_probability. 0 disables it.
    double deterrence_scale = 0.0;

    /// Throws Configuration naming the offending field.
    void validate() const;
};

struct LatencySummary {
    DurationMs p50 = 0;
    DurationMs p90 = 0;
    DurationMs max = 0;
};

struct CommitmentOutcome {
    std::uint64_t id = 0;
    NodeId operator_id;
    bool fraudulent = false;
    bool challenged = false;
    std::string status;
    TimestampMs submitted_at = 0;
    TimestampMs settled_at = -1;
    std::uint32_t final_step = 0;
    std::uint32_t extensions = 0;
};

/// Counts over probes that were assessed before the run ended.
struct NodeProbeStats {
    NodeId node;
    std::string policy;
    std::uint64_t probes_received = 0;
    std::uint64_t probes_signed = 0;
    std::uint64_t probes_challenged = 0;
    std::uint64_t slashes = 0;
    Lamports slashed_amount = 0;
};

struct SimReport {
    std::uint64_t seed = 0;
    std::uint64_t submitted = 0;
    std::uint64_t finalized = 0;
    std::uint64_t reverted = 0;
    std::uint64_t pending = 0;
    std::uint64_t deferred = 0;
    std::uint64_t fraud_attempted = 0;
    std::uint64_t fraud_finalized = 0;
    std::uint64_t fraud_caught = 0;
    std::uint64_t challenged = 0;
    std::uint64_t challenges_raised = 0;
    std::uint64_t sign_offs_suppressed = 0;
    std::uint64_t challenges_suppressed = 0;
    std::uint64_t probes_issued = 0;
    std::uint64_t probe_slashes = 0;
    LatencySummary latency;
    std::vector<DurationMs> latencies; // finalized commitments, submission order
    std::map<std::uint32_t, std::uint64_t> step_histogram;
    std::vector<CommitmentOutcome> commitments;
    std::vector<NodeProbeStats> probe_stats;
    std::vector<LedgerEntry> ledger;
    Lamports burned = 0;
    Lamports total_supply = 0;
    std::uint64_t trace_records = 0;
    std::string trace_digest;
    /// Filled only when RunOptions::retain_trace is set.
    std::vector<TraceRecord> trace;
};

/// Nearest-rank percentile of a non-empty sample (q in (0, 1]).
DurationMs percentile(std::vector<DurationMs> values, double q);

} // namespace dfp::sim
