#include "dfp/sim/report_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace dfp::sim {

std::string summary_json(const SimReport& r, const ConfigOverrides& overrides) {
    nlohmann::ordered_json j;
    auto& prov = j["overrides"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : overrides)
        prov[k] = v;
    j["seed"] = r.seed;
    j["submitted"] = r.submitted;
    j["finalized"] = r.finalized;
    j["reverted"] = r.reverted;
    j["pending"] = r.pending;
    j["deferred"] = r.deferred;
    j["fraud_attempted"] = r.fraud_attempted;
    j["fraud_finalized"] = r.fraud_finalized;
    j["fraud_caught"] = r.fraud_caught;
    j["challenged"] = r.challenged;
    j["challenges_raised"] = r.challenges_raised;
    j["sign_offs_suppressed"] = r.sign_offs_suppressed;
    j["challenges_suppressed"] = r.challenges_suppressed;
    j["probes_issued"] = r.probes_issued;
    j["probe_slashes"] = r.probe_slashes;
    j["latency_ms"] = {{"p50", r.latency.p50}, {"p90", r.latency.p90}, {"max", r.latency.max}};
    auto& hist = j["step_histogram"] = nlohmann::ordered_json::object();
    for (const auto& [step, count] : r.step_histogram)
        hist[std::to_string(step)] = count;
    j["ledger"] = {{"burned", r.burned}, {"total_supply", r.total_supply}};
    j["trace_records"] = r.trace_records;
    j["trace_sha256"] = r.trace_digest;
    return j.dump() + "\n";
}

void write_commitments_csv(std::ostream& out, const SimReport& r) {
    fmt::print(out, "commitment,operator,fraudulent,challenged,status,submitted_at_ms,settled_at_ms,latency_ms,"
                    "final_step,extensions\n");
    for (const auto& c : r.commitments) {
        std::string latency = c.status == "Finalized" ? std::to_string(c.settled_at - c.submitted_at) : "";
        std::string settled = c.settled_at >= 0 ? std::to_string(c.settled_at) : "";
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", c.id, c.operator_id.value, int(c.fraudulent),
                   int(c.challenged), c.status, c.submitted_at, settled, latency, c.final_step, c.extensions);
    }
}

void write_steps_csv(std::ostream& out, const SimReport& r) {
    fmt::print(out, "step,finalized\n");
    for (const auto& [step, count] : r.step_histogram)
        fmt::print(out, "{},{}\n", step, count);
}

void write_ledger_csv(std::ostream& out, const SimReport& r) {
    fmt::print(out, "node,balance,operator_bond,challenger_bond,dispute_bond\n");
    for (const auto& e : r.ledger)
        fmt::print(out, "{},{},{},{},{}\n", e.node.value, e.balance, e.operator_bond, e.challenger_bond,
                   e.dispute_bond);
}

void write_probes_csv(std::ostream& out, const SimReport& r) {
    fmt::print(out, "node,policy,received,signed,challenged,slashes,slashed_amount\n");
    for (const auto& s : r.probe_stats)
        fmt::print(out, "{},{},{},{},{},{},{}\n", s.node.value, s.policy, s.probes_received, s.probes_signed,
                   s.probes_challenged, s.slashes, s.slashed_amount);
}

void write_security_csv(std::ostream& out, std::span<const SecurityReportRow> rows) {
    fmt::print(out, "p_fraud,p_detect_given_fraud,p_window,n_nodes,p_node_challenge,p_participation,p_challenge,"
                    "p_fast_finality,mc_estimate,mc_std_error,mc_trials,agrees_3se\n");
    for (const auto& row : rows) {
        const auto& p = row.params;
        fmt::print(out, "{},{},{},{},{},{},{:.9f},{:.9f},{:.9f},{:.9f},{},{}\n", p.p_fraud, p.p_detect_given_fraud,
                   p.p_window, p.n_nodes, p.p_node_challenge, p.p_participation, row.p_challenge,
                   row.p_fast_finality, row.monte_carlo.estimate, row.monte_carlo.std_error, row.monte_carlo.trials,
                   int(row.agrees));
    }
}

void write_schedule_csv(std::ostream& out, std::span<const ScheduleRow> rows) {
    fmt::print(out, "n,t_ms,t_human,cumulative_ms,cumulative_human,c_raw,c_n\n");
    for (const auto& r : rows)
        fmt::print(out, "{},{},{},{},{},{:.4f},{}\n", r.step, r.window_ms, format_duration(r.window_ms),
                   r.cumulative_ms, format_duration(r.cumulative_ms), r.threshold_raw, r.threshold);
}

void write_schedule_text(std::ostream& out, std::span<const ScheduleRow> rows) {
    fmt::print(out, "{:>4}  {:>16}  {:>10}  {:>16}  {:>10}  {:>10}  {:>6}\n", "n", "t_n (ms)", "t_n", "cumulative (ms)",
               "cumulative", "c_n raw", "c_n");
    for (const auto& r : rows)
        fmt::print(out, "{:>4}  {:>16}  {:>10}  {:>16}  {:>10}  {:>10.4f}  {:>6}\n", r.step, r.window_ms,
                   format_duration(r.window_ms), r.cumulative_ms, format_duration(r.cumulative_ms), r.threshold_raw,
                   r.threshold);
}

} // namespace dfp::sim
