#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dfp/sim/scenario.hpp"

namespace dfp::sim {

enum class EventKind : std::uint8_t {
    SubmitCommitment,
    ProbeIssued,
    Observe,
    SignOff,
    RaiseChallenge,
    WindowDeadline,
    DisputeVerdictArrives,
};

/// Queue entry. Processed in (at, seq) order; seq is the insertion counter.
struct WorldEvent {
    TimestampMs at = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::SubmitCommitment;
    std::uint64_t commitment = 0;
    NodeId node;
    std::uint64_t challenge = 0;
    std::size_t operator_index = 0;
};

/// A protocol or report invariant failed. Not recoverable: it means a bug.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::uint64_t trace_position, const std::string& what)
        : std::runtime_error(what), trace_position_(trace_position) {}
    /// Number of trace records written before the violation was detected.
    std::uint64_t trace_position() const noexcept { return trace_position_; }

private:
    std::uint64_t trace_position_;
};

struct RunOptions {
    /// Receives every trace line as it is produced (not owned).
    std::ostream* trace_sink = nullptr;
    /// Keep trace records in memory and copy them into the report.
    bool retain_trace = false;
};

/// Runs one seeded scenario to config.duration in virtual time.
/// Identical configs produce identical traces and reports.
/// Throws ProtocolError(Configuration) for an invalid config and
/// InvariantViolation if a safety or accounting check fails mid-run.
SimReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Checks report-level invariants (counts add up, no fraud counted twice).
/// Throws InvariantViolation.
void check_report(const SimReport& report);

} // namespace dfp::sim
