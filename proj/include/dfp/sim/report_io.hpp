#pragma once

#include <ostream>
#include <span>
#include <string>

#include "dfp/schedule.hpp"
#include "dfp/security.hpp"
#include "dfp/sim/config_io.hpp"
#include "dfp/sim/scenario.hpp"

namespace dfp::sim {

/// One JSON object describing a run; `overrides` are recorded for provenance.
std::string summary_json(const SimReport& report, const ConfigOverrides& overrides);

void write_commitments_csv(std::ostream& out, const SimReport& report);
void write_steps_csv(std::ostream& out, const SimReport& report);
void write_ledger_csv(std::ostream& out, const SimReport& report);
void write_probes_csv(std::ostream& out, const SimReport& report);

void write_security_csv(std::ostream& out, std::span<const SecurityReportRow> rows);

/// CSV with exact ms next to the human rendering, and raw next to floored thresholds.
void write_schedule_csv(std::ostream& out, std::span<const ScheduleRow> rows);

/// Aligned plain-text version of the schedule table.
void write_schedule_text(std::ostream& out, std::span<const ScheduleRow> rows);

} // namespace dfp::sim
