#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dfp/types.hpp"

namespace dfp {

/// Exact non-negative rational, used for the challenger decay factor so that
/// thresholds are computed without floating point drift.
struct Ratio {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    /// Accepts "0.7", "1", "7/10". Throws ProtocolError(Configuration) on garbage.
    static Ratio parse(std::string_view text);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
    }
};

/// Parameters of the dynamic challenge window.
///
/// Window length grows as t0 * r_t^n and the sign-off threshold decays as
/// floor(c0 * r_c^n). r_t is restricted to integers so every window length is
/// an exact number of milliseconds.
struct FinalitySchedule {
    DurationMs t0 = 500;
    std::uint64_t r_t = 4;
    std::uint64_t c0 = 100;
    Ratio r_c{7, 10};
    std::uint32_t max_step = 10;

    /// Throws ProtocolError(Configuration) if t0 <= 0, r_t <= 1, r_c outside
    /// (0, 1], or if t0 * r_t^max_step does not fit in a signed 64-bit ms count.
    void validate() const;
};

/// t_n in ms. Throws ScheduleExhausted when step > max_step.
DurationMs window_duration(std::uint32_t step, const FinalitySchedule& schedule);

/// floor(c0 * r_c^n), evaluated exactly. Throws ScheduleExhausted when step > max_step.
std::uint64_t required_challengers(std::uint32_t step, const FinalitySchedule& schedule);

/// c0 * r_c^n before flooring (reporting only, never used for decisions).
double required_challengers_raw(std::uint32_t step, const FinalitySchedule& schedule);

struct ScheduleRow {
    std::uint32_t step = 0;
    DurationMs window_ms = 0;
    DurationMs cumulative_ms = 0;
    double threshold_raw = 0.0;
    std::uint64_t threshold = 0;
};

/// One row per step 0..max_step. cumulative_ms is the sum of window lengths
/// through that step, i.e. time from submission to that step's deadline when
/// every extension happens exactly at the previous deadline.
std::vector<ScheduleRow> schedule_table(const FinalitySchedule& schedule);

/// Renders a duration for humans ("500 ms", "2.00 s", "6.07 d").
std::string format_duration(DurationMs ms);

} // namespace dfp
