#include "dfp/schedule.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp {

namespace mp = boost::multiprecision;

namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ProtocolError(ErrorKind::Configuration, fmt::format("cannot parse {} from '{}'", what, text));
    return value;
}

void check_step(std::uint32_t step, const FinalitySchedule& schedule) {
    if (step > schedule.max_step)
        throw ProtocolError(ErrorKind::ScheduleExhausted,
                            fmt::format("step {} exceeds max_step {}", step, schedule.max_step));
}

mp::cpp_rational threshold_exact(std::uint32_t step, const FinalitySchedule& s) {
    mp::cpp_int num = mp::pow(mp::cpp_int(s.r_c.num), step) * s.c0;
    mp::cpp_int den = mp::pow(mp::cpp_int(s.r_c.den), step);
    return mp::cpp_rational(num, den);
}

} // namespace

Ratio Ratio::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Ratio r{parse_u64(text.substr(0, slash), "ratio numerator"), parse_u64(text.substr(slash + 1), "ratio denominator")};
        if (r.den == 0)
            throw ProtocolError(ErrorKind::Configuration, fmt::format("zero denominator in '{}'", text));
        auto g = std::gcd(r.num, r.den);
        return g ? Ratio{r.num / g, r.den / g} : r;
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (frac.size() > 18)
        throw ProtocolError(ErrorKind::Configuration, fmt::format("too many decimal places in '{}'", text));
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i)
        den *= 10;
    std::uint64_t w = whole.empty() ? 0 : parse_u64(whole, "ratio");
    std::uint64_t f = frac.empty() ? 0 : parse_u64(frac, "ratio");
    if (whole.empty() && frac.empty())
        throw ProtocolError(ErrorKind::Configuration, fmt::format("cannot parse ratio from '{}'", text));
    if (w > std::numeric_limits<std::uint64_t>::max() / den)
        throw ProtocolError(ErrorKind::Configuration, fmt::format("ratio '{}' out of range", text));
    std::uint64_t num = w * den + f;
    auto g = std::gcd(num, den);
    return g ? Ratio{num / g, den / g} : Ratio{0, 1};
}

std::string Ratio::to_string() const {
    return den == 1 ? fmt::format("{}", num) : fmt::format("{}/{}", num, den);
}

void FinalitySchedule::validate() const {
    if (t0 <= 0)
        throw ProtocolError(ErrorKind::Configuration, "t0 must be positive");
    if (r_t <= 1)
        throw ProtocolError(ErrorKind::Configuration, "r_t must be greater than 1");
    if (r_c.den == 0 || r_c.num == 0 || r_c.num > r_c.den)
        throw ProtocolError(ErrorKind::Configuration, "r_c must lie in (0, 1]");
    mp::cpp_int last = mp::pow(mp::cpp_int(r_t), max_step) * t0;
    if (last > std::numeric_limits<DurationMs>::max() / 2)
        throw ProtocolError(ErrorKind::Configuration,
                            fmt::format("t0 * r_t^{} overflows the millisecond clock", max_step));
}

DurationMs window_duration(std::uint32_t step, const FinalitySchedule& schedule) {
    check_step(step, schedule);
    DurationMs t = schedule.t0;
    for (std::uint32_t i = 0; i < step; ++i) {
        if (t > std::numeric_limits<DurationMs>::max() / static_cast<DurationMs>(schedule.r_t))
            throw ProtocolError(ErrorKind::Configuration, "window duration overflows");
        t *= static_cast<DurationMs>(schedule.r_t);
    }
    return t;
}

std::uint64_t required_challengers(std::uint32_t step, const FinalitySchedule& schedule) {
    check_step(step, schedule);
    auto exact = threshold_exact(step, schedule);
    mp::cpp_int floored = mp::numerator(exact) / mp::denominator(exact);
    return floored.convert_to<std::uint64_t>();
}

double required_challengers_raw(std::uint32_t step, const FinalitySchedule& schedule) {
    check_step(step, schedule);
    return threshold_exact(step, schedule).convert_to<double>();
}

std::vector<ScheduleRow> schedule_table(const FinalitySchedule& schedule) {
    schedule.validate();
    std::vector<ScheduleRow> rows;
    rows.reserve(schedule.max_step + 1);
    DurationMs cumulative = 0;
    for (std::uint32_t n = 0; n <= schedule.max_step; ++n) {
        ScheduleRow row;
        row.step = n;
        row.window_ms = window_duration(n, schedule);
        cumulative += row.window_ms;
        row.cumulative_ms = cumulative;
        row.threshold_raw = required_challengers_raw(n, schedule);
        row.threshold = required_challengers(n, schedule);
        rows.push_back(row);
    }
    return rows;
}

std::string format_duration(DurationMs ms) {
    constexpr double second = 1000.0, minute = 60 * second, hour = 60 * minute, day = 24 * hour;
    auto v = static_cast<double>(ms);
    if (ms < 1000)
        return fmt::format("{} ms", ms);
    if (v < minute)
        return fmt::format("{:.2f} s", v / second);
    if (v < hour)
        return fmt::format("{:.2f} min", v / minute);
    if (v < day)
        return fmt::format("{:.2f} h", v / hour);
    return fmt::format("{:.2f} d", v / day);
}

} // namespace dfp
