// Command line front end: run scenarios, evaluate the security model, print schedules.
//
// Exit codes: 0 success, 1 I/O failure, 2 bad input (the message names the
// field), 3 invariant violation during a run.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dfp/error.hpp"
#include "dfp/schedule.hpp"
#include "dfp/security.hpp"
#include "dfp/sim/config_io.hpp"
#include "dfp/sim/report_io.hpp"
#include "dfp/sim/simulator.hpp"

namespace fs = std::filesystem;
using namespace dfp;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInput = 2;
constexpr int kExitInvariant = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepAxis {
    std::string name;
    std::vector<std::string> values;
};

SweepAxis parse_axis(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
        throw ProtocolError(ErrorKind::Configuration, fmt::format("--sweep '{}': expected name=v1,v2,...", text));
    SweepAxis axis{text.substr(0, eq), {}};
    std::stringstream ss(text.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');)
        if (!v.empty())
            axis.values.push_back(v);
    if (axis.values.empty())
        throw ProtocolError(ErrorKind::Configuration, fmt::format("--sweep '{}': no values", text));
    return axis;
}

/// Cartesian product of the axes, first axis varying slowest.
std::vector<sim::ConfigOverrides> expand(const std::vector<SweepAxis>& axes) {
    std::vector<sim::ConfigOverrides> points{{}};
    for (const auto& axis : axes) {
        std::vector<sim::ConfigOverrides> next;
        for (const auto& p : points)
            for (const auto& v : axis.values) {
                auto q = p;
                q.emplace_back(axis.name, v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

std::string point_name(const sim::ConfigOverrides& coords) {
    if (coords.empty())
        return "run";
    std::string name;
    for (const auto& [k, v] : coords) {
        if (!name.empty())
            name += "__";
        name += k + "=" + v;
    }
    for (auto& ch : name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '=' || ch == '_' || ch == '-'))
            ch = '_';
    return name;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(fmt::format("cannot write {}", path.string()));
    return out;
}

// ---------------------------------------------------------------- schedule

struct ScheduleArgs {
    DurationMs t0 = 500;
    std::string r_t = "4";
    std::uint64_t c0 = 100;
    std::string r_c = "0.7";
    std::uint32_t max_step = 10;
    bool csv = false;
};

int cmd_schedule(const ScheduleArgs& a) {
    FinalitySchedule s;
    s.t0 = a.t0;
    auto r_t = Ratio::parse(a.r_t);
    if (r_t.den != 1 || r_t.num <= 1)
        throw ProtocolError(ErrorKind::Configuration, fmt::format("r_t: must be an integer greater than 1, got {}", a.r_t));
    s.r_t = r_t.num;
    s.c0 = a.c0;
    s.r_c = Ratio::parse(a.r_c);
    s.max_step = a.max_step;
    auto rows = schedule_table(s);
    if (a.csv)
        sim::write_schedule_csv(std::cout, rows);
    else
        sim::write_schedule_text(std::cout, rows);
    return 0;
}

// ---------------------------------------------------------------- security

struct SecurityArgs {
    std::string params_file;
    std::vector<std::string> sets;
    std::vector<std::string> sweeps;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_security(const SecurityArgs& a) {
    SecurityParams base{0.01, 0.9, 1.0, 100, 0.1, 1.0};
    if (!a.params_file.empty()) {
        std::ifstream in(a.params_file);
        if (!in)
            throw IoError(fmt::format("cannot open {}", a.params_file));
        std::stringstream buf;
        buf << in.rdbuf();
        base = sim::parse_security_params(buf.str(), base);
    }
    for (const auto& s : a.sets) {
        auto axis = parse_axis(s);
        sim::set_security_field(base, axis.name, axis.values.front());
    }
    std::vector<SweepAxis> axes;
    for (const auto& s : a.sweeps)
        axes.push_back(parse_axis(s));

    std::vector<SecurityReportRow> rows;
    for (const auto& point : expand(axes)) {
        auto params = base;
        for (const auto& [k, v] : point)
            sim::set_security_field(params, k, v);
        try {
            params.validate();
        } catch (const ProtocolError& e) {
            throw ProtocolError(ErrorKind::Configuration, e.what());
        }
        rows.push_back(security_report(params, a.trials, a.seed));
    }

    for (const auto& r : rows) {
        fmt::print("P(E) closed form      {:.7f}\n", r.p_challenge);
        fmt::print("fast finality 1-P(E)  {:.7f} ({:.2f}%)\n", r.p_fast_finality, 100.0 * r.p_fast_finality);
        fmt::print("Monte Carlo           {:.7f} +/- {:.7f} ({} trials)\n", r.monte_carlo.estimate,
                   r.monte_carlo.std_error, r.monte_carlo.trials);
        fmt::print("agreement             {}\n\n", r.agrees ? "within 3 standard errors" : "DISAGREES beyond 3 standard errors");
    }
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        sim::write_security_csv(f, rows);
    } else {
        sim::write_security_csv(std::cout, rows);
    }
    return 0;
}

// ---------------------------------------------------------------- run

struct RunArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::uint64_t trials = 1;
    std::vector<std::string> sweeps;
    std::vector<std::string> sets;
    unsigned jobs = 1;
};

struct PointResult {
    std::string name;
    sim::SimReport report;
    std::optional<std::string> invariant_error;
    std::uint64_t trace_position = 0;
};

int cmd_run(const RunArgs& a) {
    fs::path out_dir = a.out;
    if (out_dir.empty()) {
        const char* env = std::getenv("DFP_OUTPUT_DIR");
        out_dir = env && *env ? env : "dfp-out";
    }

    sim::ConfigOverrides fixed;
    for (const auto& s : a.sets) {
        auto axis = parse_axis(s);
        fixed.emplace_back(axis.name, axis.values.front());
    }
    std::vector<SweepAxis> axes;
    for (const auto& s : a.sweeps)
        axes.push_back(parse_axis(s));
    if (a.trials == 0)
        throw ProtocolError(ErrorKind::Configuration, "--trials: must be at least 1");

    // parse every point up front so bad input fails before any run starts
    if (!std::ifstream(a.config))
        throw IoError(fmt::format("cannot open {}", a.config));
    auto base = sim::load_scenario(a.config, fixed);
    std::uint64_t seed0 = a.seed.value_or(base.seed);
    struct Point {
        std::string name;
        sim::ConfigOverrides overrides;
        sim::ScenarioConfig config;
    };
    std::vector<Point> points;
    for (const auto& coords : expand(axes)) {
        for (std::uint64_t t = 0; t < a.trials; ++t) {
            auto overrides = fixed;
            overrides.insert(overrides.end(), coords.begin(), coords.end());
            auto name_coords = coords;
            if (a.seed || a.trials > 1) {
                overrides.emplace_back("seed", std::to_string(seed0 + t));
                name_coords.emplace_back("seed", std::to_string(seed0 + t));
            }
            points.push_back(Point{point_name(name_coords), overrides, sim::load_scenario(a.config, overrides)});
        }
    }

    fs::create_directories(out_dir);
    std::vector<PointResult> results(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_error_mutex;
    std::optional<std::string> io_error;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
            const auto& p = points[i];
            auto& res = results[i];
            res.name = p.name;
            try {
                auto dir = out_dir / p.name;
                fs::create_directories(dir);
                auto trace = open_out(dir / "trace.jsonl");
                try {
                    res.report = sim::run_scenario(p.config, sim::RunOptions{&trace, false});
                } catch (const sim::InvariantViolation& e) {
                    res.invariant_error = e.what();
                    res.trace_position = e.trace_position();
                    continue;
                }
                auto provenance = p.overrides;
                auto summary = open_out(dir / "summary.json");
                summary << sim::summary_json(res.report, provenance);
                auto commitments = open_out(dir / "commitments.csv");
                sim::write_commitments_csv(commitments, res.report);
                auto steps = open_out(dir / "steps.csv");
                sim::write_steps_csv(steps, res.report);
                auto ledger = open_out(dir / "ledger.csv");
                sim::write_ledger_csv(ledger, res.report);
                auto probes = open_out(dir / "probes.csv");
                sim::write_probes_csv(probes, res.report);
                auto config = open_out(dir / "config.yaml");
                config << sim::to_yaml(p.config);
            } catch (const std::exception& e) {
                std::lock_guard lock(io_error_mutex);
                if (!io_error)
                    io_error = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < std::max(1u, a.jobs); ++j)
            pool.emplace_back(worker);
    }
    if (io_error) {
        fmt::print(std::cerr, "error: {}\n", *io_error);
        return kExitIo;
    }

    int status = 0;
    auto summary = open_out(out_dir / "summary.csv");
    fmt::print(summary, "point,seed,submitted,finalized,reverted,pending,fraud_attempted,fraud_finalized,fraud_caught,"
                        "challenged,probes_issued,probe_slashes,latency_p50_ms,latency_p90_ms,latency_max_ms,"
                        "trace_sha256\n");
    for (const auto& r : results) {
        if (r.invariant_error) {
            fmt::print(std::cerr, "{}: {} (trace position {})\n", r.name, *r.invariant_error, r.trace_position);
            status = kExitInvariant;
            continue;
        }
        const auto& s = r.report;
        fmt::print(summary, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.name, s.seed, s.submitted,
                   s.finalized, s.reverted, s.pending, s.fraud_attempted, s.fraud_finalized, s.fraud_caught,
                   s.challenged, s.probes_issued, s.probe_slashes, s.latency.p50, s.latency.p90, s.latency.max,
                   s.trace_digest);
        fmt::print("{}: submitted {} finalized {} reverted {} pending {} | fraud {}/{} finalized | latency p50 {} "
                   "p90 {} max {} ms\n",
                   r.name, s.submitted, s.finalized, s.reverted, s.pending, s.fraud_finalized, s.fraud_attempted,
                   s.latency.p50, s.latency.p90, s.latency.max);
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic fraud proof protocol: simulator, security model and schedules"};
    app.require_subcommand(1);

    ScheduleArgs sched;
    auto* schedule = app.add_subcommand("schedule", "Print window lengths and sign-off thresholds per step");
    schedule->add_option("--t0", sched.t0, "Initial window length in ms")->capture_default_str();
    schedule->add_option("--r-t", sched.r_t, "Window growth factor (integer > 1)")->capture_default_str();
    schedule->add_option("--c0", sched.c0, "Initial sign-off threshold")->capture_default_str();
    schedule->add_option("--r-c", sched.r_c, "Threshold decay factor in (0, 1], e.g. 0.7 or 7/10")->capture_default_str();
    schedule->add_option("--max-step", sched.max_step, "Last extension step")->capture_default_str();
    schedule->add_flag("--csv", sched.csv, "Emit CSV instead of an aligned table");

    SecurityArgs sec;
    auto* security = app.add_subcommand("security", "Closed-form challenge probability with a Monte Carlo check");
    security->add_option("--params", sec.params_file, "YAML file with SecurityParams fields");
    security->add_option("--set", sec.sets, "Override one field: name=value (repeatable)");
    security->add_option("--sweep", sec.sweeps, "Sweep axis: name=v1,v2,... (repeatable)");
    security->add_option("--trials", sec.trials, "Monte Carlo trials per parameter set")->capture_default_str();
    security->add_option("--seed", sec.seed, "Monte Carlo seed")->capture_default_str();
    security->add_option("--out", sec.out, "Write the CSV table here instead of stdout");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run scenario simulations and write reports");
    run_cmd->add_option("--config", run.config, "Scenario YAML file")->required();
    run_cmd->add_option("--out", run.out, "Output directory (default $DFP_OUTPUT_DIR or ./dfp-out)");
    run_cmd->add_option("--seed", run.seed, "Override the config seed");
    run_cmd->add_option("--trials", run.trials, "Replicates per sweep point, seeds seed..seed+trials-1")
        ->capture_default_str();
    run_cmd->add_option("--sweep", run.sweeps, "Sweep axis over a config field: path=v1,v2,... (repeatable)");
    run_cmd->add_option("--set", run.sets, "Override one config field: path=value (repeatable)");
    run_cmd->add_option("--jobs", run.jobs, "Sweep points run in parallel")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*schedule)
            return cmd_schedule(sched);
        if (*security)
            return cmd_security(sec);
        return cmd_run(run);
    } catch (const ProtocolError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitInput;
    } catch (const IoError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitIo;
    }
}
