#include "dfp/sim/config_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dfp/error.hpp"

namespace dfp::sim {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ProtocolError(ErrorKind::Configuration, fmt::format("{}: {}", field, why));
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& known) {
    for (const auto& kv : map) {
        auto key = kv.first.as<std::string>();
        if (!known.contains(key))
            bad(join(prefix, key), "unknown field");
    }
}

template <class T>
T scalar(const YAML::Node& map, const std::string& prefix, const std::string& key) {
    auto field = join(prefix, key);
    auto node = map[key];
    if (!node)
        bad(field, "missing required field");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        bad(field, fmt::format("cannot parse '{}'", node.IsScalar() ? node.Scalar() : std::string("<non-scalar>")));
    }
}

template <class T>
T scalar_or(const YAML::Node& map, const std::string& prefix, const std::string& key, T fallback) {
    return map[key] ? scalar<T>(map, prefix, key) : fallback;
}

double probability_or(const YAML::Node& map, const std::string& prefix, const std::string& key, double fallback) {
    double p = scalar_or<double>(map, prefix, key, fallback);
    if (!(p >= 0.0 && p <= 1.0))
        bad(join(prefix, key), fmt::format("{} is not a probability", p));
    return p;
}

const std::map<std::string, std::set<std::string>>& policy_fields() {
    static const std::map<std::string, std::set<std::string>> fields{
        {"honest_operator", {}},
        {"fraudulent_operator", {"p_fraud_attempt", "p_detectable"}},
        {"honest_challenger", {"p_online"}},
        {"lazy_challenger", {"p_verify"}},
        {"censoring_adversary", {"p_suppress", "budget", "suppress_sign_offs", "suppress_challenges", "until_step"}},
    };
    return fields;
}

NodePolicy parse_policy(const YAML::Node& entry, const std::string& prefix) {
    auto kind = scalar<std::string>(entry, prefix, "policy");
    if (auto it = policy_fields().find(kind); it != policy_fields().end()) {
        std::set<std::string> known{"label", "policy", "count", "balance"};
        known.insert(it->second.begin(), it->second.end());
        for (const auto& kv : entry) {
            auto key = kv.first.as<std::string>();
            if (!known.contains(key))
                bad(join(prefix, key), fmt::format("not a field of policy '{}'", kind));
        }
    }
    if (kind == "honest_operator")
        return HonestOperator{};
    if (kind == "fraudulent_operator")
        return FraudulentOperator{probability_or(entry, prefix, "p_fraud_attempt", 0.0),
                                  probability_or(entry, prefix, "p_detectable", 1.0)};
    if (kind == "honest_challenger")
        return HonestChallenger{probability_or(entry, prefix, "p_online", 1.0)};
    if (kind == "lazy_challenger")
        return LazyChallenger{probability_or(entry, prefix, "p_verify", 0.0)};
    if (kind == "censoring_adversary") {
        CensoringAdversary c;
        c.p_suppress = probability_or(entry, prefix, "p_suppress", 1.0);
        c.budget = scalar_or<std::uint64_t>(entry, prefix, "budget", 0);
        c.sign_offs = scalar_or<bool>(entry, prefix, "suppress_sign_offs", true);
        c.challenges = scalar_or<bool>(entry, prefix, "suppress_challenges", false);
        c.until_step = scalar_or<std::uint32_t>(entry, prefix, "until_step", c.until_step);
        return c;
    }
    bad(join(prefix, "policy"), fmt::format("unknown policy '{}'", kind));
}

void apply_override(YAML::Node root, const std::string& path, const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');)
        parts.push_back(part);
    if (parts.empty())
        bad(path, "empty override path");
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next;
        if (cur.IsSequence()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(parts[i]);
            } catch (const std::exception&) {
                bad(path, "expected a list index");
            }
            if (idx >= cur.size())
                bad(path, "list index out of range");
            next = cur[idx];
        } else {
            // optional sections may be absent from the file; unknown names are rejected at parse time
            if (!cur[parts[i]])
                cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
            next = cur[parts[i]];
        }
        cur.reset(next);
    }
    cur[parts.back()] = value;
}

ScenarioConfig parse_root(const YAML::Node& root) {
    if (!root.IsMap())
        bad("<root>", "expected a mapping");
    reject_unknown(root, "",
                   {"seed", "duration_ms", "commitment_cadence_ms", "dispute_latency_ms", "verification_latency_ms",
                    "probe_rate", "p_window_adequate", "accounts_per_operator", "bundle_size", "reward_share",
                    "deterrence_scale", "schedule", "bonds", "population"});
    ScenarioConfig c;
    c.seed = scalar<std::uint64_t>(root, "", "seed");
    c.duration = scalar<DurationMs>(root, "", "duration_ms");
    c.commitment_cadence = scalar<DurationMs>(root, "", "commitment_cadence_ms");
    c.dispute_latency = scalar_or<DurationMs>(root, "", "dispute_latency_ms", c.dispute_latency);
    c.verification_latency = scalar_or<DurationMs>(root, "", "verification_latency_ms", c.verification_latency);
    c.probe_rate = scalar_or<double>(root, "", "probe_rate", c.probe_rate);
    c.p_window_adequate = probability_or(root, "", "p_window_adequate", c.p_window_adequate);
    c.accounts_per_operator = scalar_or<std::uint32_t>(root, "", "accounts_per_operator", c.accounts_per_operator);
    c.bundle_size = scalar_or<std::uint32_t>(root, "", "bundle_size", c.bundle_size);
    c.reward_share = probability_or(root, "", "reward_share", c.reward_share);
    c.deterrence_scale = scalar_or<double>(root, "", "deterrence_scale", c.deterrence_scale);

    auto sched = root["schedule"];
    if (!sched || !sched.IsMap())
        bad("schedule", "missing required mapping");
    reject_unknown(sched, "schedule", {"t0_ms", "r_t", "c0", "r_c", "max_step"});
    c.schedule.t0 = scalar<DurationMs>(sched, "schedule", "t0_ms");
    c.schedule.r_t = scalar<std::uint64_t>(sched, "schedule", "r_t");
    c.schedule.c0 = scalar<std::uint64_t>(sched, "schedule", "c0");
    try {
        c.schedule.r_c = Ratio::parse(scalar<std::string>(sched, "schedule", "r_c"));
    } catch (const ProtocolError& e) {
        bad("schedule.r_c", e.what());
    }
    c.schedule.max_step = scalar<std::uint32_t>(sched, "schedule", "max_step");

    if (auto bonds = root["bonds"]) {
        if (!bonds.IsMap())
            bad("bonds", "expected a mapping");
        reject_unknown(bonds, "bonds",
                       {"operator_bond", "challenger_bond", "min_challenge_bond", "challenge_bond", "operator_slash",
                        "lazy_slash"});
        auto& b = c.bonds;
        b.operator_bond = scalar_or<Lamports>(bonds, "bonds", "operator_bond", b.operator_bond);
        b.challenger_bond = scalar_or<Lamports>(bonds, "bonds", "challenger_bond", b.challenger_bond);
        b.min_challenge_bond = scalar_or<Lamports>(bonds, "bonds", "min_challenge_bond", b.min_challenge_bond);
        b.challenge_bond = scalar_or<Lamports>(bonds, "bonds", "challenge_bond", b.challenge_bond);
        b.operator_slash = scalar_or<Lamports>(bonds, "bonds", "operator_slash", b.operator_slash);
        b.lazy_slash = scalar_or<Lamports>(bonds, "bonds", "lazy_slash", b.lazy_slash);
    }

    auto pop = root["population"];
    if (!pop || !pop.IsSequence())
        bad("population", "missing required list");
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto prefix = fmt::format("population.{}", i);
        const auto& entry = pop[i];
        if (!entry.IsMap())
            bad(prefix, "expected a mapping");
        reject_unknown(entry, prefix,
                       {"label", "policy", "count", "balance", "p_fraud_attempt", "p_detectable", "p_online",
                        "p_verify", "p_suppress", "budget", "suppress_sign_offs", "suppress_challenges",
                        "until_step"});
        PopulationEntry e;
        e.policy = parse_policy(entry, prefix);
        e.label = scalar_or<std::string>(entry, prefix, "label", std::string(policy_name(e.policy)));
        e.count = scalar_or<std::uint32_t>(entry, prefix, "count", 1);
        e.balance = scalar<Lamports>(entry, prefix, "balance");
        c.population.push_back(std::move(e));
    }
    c.validate();
    return c;
}

} // namespace

ScenarioConfig parse_scenario(std::string_view yaml_text, const ConfigOverrides& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        bad("<file>", fmt::format("malformed YAML: {}", e.what()));
    }
    if (!root.IsMap())
        bad("<root>", "expected a mapping");
    for (const auto& [path, value] : overrides)
        apply_override(root, path, value);
    return parse_root(root);
}

ScenarioConfig load_scenario(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in)
        bad("<file>", fmt::format("cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), overrides);
}

void set_security_field(SecurityParams& p, const std::string& name, const std::string& value) {
    auto as_double = [&] {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            bad(name, fmt::format("cannot parse '{}'", value));
        }
        if (used != value.size())
            bad(name, fmt::format("cannot parse '{}'", value));
        return v;
    };
    if (name == "p_fraud")
        p.p_fraud = as_double();
    else if (name == "p_detect_given_fraud")
        p.p_detect_given_fraud = as_double();
    else if (name == "p_window")
        p.p_window = as_double();
    else if (name == "p_node_challenge")
        p.p_node_challenge = as_double();
    else if (name == "p_participation")
        p.p_participation = as_double();
    else if (name == "n_nodes") {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(value, &used);
        } catch (const std::exception&) {
            bad(name, fmt::format("cannot parse '{}'", value));
        }
        if (used != value.size() || value.starts_with('-'))
            bad(name, fmt::format("cannot parse '{}'", value));
        p.n_nodes = v;
    } else
        bad(name, "unknown field");
}

SecurityParams parse_security_params(std::string_view yaml_text, SecurityParams base) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        bad("<file>", fmt::format("malformed YAML: {}", e.what()));
    }
    if (root.IsNull())
        return base;
    if (!root.IsMap())
        bad("<root>", "expected a mapping");
    for (const auto& kv : root) {
        if (!kv.second.IsScalar())
            bad(kv.first.as<std::string>(), "expected a scalar");
        set_security_field(base, kv.first.as<std::string>(), kv.second.Scalar());
    }
    return base;
}

std::string to_yaml(const ScenarioConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "duration_ms" << YAML::Value << c.duration;
    out << YAML::Key << "commitment_cadence_ms" << YAML::Value << c.commitment_cadence;
    out << YAML::Key << "dispute_latency_ms" << YAML::Value << c.dispute_latency;
    out << YAML::Key << "verification_latency_ms" << YAML::Value << c.verification_latency;
    out << YAML::Key << "probe_rate" << YAML::Value << c.probe_rate;
    out << YAML::Key << "p_window_adequate" << YAML::Value << c.p_window_adequate;
    out << YAML::Key << "accounts_per_operator" << YAML::Value << c.accounts_per_operator;
    out << YAML::Key << "bundle_size" << YAML::Value << c.bundle_size;
    out << YAML::Key << "reward_share" << YAML::Value << c.reward_share;
    out << YAML::Key << "deterrence_scale" << YAML::Value << c.deterrence_scale;
    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t0_ms" << YAML::Value << c.schedule.t0;
    out << YAML::Key << "r_t" << YAML::Value << c.schedule.r_t;
    out << YAML::Key << "c0" << YAML::Value << c.schedule.c0;
    out << YAML::Key << "r_c" << YAML::Value << c.schedule.r_c.to_string();
    out << YAML::Key << "max_step" << YAML::Value << c.schedule.max_step;
    out << YAML::EndMap;
    const auto& b = c.bonds;
    out << YAML::Key << "bonds" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "operator_bond" << YAML::Value << b.operator_bond;
    out << YAML::Key << "challenger_bond" << YAML::Value << b.challenger_bond;
    out << YAML::Key << "min_challenge_bond" << YAML::Value << b.min_challenge_bond;
    out << YAML::Key << "challenge_bond" << YAML::Value << b.challenge_bond;
    out << YAML::Key << "operator_slash" << YAML::Value << b.operator_slash;
    out << YAML::Key << "lazy_slash" << YAML::Value << b.lazy_slash;
    out << YAML::EndMap;
    out << YAML::Key << "population" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : c.population) {
        out << YAML::BeginMap;
        out << YAML::Key << "label" << YAML::Value << e.label;
        out << YAML::Key << "policy" << YAML::Value << std::string(policy_name(e.policy));
        if (auto* p = std::get_if<FraudulentOperator>(&e.policy)) {
            out << YAML::Key << "p_fraud_attempt" << YAML::Value << p->p_fraud_attempt;
            out << YAML::Key << "p_detectable" << YAML::Value << p->p_detectable;
        } else if (auto* h = std::get_if<HonestChallenger>(&e.policy)) {
            out << YAML::Key << "p_online" << YAML::Value << h->p_online;
        } else if (auto* l = std::get_if<LazyChallenger>(&e.policy)) {
            out << YAML::Key << "p_verify" << YAML::Value << l->p_verify;
        } else if (auto* a = std::get_if<CensoringAdversary>(&e.policy)) {
            out << YAML::Key << "p_suppress" << YAML::Value << a->p_suppress;
            out << YAML::Key << "budget" << YAML::Value << a->budget;
            out << YAML::Key << "suppress_sign_offs" << YAML::Value << a->sign_offs;
            out << YAML::Key << "suppress_challenges" << YAML::Value << a->challenges;
            out << YAML::Key << "until_step" << YAML::Value << a->until_step;
        }
        out << YAML::Key << "count" << YAML::Value << e.count;
        out << YAML::Key << "balance" << YAML::Value << e.balance;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace dfp::sim
