#include "dfp/sim/simulator.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "dfp/error.hpp"
#include "dfp/probe.hpp"
#include "dfp/protocol.hpp"

namespace dfp::sim {

namespace {

struct Later {
    bool operator()(const WorldEvent& a, const WorldEvent& b) const {
        return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
};

struct Node {
    NodeId id;
    NodePolicy policy;
    Role role = Role::Observer;
};

struct OperatorState {
    NodeId id;
    DelegationId delegation;
    std::vector<AccountId> accounts;
    std::size_t cursor = 0;
};

struct Censor {
    NodeId id;
    CensoringAdversary policy;
    std::uint64_t budget_left = 0;
};

struct Tracked {
    bool fraudulent = false;
    std::optional<std::size_t> probe;
    std::vector<AccountState> pre_state;
    std::string da_pointer;
    std::set<NodeId> acted;
    std::size_t outcome = 0; // index into report.commitments, real commitments only
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, const RunOptions& options)
        : cfg_(cfg),
          engine_(EngineConfig{cfg.bonds.min_challenge_bond, cfg.bonds.operator_slash,
                               share_from_fraction(cfg.reward_share)},
                  derive_seed(cfg.seed, 1), options.retain_trace),
          rng_(derive_seed(cfg.seed, 2)),
          retain_(options.retain_trace) {
        engine_.trace().attach(options.trace_sink);
    }

    SimReport run() {
        setup();
        while (!queue_.empty()) {
            WorldEvent ev = queue_.top();
            if (ev.at > cfg_.duration)
                break;
            queue_.pop();
            process(ev);
            if (!engine_.ledger().conserved())
                violation("ledger conservation broken");
        }
        return finish();
    }

private:
    void setup() {
        std::uint32_t next_id = 1;
        for (const auto& entry : cfg_.population) {
            for (std::uint32_t i = 0; i < entry.count; ++i) {
                Node n{NodeId{next_id++}, entry.policy, policy_role(entry.policy)};
                engine_.ledger().mint(n.id, entry.balance);
                switch (n.role) {
                case Role::Operator:
                    engine_.ledger().post_bond(n.id, cfg_.bonds.operator_bond, BondPurpose::OperatorBond);
                    operators_.push_back(OperatorState{n.id, {}, {}, 0});
                    break;
                case Role::Challenger:
                    engine_.ledger().post_bond(n.id, cfg_.bonds.challenger_bond, BondPurpose::ChallengerBond);
                    pool_.push_back(n.id);
                    break;
                case Role::Observer:
                    if (auto* c = std::get_if<CensoringAdversary>(&n.policy))
                        censors_.push_back(Censor{n.id, *c, c->budget});
                    break;
                }
                nodes_.push_back(std::move(n));
            }
        }

        std::uint64_t account_index = 0;
        for (auto& op : operators_) {
            for (std::uint32_t i = 0; i < cfg_.accounts_per_operator; ++i) {
                auto id = AccountId::from_index(account_index++);
                Bytes data(16);
                for (auto& b : data)
                    b = static_cast<std::uint8_t>(rng_());
                engine_.create_account(id, std::move(data));
                op.accounts.push_back(id);
            }
            op.delegation = engine_.delegate(op.accounts, op.id, cfg_.schedule, pool_,
                                             std::numeric_limits<DurationMs>::max() / 4, 0, cfg_.commitment_cadence);
        }
        for (std::size_t i = 0; i < operators_.size(); ++i)
            push(WorldEvent{.at = 0, .kind = EventKind::SubmitCommitment, .operator_index = i});
    }

    void push(WorldEvent ev) {
        ev.seq = next_seq_++;
        queue_.push(ev);
    }

    [[noreturn]] void violation(const std::string& what) {
        throw InvariantViolation(engine_.trace().size(),
                                 fmt::format("invariant violated at trace position {}: {}", engine_.trace().size(),
                                             what));
    }

    const Node& node(NodeId id) const { return nodes_.at(id.value - 1); }

    void process(const WorldEvent& ev) {
        switch (ev.kind) {
        case EventKind::SubmitCommitment: on_submit(ev); break;
        case EventKind::ProbeIssued: on_probe(ev); break;
        case EventKind::Observe: on_observe(ev); break;
        case EventKind::SignOff: on_sign_off(ev); break;
        case EventKind::RaiseChallenge: on_challenge(ev); break;
        case EventKind::WindowDeadline: on_deadline(ev); break;
        case EventKind::DisputeVerdictArrives: on_verdict(ev); break;
        }
    }

    DaRecord random_transactions(std::span<const AccountId> accounts) {
        DaRecord da;
        for (const auto& a : accounts) {
            auto n = 1 + uniform_below(rng_, 3);
            for (std::uint64_t i = 0; i < n; ++i) {
                BytePatch p;
                p.account = a;
                p.offset = static_cast<std::uint32_t>(uniform_below(rng_, 24));
                p.bytes.resize(1 + uniform_below(rng_, 8));
                for (auto& b : p.bytes)
                    b = static_cast<std::uint8_t>(rng_());
                da.transactions.push_back(std::move(p));
            }
        }
        return da;
    }

    std::vector<AccountState> snapshot(std::span<const AccountId> accounts) const {
        std::vector<AccountState> out;
        for (const auto& a : accounts)
            out.push_back(engine_.account(a));
        return out;
    }

    void on_submit(const WorldEvent& ev) {
        auto& op = operators_[ev.operator_index];
        push(WorldEvent{.at = ev.at + cfg_.commitment_cadence, .kind = EventKind::SubmitCommitment,
                        .operator_index = ev.operator_index});

        std::vector<AccountId> bundle;
        for (std::size_t i = 0; i < op.accounts.size() && bundle.size() < cfg_.bundle_size; ++i) {
            const auto& a = op.accounts[(op.cursor + i) % op.accounts.size()];
            if (!engine_.in_flight(a))
                bundle.push_back(a);
        }
        if (bundle.size() < cfg_.bundle_size) {
            ++report_.deferred;
            return;
        }
        op.cursor = (op.cursor + 1) % op.accounts.size();

        Tracked t;
        t.pre_state = snapshot(bundle);
        DaRecord da = random_transactions(bundle);
        auto diffs = replay(t.pre_state, da).diffs;

        const auto& policy = node(op.id).policy;
        if (const auto* fraud = std::get_if<FraudulentOperator>(&policy)) {
            double slash_fraction = cfg_.bonds.operator_bond == 0
                                        ? 0.0
                                        : std::min(1.0, static_cast<double>(cfg_.bonds.operator_slash) /
                                                            static_cast<double>(cfg_.bonds.operator_bond));
            double p = effective_fraud_probability(fraud->p_fraud_attempt, cfg_.bonds.operator_bond, slash_fraction,
                                                   cfg_.deterrence_scale);
            if (bernoulli(rng_, p)) {
                t.fraudulent = true;
                auto& target = diffs.front();
                auto pos = uniform_below(rng_, target.data.size());
                target.data[pos] ^= static_cast<std::uint8_t>(1 + uniform_below(rng_, 255));
                if (!bernoulli(rng_, fraud->p_detectable)) {
                    // forge the published data so the bad diff replays cleanly
                    da.transactions.push_back(BytePatch{target.account, static_cast<std::uint32_t>(pos),
                                                        Bytes{target.data[pos]}});
                }
            }
        }

        t.da_pointer = fmt::format("da/{}/{}", op.id.value, da_counter_++);
        da_store_.emplace(t.da_pointer, std::move(da));
        CommitmentId id = engine_.submit_commitment(op.delegation, op.id, std::move(diffs), t.da_pointer, ev.at);

        CommitmentOutcome outcome;
        outcome.id = id.value;
        outcome.operator_id = op.id;
        outcome.fraudulent = t.fraudulent;
        outcome.submitted_at = ev.at;
        t.outcome = report_.commitments.size();
        report_.commitments.push_back(outcome);
        ++report_.submitted;
        report_.fraud_attempted += t.fraudulent;
        tracked_.emplace(id.value, std::move(t));

        const auto& w = engine_.window(id);
        bool adequate = bernoulli(rng_, cfg_.p_window_adequate);
        TimestampMs observe_at = adequate ? ev.at + cfg_.verification_latency : w.deadline + 1;
        for (auto n : pool_)
            push(WorldEvent{.at = observe_at, .kind = EventKind::Observe, .commitment = id.value, .node = n});
        push(WorldEvent{.at = w.deadline, .kind = EventKind::WindowDeadline, .commitment = id.value});

        auto probes = static_cast<std::uint64_t>(cfg_.probe_rate);
        if (bernoulli(rng_, cfg_.probe_rate - static_cast<double>(probes)))
            ++probes;
        for (std::uint64_t i = 0; i < probes; ++i)
            push(WorldEvent{.at = ev.at, .kind = EventKind::ProbeIssued, .operator_index = ev.operator_index});
    }

    void on_probe(const WorldEvent& ev) {
        if (pool_.empty())
            return;
        auto& op = operators_[ev.operator_index];
        const auto& account = op.accounts[uniform_below(rng_, op.accounts.size())];
        Tracked t;
        t.pre_state = snapshot(std::span(&account, 1));
        DaRecord da = random_transactions(std::span(&account, 1));
        auto honest = replay(t.pre_state, da).diffs.front();
        t.da_pointer = fmt::format("da/probe/{}", da_counter_++);
        da_store_.emplace(t.da_pointer, std::move(da));

        // same sample size as a real window so targets cannot tell the difference
        auto k = cfg_.schedule.c0 == 0 ? pool_.size() : cfg_.schedule.c0;
        auto targets = sample_challengers(pool_, k, rng_);
        Probe probe = issue_probe(engine_, op.delegation, targets, honest, t.da_pointer, ev.at, rng_());
        t.probe = probes_.size();
        probes_.push_back(probe);
        ++report_.probes_issued;
        auto id = probe.commitment.value;
        tracked_.emplace(id, std::move(t));

        const auto& w = engine_.window(probe.commitment);
        for (auto n : probe.targets)
            push(WorldEvent{.at = ev.at + cfg_.verification_latency, .kind = EventKind::Observe, .commitment = id,
                            .node = n});
        push(WorldEvent{.at = w.deadline, .kind = EventKind::WindowDeadline, .commitment = id});
    }

    void on_observe(const WorldEvent& ev) {
        CommitmentId id{ev.commitment};
        const auto& c = engine_.commitment(id);
        if (c.status != CommitmentStatus::Pending)
            return;
        auto& t = tracked_.at(ev.commitment);
        if (t.acted.contains(ev.node))
            return;
        const auto& w = engine_.window(id);
        auto da = da_store_.find(t.da_pointer);
        Observation obs{t.pre_state, c.diffs, da == da_store_.end() ? nullptr : &da->second, w.is_sampled(ev.node)};
        switch (decide_action(node(ev.node).policy, obs, rng_)) {
        case Action::SignOff:
            push(WorldEvent{.at = ev.at, .kind = EventKind::SignOff, .commitment = ev.commitment, .node = ev.node});
            break;
        case Action::Challenge:
            push(WorldEvent{.at = ev.at, .kind = EventKind::RaiseChallenge, .commitment = ev.commitment,
                            .node = ev.node});
            break;
        case Action::Abstain: break;
        }
    }

    /// True if some censor drops this message.
    bool suppressed(const ChallengeWindow& w, bool is_sign_off) {
        for (auto& censor : censors_) {
            const auto& p = censor.policy;
            if (censor.budget_left == 0 || w.step >= p.until_step)
                continue;
            if (is_sign_off ? !p.sign_offs : !p.challenges)
                continue;
            if (bernoulli(rng_, p.p_suppress)) {
                --censor.budget_left;
                return true;
            }
        }
        return false;
    }

    void trace_suppression(const WorldEvent& ev, const ChallengeWindow& w, std::string_view kind) {
        const auto& c = engine_.commitment(CommitmentId{ev.commitment});
        engine_.trace().append(TraceRecord{.at = ev.at,
                                           .kind = std::string(kind),
                                           .commitment = ev.commitment,
                                           .step = w.step,
                                           .sign_offs = w.sign_offs.size(),
                                           .required = w.required,
                                           .status = std::string(to_string(c.status)),
                                           .node = ev.node});
    }

    void on_sign_off(const WorldEvent& ev) {
        CommitmentId id{ev.commitment};
        if (engine_.commitment(id).status != CommitmentStatus::Pending)
            return;
        const auto& w = engine_.window(id);
        if (suppressed(w, true)) {
            ++report_.sign_offs_suppressed;
            trace_suppression(ev, w, "suppressed_sign_off");
            return;
        }
        try {
            engine_.sign_off(id, ev.node, ev.at);
        } catch (const ProtocolError&) {
            return;
        }
        auto& t = tracked_.at(ev.commitment);
        t.acted.insert(ev.node);
    }

    void on_challenge(const WorldEvent& ev) {
        CommitmentId id{ev.commitment};
        if (engine_.commitment(id).status != CommitmentStatus::Pending)
            return;
        const auto& w = engine_.window(id);
        if (suppressed(w, false)) {
            ++report_.challenges_suppressed;
            trace_suppression(ev, w, "suppressed_challenge");
            return;
        }
        ChallengeId cid;
        try {
            cid = engine_.raise_challenge(id, ev.node, cfg_.bonds.challenge_bond, ev.at);
        } catch (const ProtocolError&) {
            return;
        }
        auto& t = tracked_.at(ev.commitment);
        t.acted.insert(ev.node);
        if (t.probe)
            return;
        ++report_.challenges_raised;
        report_.commitments[t.outcome].challenged = true;
        push(WorldEvent{.at = ev.at + cfg_.dispute_latency, .kind = EventKind::DisputeVerdictArrives,
                        .commitment = ev.commitment, .challenge = cid.value});
    }

    void on_deadline(const WorldEvent& ev) {
        CommitmentId id{ev.commitment};
        const auto& c = engine_.commitment(id);
        if (c.status == CommitmentStatus::Finalized || c.status == CommitmentStatus::Reverted)
            return;
        const auto& w = engine_.window(id);
        if (ev.at < w.deadline)
            return;
        auto& t = tracked_.at(ev.commitment);
        std::uint64_t signed_before = w.sign_offs.size();
        std::uint64_t required_before = w.required;
        bool disputed = c.status == CommitmentStatus::Disputed;

        auto result = engine_.evaluate_window(id, ev.at);
        switch (result.outcome) {
        case WindowOutcome::Finalized: {
            if (disputed || signed_before < required_before)
                violation(fmt::format("commitment {} finalized with {}/{} sign-offs", id.value, signed_before,
                                      required_before));
            for (const auto& d : c.diffs)
                if (engine_.account(d.account).version != d.new_version)
                    violation(fmt::format("commitment {} finalized without applying its bundle", id.value));
            auto& out = report_.commitments[t.outcome];
            out.settled_at = ev.at;
            out.final_step = result.step;
            break;
        }
        case WindowOutcome::Extended: {
            report_.commitments[t.outcome].extensions++;
            push(WorldEvent{.at = result.deadline, .kind = EventKind::WindowDeadline, .commitment = id.value});
            for (auto n : pool_)
                if (!t.acted.contains(n))
                    push(WorldEvent{.at = ev.at + cfg_.verification_latency, .kind = EventKind::Observe,
                                    .commitment = id.value, .node = n});
            break;
        }
        case WindowOutcome::Blocked: break;
        case WindowOutcome::ProbeClosed: {
            auto& probe = probes_[*t.probe];
            auto responses = collect_probe_responses(engine_, probe);
            // per-node stats cover assessed probes only, so signed and slashed counts line up
            for (auto n : probe.targets)
                ++probe_stats(n).probes_received;
            for (auto n : responses.signers)
                ++probe_stats(n).probes_signed;
            for (auto n : responses.challengers)
                ++probe_stats(n).probes_challenged;
            auto slashes = assess_probe(engine_.ledger(), probe, responses,
                                        ProbePenalty{cfg_.bonds.lazy_slash, share_from_fraction(cfg_.reward_share)});
            for (const auto& s : slashes) {
                auto& st = probe_stats(s.party);
                ++st.slashes;
                st.slashed_amount += s.amount;
                ++report_.probe_slashes;
            }
            break;
        }
        }
    }

    void on_verdict(const WorldEvent& ev) {
        auto& t = tracked_.at(ev.commitment);
        Verdict v = t.fraudulent ? Verdict::FraudProven : Verdict::ChallengeInvalid;
        auto status = engine_.resolve_dispute(DisputeVerdict{ChallengeId{ev.challenge}, v}, ev.at);
        CommitmentId id{ev.commitment};
        if (status == CommitmentStatus::Reverted) {
            auto& out = report_.commitments[t.outcome];
            out.settled_at = ev.at;
            out.final_step = engine_.window(id).step;
            for (const auto& d : engine_.commitment(id).diffs)
                if (engine_.account(d.account).version >= d.new_version)
                    violation(fmt::format("reverted commitment {} left its diff applied", id.value));
        } else if (ev.at >= engine_.window(id).deadline) {
            // the deadline passed during the dispute: evaluate now, no fresh window
            push(WorldEvent{.at = ev.at, .kind = EventKind::WindowDeadline, .commitment = id.value});
        }
    }

    NodeProbeStats& probe_stats(NodeId n) {
        auto [it, inserted] = probe_stats_.try_emplace(n);
        if (inserted) {
            it->second.node = n;
            it->second.policy = std::string(policy_name(node(n).policy));
        }
        return it->second;
    }

    SimReport finish() {
        for (auto& out : report_.commitments) {
            out.status = std::string(to_string(engine_.commitment(CommitmentId{out.id}).status));
            if (out.status == "Finalized") {
                ++report_.finalized;
                report_.latencies.push_back(out.settled_at - out.submitted_at);
                report_.step_histogram[out.final_step]++;
                report_.fraud_finalized += out.fraudulent;
            } else if (out.status == "Reverted") {
                ++report_.reverted;
                report_.fraud_caught += out.fraudulent;
            } else {
                ++report_.pending;
            }
            report_.challenged += out.challenged;
        }
        report_.seed = cfg_.seed;
        report_.latency.p50 = percentile(report_.latencies, 0.5);
        report_.latency.p90 = percentile(report_.latencies, 0.9);
        report_.latency.max = report_.latencies.empty()
                                  ? 0
                                  : *std::max_element(report_.latencies.begin(), report_.latencies.end());
        for (auto& [_, st] : probe_stats_)
            report_.probe_stats.push_back(st);
        report_.ledger = engine_.ledger().snapshot();
        report_.burned = engine_.ledger().burned();
        report_.total_supply = engine_.ledger().total_supply();
        report_.trace_records = engine_.trace().size();
        report_.trace_digest = engine_.trace().digest_hex();
        if (retain_)
            report_.trace = engine_.trace().records();
        check_report(report_);
        return std::move(report_);
    }

    const ScenarioConfig& cfg_;
    ProtocolEngine engine_;
    Rng rng_;
    bool retain_;
    std::priority_queue<WorldEvent, std::vector<WorldEvent>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t da_counter_ = 0;
    std::vector<Node> nodes_;
    std::vector<OperatorState> operators_;
    std::vector<NodeId> pool_;
    std::vector<Censor> censors_;
    std::map<std::uint64_t, Tracked> tracked_;
    DaStore da_store_;
    std::vector<Probe> probes_;
    std::map<NodeId, NodeProbeStats> probe_stats_;
    SimReport report_;
};

} // namespace

void check_report(const SimReport& r) {
    auto fail = [&](const std::string& what) { throw InvariantViolation(r.trace_records, what); };
    if (r.finalized + r.reverted + r.pending != r.submitted)
        fail(fmt::format("finalized {} + reverted {} + pending {} != submitted {}", r.finalized, r.reverted, r.pending,
                         r.submitted));
    if (r.fraud_finalized + r.fraud_caught > r.fraud_attempted)
        fail("more fraud settled than attempted");
    std::uint64_t fraud_finalized = 0;
    for (const auto& c : r.commitments)
        fraud_finalized += c.fraudulent && c.status == "Finalized";
    if (fraud_finalized != r.fraud_finalized)
        fail("fraud_finalized does not match the per-commitment outcomes");
    if (r.latencies.size() != r.finalized)
        fail("latency sample size differs from finalized count");
}

SimReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    config.validate();
    Simulation sim(config, options);
    return sim.run();
}

} // namespace dfp::sim
