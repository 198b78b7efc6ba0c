#include "dfp/protocol.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp {

std::string_view to_string(CommitmentStatus status) {
    switch (status) {
    case CommitmentStatus::Pending: return "Pending";
    case CommitmentStatus::Disputed: return "Disputed";
    case CommitmentStatus::Finalized: return "Finalized";
    case CommitmentStatus::Reverted: return "Reverted";
    }
    return "unknown";
}

std::string_view to_string(WindowOutcome outcome) {
    switch (outcome) {
    case WindowOutcome::Finalized: return "Finalized";
    case WindowOutcome::Extended: return "Extended";
    case WindowOutcome::Blocked: return "Blocked";
    case WindowOutcome::ProbeClosed: return "ProbeClosed";
    }
    return "unknown";
}

bool is_allowed_transition(CommitmentStatus from, CommitmentStatus to) {
    using S = CommitmentStatus;
    switch (from) {
    case S::Pending: return to == S::Pending || to == S::Disputed || to == S::Finalized || to == S::Reverted;
    case S::Disputed: return to == S::Pending || to == S::Reverted;
    case S::Finalized:
    case S::Reverted: return false;
    }
    return false;
}

bool DelegationRecord::contains(const AccountId& account) const {
    return std::binary_search(accounts.begin(), accounts.end(), account);
}

bool ChallengeWindow::is_sampled(NodeId node) const {
    return std::binary_search(sampled.begin(), sampled.end(), node);
}

void finalize_bundle(AccountStore& store, std::span<const StateDiff> diffs) {
    if (diffs.empty())
        throw ProtocolError(ErrorKind::Domain, "empty bundle");
    std::vector<AccountState> staged;
    staged.reserve(diffs.size());
    for (const auto& d : diffs) {
        auto it = store.find(d.account);
        if (it == store.end())
            throw ProtocolError(ErrorKind::BundleConflict, fmt::format("unknown account {}", d.account.to_hex()));
        if (it->second.version + 1 != d.new_version)
            throw ProtocolError(ErrorKind::BundleConflict,
                                fmt::format("account {} is at version {}, diff expects {}", d.account.to_hex(),
                                            it->second.version, d.new_version - 1));
        AccountState next = it->second;
        next.data = d.data;
        next.version = d.new_version;
        staged.push_back(std::move(next));
    }
    for (auto& s : staged)
        store[s.account] = std::move(s);
}

ProtocolEngine::ProtocolEngine(EngineConfig config, std::uint64_t seed, bool retain_trace)
    : config_(config), rng_(seed), trace_(retain_trace) {
    if (config_.min_challenge_bond == 0)
        throw ProtocolError(ErrorKind::Configuration, "minimum challenge bond must be positive");
    if (config_.reward_share_ppm > kShareScale)
        throw ProtocolError(ErrorKind::Configuration, "reward share above 1");
}

void ProtocolEngine::create_account(const AccountId& account, Bytes data) {
    if (accounts_.contains(account))
        throw ProtocolError(ErrorKind::Conflict, fmt::format("account {} exists", account.to_hex()));
    accounts_.emplace(account, AccountState{account, std::move(data), 0, false});
}

void ProtocolEngine::write_base_layer(const AccountId& account, Bytes data) {
    auto it = accounts_.find(account);
    if (it == accounts_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("account {}", account.to_hex()));
    if (it->second.delegated)
        throw ProtocolError(ErrorKind::Conflict, fmt::format("account {} is delegated", account.to_hex()));
    it->second.data = std::move(data);
    ++it->second.version;
}

const AccountState& ProtocolEngine::account(const AccountId& account) const {
    auto it = accounts_.find(account);
    if (it == accounts_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("account {}", account.to_hex()));
    return it->second;
}

DelegationId ProtocolEngine::delegate(std::span<const AccountId> accounts, NodeId operator_id,
                                      const FinalitySchedule& schedule, std::span<const NodeId> pool,
                                      DurationMs max_lifetime, TimestampMs now, DurationMs update_frequency) {
    if (accounts.empty())
        throw ProtocolError(ErrorKind::Domain, "delegation needs at least one account");
    if (max_lifetime <= 0)
        throw ProtocolError(ErrorKind::Configuration, "max_lifetime must be positive");
    schedule.validate();
    std::vector<NodeId> sorted_pool(pool.begin(), pool.end());
    std::sort(sorted_pool.begin(), sorted_pool.end());
    if (std::adjacent_find(sorted_pool.begin(), sorted_pool.end()) != sorted_pool.end())
        throw ProtocolError(ErrorKind::Configuration, "duplicate node in challenger pool");
    if (pool.size() < schedule.c0)
        throw ProtocolError(ErrorKind::Configuration,
                            fmt::format("challenger pool of {} is smaller than c0 = {}", pool.size(), schedule.c0));

    std::vector<AccountId> set(accounts.begin(), accounts.end());
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    for (const auto& a : set) {
        auto it = accounts_.find(a);
        if (it != accounts_.end() && it->second.delegated)
            throw ProtocolError(ErrorKind::Conflict, fmt::format("account {} is already delegated", a.to_hex()));
    }
    for (const auto& a : set) {
        auto [it, _] = accounts_.try_emplace(a, AccountState{a, {}, 0, false});
        it->second.delegated = true;
    }

    DelegationRecord record;
    record.id = DelegationId{next_delegation_++};
    record.accounts = std::move(set);
    record.max_lifetime = max_lifetime;
    record.update_frequency = update_frequency;
    record.schedule = schedule;
    record.challenger_pool.assign(pool.begin(), pool.end());
    record.operator_id = operator_id;
    record.created_at = now;
    auto id = record.id;
    trace_.append(TraceRecord{.at = now, .kind = "delegate", .commitment = 0, .status = "Active", .node = operator_id});
    delegations_.emplace(id, std::move(record));
    return id;
}

std::vector<AccountId> ProtocolEngine::undelegate(DelegationId id, TimestampMs now) {
    auto it = delegations_.find(id);
    if (it == delegations_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("delegation {}", id.value));
    auto& record = it->second;
    if (record.status != DelegationStatus::Active)
        throw ProtocolError(ErrorKind::State, "delegation already released");
    for (const auto& a : record.accounts)
        if (locks_.contains(a))
            throw ProtocolError(ErrorKind::Busy,
                                fmt::format("account {} has a commitment in flight", a.to_hex()));
    for (const auto& a : record.accounts)
        accounts_.at(a).delegated = false;
    record.status = DelegationStatus::Undelegated;
    trace_.append(TraceRecord{.at = now, .kind = "undelegate", .status = "Undelegated", .node = record.operator_id});
    return record.accounts;
}

CommitmentId ProtocolEngine::submit_commitment(DelegationId delegation, NodeId operator_id,
                                               std::vector<StateDiff> diffs, std::string da_pointer,
                                               TimestampMs now) {
    auto dit = delegations_.find(delegation);
    if (dit == delegations_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("delegation {}", delegation.value));
    auto& record = dit->second;
    if (record.status != DelegationStatus::Active)
        throw ProtocolError(ErrorKind::Domain, "delegation is not active");
    if (operator_id != record.operator_id)
        throw ProtocolError(ErrorKind::Authorization,
                            fmt::format("node {} is not the operator of delegation {}", operator_id.value,
                                        delegation.value));
    if (now - record.created_at > record.max_lifetime)
        throw ProtocolError(ErrorKind::Domain, "delegation lifetime expired");
    if (diffs.empty())
        throw ProtocolError(ErrorKind::Domain, "commitment needs at least one diff");
    std::vector<AccountId> touched;
    for (const auto& d : diffs) {
        if (!record.contains(d.account))
            throw ProtocolError(ErrorKind::Domain,
                                fmt::format("account {} is not part of the delegation", d.account.to_hex()));
        touched.push_back(d.account);
    }
    std::sort(touched.begin(), touched.end());
    if (std::adjacent_find(touched.begin(), touched.end()) != touched.end())
        throw ProtocolError(ErrorKind::Domain, "account appears twice in one bundle");
    for (const auto& a : touched)
        if (auto l = locks_.find(a); l != locks_.end())
            throw ProtocolError(ErrorKind::Conflict, fmt::format("account {} is held by commitment {}", a.to_hex(),
                                                                 l->second.value));
    for (const auto& d : diffs)
        if (accounts_.at(d.account).version + 1 != d.new_version)
            throw ProtocolError(ErrorKind::Domain, fmt::format("stale version for account {}", d.account.to_hex()));

    auto sampled = sim::sample_challengers(record.challenger_pool, record.schedule.c0, rng_);
    Commitment c;
    c.id = CommitmentId{next_commitment_++};
    c.operator_id = operator_id;
    c.diffs = std::move(diffs);
    c.da_pointer = std::move(da_pointer);
    c.delegation = delegation;
    c.submitted_at = now;
    for (const auto& a : touched)
        locks_.emplace(a, c.id);
    return open_window(record, std::move(c), std::move(sampled), now);
}

CommitmentId ProtocolEngine::open_probe(DelegationId delegation, std::vector<NodeId> targets,
                                        std::vector<StateDiff> diffs, std::string da_pointer, TimestampMs now) {
    auto dit = delegations_.find(delegation);
    if (dit == delegations_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("delegation {}", delegation.value));
    if (targets.empty())
        throw ProtocolError(ErrorKind::Domain, "probe needs at least one target");
    if (diffs.empty())
        throw ProtocolError(ErrorKind::Domain, "probe needs at least one diff");
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    Commitment c;
    c.id = CommitmentId{next_commitment_++};
    c.operator_id = dit->second.operator_id;
    c.diffs = std::move(diffs);
    c.da_pointer = std::move(da_pointer);
    c.delegation = delegation;
    c.submitted_at = now;
    c.probe = true;
    return open_window(dit->second, std::move(c), std::move(targets), now);
}

CommitmentId ProtocolEngine::open_window(DelegationRecord& record, Commitment c, std::vector<NodeId> sampled,
                                         TimestampMs now) {
    ChallengeWindow w;
    w.commitment = c.id;
    w.step = 0;
    w.opened_at = now;
    w.deadline = now + window_duration(0, record.schedule);
    w.required = required_challengers(0, record.schedule);
    w.sampled = std::move(sampled);
    auto id = c.id;
    auto& stored = commitments_.emplace(id, std::move(c)).first->second;
    auto& window = windows_.emplace(id, std::move(w)).first->second;
    log_transition(stored.probe ? "probe_issued" : "submit", stored, window, now, stored.operator_id);
    return id;
}

bool ProtocolEngine::sign_off(CommitmentId id, NodeId challenger, TimestampMs now) {
    auto& c = commitment_mut(id);
    auto& w = window_mut(id);
    if (c.status != CommitmentStatus::Pending)
        throw ProtocolError(ErrorKind::State,
                            fmt::format("commitment {} is {}, not Pending", id.value, to_string(c.status)));
    if (now > w.deadline)
        throw ProtocolError(ErrorKind::TooLate, fmt::format("sign-off at {} after deadline {}", now, w.deadline));
    if (!w.is_sampled(challenger))
        throw ProtocolError(ErrorKind::NotSelected,
                            fmt::format("node {} was not sampled for commitment {}", challenger.value, id.value));
    for (auto cid : w.challenges)
        if (challenges_.at(cid).challenger == challenger)
            throw ProtocolError(ErrorKind::InconsistentRole,
                                fmt::format("node {} already challenged commitment {}", challenger.value, id.value));
    if (!w.sign_offs.insert(challenger).second)
        return false;
    log_transition("sign_off", c, w, now, challenger);
    return true;
}

ChallengeId ProtocolEngine::raise_challenge(CommitmentId id, NodeId challenger, Lamports bond, TimestampMs now) {
    auto& c = commitment_mut(id);
    auto& w = window_mut(id);
    if (c.status != CommitmentStatus::Pending)
        throw ProtocolError(ErrorKind::State,
                            fmt::format("commitment {} is {}, not Pending", id.value, to_string(c.status)));
    if (now > w.deadline)
        throw ProtocolError(ErrorKind::TooLate, fmt::format("challenge at {} after deadline {}", now, w.deadline));
    if (bond == 0 || bond < config_.min_challenge_bond)
        throw ProtocolError(ErrorKind::Bond,
                            fmt::format("bond {} below minimum {}", bond, config_.min_challenge_bond));

    Challenge ch;
    ch.id = ChallengeId{next_challenge_++};
    ch.challenger = challenger;
    ch.commitment = id;
    ch.raised_at = now;
    ch.bond = bond;
    if (c.probe) {
        // the decoy is known bad: the challenge is upheld on the spot and nothing is escrowed
        ch.status = ChallengeStatus::Upheld;
    } else {
        ledger_.post_bond(challenger, bond, BondPurpose::DisputeBond);
        set_status(c, CommitmentStatus::Disputed);
    }
    auto cid = ch.id;
    challenges_.emplace(cid, ch);
    w.challenges.push_back(cid);
    log_transition("challenge", c, w, now, challenger);
    return cid;
}

CommitmentStatus ProtocolEngine::resolve_dispute(const DisputeVerdict& verdict, TimestampMs now) {
    auto it = challenges_.find(verdict.challenge);
    if (it == challenges_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("challenge {}", verdict.challenge.value));
    auto& ch = it->second;
    if (ch.status != ChallengeStatus::Open)
        throw ProtocolError(ErrorKind::State, fmt::format("challenge {} already resolved", ch.id.value));
    auto& c = commitment_mut(ch.commitment);
    auto& w = window_mut(ch.commitment);
    if (c.status != CommitmentStatus::Disputed)
        throw ProtocolError(ErrorKind::State,
                            fmt::format("commitment {} is {}, not Disputed", c.id.value, to_string(c.status)));

    if (verdict.outcome == Verdict::FraudProven) {
        Lamports slash = std::min(config_.operator_slash, ledger_.escrow(c.operator_id, BondPurpose::OperatorBond));
        ledger_.release_bond(ch.challenger, ch.bond, BondPurpose::DisputeBond);
        ledger_.apply_verdict(SlashEvent{c.operator_id, BondPurpose::OperatorBond, slash, SlashReason::FraudProven,
                                         ch.challenger, config_.reward_share_ppm});
        ch.status = ChallengeStatus::Upheld;
        set_status(c, CommitmentStatus::Reverted);
        release_locks(c);
        log_transition("dispute_upheld", c, w, now, ch.challenger);
    } else {
        ledger_.apply_verdict(SlashEvent{ch.challenger, BondPurpose::DisputeBond, ch.bond,
                                         SlashReason::FalseChallenge, c.operator_id, config_.reward_share_ppm});
        ch.status = ChallengeStatus::Rejected;
        set_status(c, CommitmentStatus::Pending);
        log_transition("dispute_rejected", c, w, now, ch.challenger);
    }
    return c.status;
}

WindowEvaluation ProtocolEngine::evaluate_window(CommitmentId id, TimestampMs now) {
    auto& c = commitment_mut(id);
    auto& w = window_mut(id);
    if (c.status == CommitmentStatus::Finalized || c.status == CommitmentStatus::Reverted)
        throw ProtocolError(ErrorKind::State, fmt::format("commitment {} is already {}", id.value, to_string(c.status)));
    if (now < w.deadline)
        throw ProtocolError(ErrorKind::NotDue, fmt::format("window of commitment {} closes at {}, now {}", id.value,
                                                           w.deadline, now));
    const auto& schedule = delegations_.at(c.delegation).schedule;

    WindowEvaluation out;
    if (c.status == CommitmentStatus::Disputed) {
        out.outcome = WindowOutcome::Blocked;
        log_transition("blocked", c, w, now);
    } else if (c.probe) {
        out.outcome = WindowOutcome::ProbeClosed;
        set_status(c, CommitmentStatus::Reverted);
        log_transition("probe_closed", c, w, now);
    } else if (w.sign_offs.size() >= w.required) {
        finalize_bundle(accounts_, c.diffs);
        set_status(c, CommitmentStatus::Finalized);
        release_locks(c);
        out.outcome = WindowOutcome::Finalized;
        log_transition("finalized", c, w, now);
    } else {
        // past max_step the window re-arms with the terminal parameters
        std::uint32_t next = std::min(w.step + 1, schedule.max_step);
        w.step = next;
        w.opened_at = now;
        w.deadline = now + window_duration(next, schedule);
        w.required = required_challengers(next, schedule);
        out.outcome = WindowOutcome::Extended;
        log_transition("extended", c, w, now);
    }
    out.step = w.step;
    out.deadline = w.deadline;
    out.required = w.required;
    return out;
}

const DelegationRecord& ProtocolEngine::delegation(DelegationId id) const {
    auto it = delegations_.find(id);
    if (it == delegations_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("delegation {}", id.value));
    return it->second;
}

const Commitment& ProtocolEngine::commitment(CommitmentId id) const {
    auto it = commitments_.find(id);
    if (it == commitments_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("commitment {}", id.value));
    return it->second;
}

const ChallengeWindow& ProtocolEngine::window(CommitmentId id) const {
    auto it = windows_.find(id);
    if (it == windows_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("window of commitment {}", id.value));
    return it->second;
}

const Challenge& ProtocolEngine::challenge(ChallengeId id) const {
    auto it = challenges_.find(id);
    if (it == challenges_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("challenge {}", id.value));
    return it->second;
}

std::vector<NodeId> ProtocolEngine::probe_challengers(CommitmentId id) const {
    std::vector<NodeId> out;
    for (auto cid : window(id).challenges)
        out.push_back(challenges_.at(cid).challenger);
    return out;
}

std::optional<CommitmentId> ProtocolEngine::in_flight(const AccountId& account) const {
    auto it = locks_.find(account);
    if (it == locks_.end())
        return std::nullopt;
    return it->second;
}

Commitment& ProtocolEngine::commitment_mut(CommitmentId id) {
    auto it = commitments_.find(id);
    if (it == commitments_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("commitment {}", id.value));
    return it->second;
}

ChallengeWindow& ProtocolEngine::window_mut(CommitmentId id) {
    auto it = windows_.find(id);
    if (it == windows_.end())
        throw ProtocolError(ErrorKind::NotFound, fmt::format("window of commitment {}", id.value));
    return it->second;
}

void ProtocolEngine::set_status(Commitment& c, CommitmentStatus next) {
    if (!is_allowed_transition(c.status, next) || (next == CommitmentStatus::Reverted && c.status == CommitmentStatus::Pending && !c.probe))
        throw std::logic_error(fmt::format("illegal transition {} -> {} for commitment {}", to_string(c.status),
                                           to_string(next), c.id.value));
    c.status = next;
}

void ProtocolEngine::release_locks(const Commitment& c) {
    for (const auto& d : c.diffs) {
        auto it = locks_.find(d.account);
        if (it != locks_.end() && it->second == c.id)
            locks_.erase(it);
    }
}

void ProtocolEngine::log_transition(std::string_view kind, const Commitment& c, const ChallengeWindow& w, TimestampMs at,
                            std::optional<NodeId> node) {
    trace_.append(TraceRecord{.at = at,
                              .kind = std::string(kind),
                              .commitment = c.id.value,
                              .step = w.step,
                              .sign_offs = w.sign_offs.size(),
                              .required = w.required,
                              .status = std::string(to_string(c.status)),
                              .node = node});
}

} // namespace dfp
