#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfp/ledger.hpp"
#include "dfp/schedule.hpp"
#include "dfp/sim/random.hpp"
#include "dfp/trace.hpp"
#include "dfp/types.hpp"

namespace dfp {

enum class CommitmentStatus : std::uint8_t { Pending, Disputed, Finalized, Reverted };
enum class ChallengeStatus : std::uint8_t { Open, Upheld, Rejected };
enum class DelegationStatus : std::uint8_t { Active, Undelegated };
enum class Verdict : std::uint8_t { FraudProven, ChallengeInvalid };
enum class WindowOutcome : std::uint8_t { Finalized, Extended, Blocked, ProbeClosed };

std::string_view to_string(CommitmentStatus status);
std::string_view to_string(WindowOutcome outcome);

/// Edges of the commitment lifecycle. Extension keeps a commitment Pending.
/// Pending -> Reverted exists only for probes, which close without settling.
bool is_allowed_transition(CommitmentStatus from, CommitmentStatus to);

struct AccountState {
    AccountId account;
    Bytes data;
    std::uint64_t version = 0;
    bool delegated = false;
};

using AccountStore = std::map<AccountId, AccountState>;

struct StateDiff {
    AccountId account;
    Bytes data;
    std::uint64_t new_version = 0;
};

struct DelegationRecord {
    DelegationId id;
    std::vector<AccountId> accounts; // sorted, unique
    DurationMs max_lifetime = 0;
    DurationMs update_frequency = 0;
    FinalitySchedule schedule;
    std::vector<NodeId> challenger_pool;
    NodeId operator_id;
    TimestampMs created_at = 0;
    DelegationStatus status = DelegationStatus::Active;

    bool contains(const AccountId& account) const;
};

struct Commitment {
    CommitmentId id;
    NodeId operator_id;
    std::vector<StateDiff> diffs;
    std::string da_pointer;
    DelegationId delegation;
    TimestampMs submitted_at = 0;
    CommitmentStatus status = CommitmentStatus::Pending;
    bool probe = false;
};

struct ChallengeWindow {
    CommitmentId commitment;
    std::uint32_t step = 0;
    TimestampMs opened_at = 0;
    TimestampMs deadline = 0;
    std::uint64_t required = 0;
    std::vector<NodeId> sampled; // sorted
    std::set<NodeId> sign_offs;
    std::vector<ChallengeId> challenges;

    bool is_sampled(NodeId node) const;
};

struct Challenge {
    ChallengeId id;
    NodeId challenger;
    CommitmentId commitment;
    TimestampMs raised_at = 0;
    Lamports bond = 0;
    ChallengeStatus status = ChallengeStatus::Open;
};

struct DisputeVerdict {
    ChallengeId challenge;
    Verdict outcome = Verdict::FraudProven;
};

struct EngineConfig {
    Lamports min_challenge_bond = 1;
    /// Taken from the operator's bond when fraud is proven (clamped to what is escrowed).
    Lamports operator_slash = 0;
    /// Share of every slash paid to the counterparty; the rest is burned.
    std::uint32_t reward_share_ppm = kShareScale / 2;
};

struct WindowEvaluation {
    WindowOutcome outcome = WindowOutcome::Blocked;
    std::uint32_t step = 0;
    TimestampMs deadline = 0;
    std::uint64_t required = 0;
};

/// Applies every diff or none. Each diff must target an existing account whose
/// version is exactly new_version - 1; otherwise BundleConflict is thrown and
/// the store is unchanged.
void finalize_bundle(AccountStore& store, std::span<const StateDiff> diffs);

/// The assert/challenge state machine.
///
/// All transitions go through this object and are appended to its trace. It is
/// a single-writer type: move it between threads freely, but never mutate it
/// concurrently. Every rejected call throws ProtocolError and leaves the state
/// as it was.
class ProtocolEngine {
public:
    ProtocolEngine(EngineConfig config, std::uint64_t seed, bool retain_trace = true);

    // base layer
    void create_account(const AccountId& account, Bytes data = {});
    /// Plain base-layer write; rejected with Conflict while the account is delegated.
    void write_base_layer(const AccountId& account, Bytes data);
    const AccountState& account(const AccountId& account) const;
    const AccountStore& accounts() const { return accounts_; }

    DelegationId delegate(std::span<const AccountId> accounts, NodeId operator_id, const FinalitySchedule& schedule,
                          std::span<const NodeId> pool, DurationMs max_lifetime, TimestampMs now,
                          DurationMs update_frequency = 0);
    std::vector<AccountId> undelegate(DelegationId id, TimestampMs now);

    CommitmentId submit_commitment(DelegationId delegation, NodeId operator_id, std::vector<StateDiff> diffs,
                                   std::string da_pointer, TimestampMs now);

    /// Opens a decoy window addressed to `targets`. It goes through the same
    /// sign-off and challenge paths as a real commitment but never settles and
    /// never touches account state.
    CommitmentId open_probe(DelegationId delegation, std::vector<NodeId> targets, std::vector<StateDiff> diffs,
                            std::string da_pointer, TimestampMs now);

    /// Returns true if the sign-off was new.
    bool sign_off(CommitmentId id, NodeId challenger, TimestampMs now);
    ChallengeId raise_challenge(CommitmentId id, NodeId challenger, Lamports bond, TimestampMs now);
    CommitmentStatus resolve_dispute(const DisputeVerdict& verdict, TimestampMs now);
    WindowEvaluation evaluate_window(CommitmentId id, TimestampMs now);

    const DelegationRecord& delegation(DelegationId id) const;
    const Commitment& commitment(CommitmentId id) const;
    const ChallengeWindow& window(CommitmentId id) const;
    const Challenge& challenge(ChallengeId id) const;
    /// Nodes that challenged a probe, in the order they did so.
    std::vector<NodeId> probe_challengers(CommitmentId id) const;
    /// Commitment currently holding the account, if any.
    std::optional<CommitmentId> in_flight(const AccountId& account) const;

    std::uint64_t commitment_count() const { return commitments_.size(); }

    BondLedger& ledger() { return ledger_; }
    const BondLedger& ledger() const { return ledger_; }
    TraceLog& trace() { return trace_; }
    const TraceLog& trace() const { return trace_; }
    const EngineConfig& config() const { return config_; }

private:
    Commitment& commitment_mut(CommitmentId id);
    ChallengeWindow& window_mut(CommitmentId id);
    void set_status(Commitment& c, CommitmentStatus next);
    void release_locks(const Commitment& c);
    void log_transition(std::string_view kind, const Commitment& c, const ChallengeWindow& w, TimestampMs at,
                std::optional<NodeId> node = std::nullopt);
    CommitmentId open_window(DelegationRecord& record, Commitment c, std::vector<NodeId> sampled, TimestampMs now);

    EngineConfig config_;
    sim::Rng rng_;
    BondLedger ledger_;
    TraceLog trace_;
    AccountStore accounts_;
    std::map<DelegationId, DelegationRecord> delegations_;
    std::map<CommitmentId, Commitment> commitments_;
    std::map<CommitmentId, ChallengeWindow> windows_;
    std::map<ChallengeId, Challenge> challenges_;
    std::map<AccountId, CommitmentId> locks_;
    std::uint64_t next_delegation_ = 1;
    std::uint64_t next_commitment_ = 1;
    std::uint64_t next_challenge_ = 1;
};

} // namespace dfp
