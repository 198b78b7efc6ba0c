#include <gtest/gtest.h>

#include <functional>

#include "dfp/error.hpp"
#include "dfp/protocol.hpp"
#include "test_support.hpp"

namespace dfp {
namespace {

const NodeId kOp{1};
const NodeId kOther{2};
const NodeId kObserver{500};

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no ProtocolError thrown";
    return ErrorKind::NotFound;
}

class ProtocolTest : public ::testing::Test {
protected:
    void SetUp() override {
        for (std::uint64_t i = 0; i < 3; ++i) {
            accounts.push_back(AccountId::from_index(i));
            engine.create_account(accounts.back(), Bytes(8, static_cast<std::uint8_t>(i)));
        }
        pool = testing::node_range(100, 100);
        auto& ledger = engine.ledger();
        ledger.mint(kOp, 1'000'000);
        ledger.post_bond(kOp, 500'000, BondPurpose::OperatorBond);
        for (auto n : pool)
            ledger.mint(n, 10'000);
        ledger.mint(kObserver, 10'000);
    }

    DelegationId delegate_all(FinalitySchedule s = testing::reference_schedule()) {
        return engine.delegate(accounts, kOp, s, pool, 3'600'000, 0);
    }

    CommitmentId submit(DelegationId d, std::vector<std::size_t> which, TimestampMs now = 0) {
        std::vector<StateDiff> diffs;
        for (auto i : which)
            diffs.push_back(testing::diff_for(engine, accounts[i], Bytes(8, 0xEE)));
        return engine.submit_commitment(d, kOp, std::move(diffs), "da/x", now);
    }

    void sign_first(CommitmentId id, std::size_t count, TimestampMs now) {
        const auto& sampled = engine.window(id).sampled;
        for (std::size_t i = 0; i < count; ++i)
            engine.sign_off(id, sampled.at(i), now);
    }

    ProtocolEngine engine{EngineConfig{100, 100'000, 500'000}, 7};
    std::vector<AccountId> accounts;
    std::vector<NodeId> pool;
};

// ---------------------------------------------------------------- delegation

TEST_F(ProtocolTest, DelegateLocksAccounts) {
    auto d = engine.delegate(std::span(accounts.data(), 2), kOp, testing::reference_schedule(), pool, 3'600'000, 0);
    const auto& rec = engine.delegation(d);
    EXPECT_EQ(rec.status, DelegationStatus::Active);
    EXPECT_TRUE(engine.account(accounts[0]).delegated);
    EXPECT_TRUE(engine.account(accounts[1]).delegated);
    EXPECT_FALSE(engine.account(accounts[2]).delegated);
    EXPECT_EQ(kind_of([&] { engine.write_base_layer(accounts[0], Bytes{1}); }), ErrorKind::Conflict);
    engine.write_base_layer(accounts[2], Bytes{1});
    EXPECT_EQ(engine.account(accounts[2]).version, 1u);
}

TEST_F(ProtocolTest, DelegateTwiceConflicts) {
    engine.delegate(std::span(accounts.data(), 1), kOp, testing::reference_schedule(), pool, 3'600'000, 0);
    EXPECT_EQ(kind_of([&] {
                  engine.delegate(std::span(accounts.data(), 1), kOp, testing::reference_schedule(), pool, 3'600'000, 0);
              }),
              ErrorKind::Conflict);
}

TEST_F(ProtocolTest, DelegateEmptyRejected) {
    std::vector<AccountId> none;
    EXPECT_EQ(kind_of([&] { engine.delegate(none, kOp, testing::reference_schedule(), pool, 3'600'000, 0); }),
              ErrorKind::Domain);
}

TEST_F(ProtocolTest, PoolSmallerThanThresholdRejected) {
    std::vector<NodeId> small(pool.begin(), pool.begin() + 99);
    EXPECT_EQ(kind_of([&] { engine.delegate(accounts, kOp, testing::reference_schedule(), small, 3'600'000, 0); }),
              ErrorKind::Configuration);
    // a failed delegation leaves nothing locked
    EXPECT_FALSE(engine.account(accounts[0]).delegated);
    auto s = testing::reference_schedule();
    s.c0 = 0;
    std::vector<NodeId> empty;
    EXPECT_NO_THROW(engine.delegate(accounts, kOp, s, empty, 3'600'000, 0));
}

TEST_F(ProtocolTest, UndelegateReleasesAccounts) {
    auto d = delegate_all();
    auto released = engine.undelegate(d, 10);
    EXPECT_EQ(released.size(), 3u);
    EXPECT_FALSE(engine.account(accounts[0]).delegated);
    EXPECT_EQ(engine.delegation(d).status, DelegationStatus::Undelegated);
    EXPECT_EQ(kind_of([&] { engine.undelegate(d, 10); }), ErrorKind::State);
}

TEST_F(ProtocolTest, UndelegateBusyWhileDisputed) {
    auto d = delegate_all();
    auto c = submit(d, {0});
    engine.raise_challenge(c, pool[0], 100, 10);
    EXPECT_EQ(kind_of([&] { engine.undelegate(d, 20); }), ErrorKind::Busy);
    EXPECT_TRUE(engine.account(accounts[0]).delegated);
}

TEST_F(ProtocolTest, UndelegateAfterLifetimeExpiry) {
    auto d = delegate_all();
    EXPECT_EQ(kind_of([&] { submit(d, {0}, 3'600'001); }), ErrorKind::Domain);
    EXPECT_NO_THROW(engine.undelegate(d, 10'000'000));
    EXPECT_FALSE(engine.account(accounts[1]).delegated);
}

// ---------------------------------------------------------------- submission

TEST_F(ProtocolTest, SubmitOpensStepZeroWindow) {
    auto d = delegate_all();
    auto c = submit(d, {0, 1});
    const auto& w = engine.window(c);
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Pending);
    EXPECT_EQ(w.step, 0u);
    EXPECT_EQ(w.opened_at, 0);
    EXPECT_EQ(w.deadline, 500);
    EXPECT_EQ(w.required, 100u);
    EXPECT_EQ(w.sampled.size(), 100u);
}

TEST_F(ProtocolTest, SubmitByNonOperatorRejected) {
    auto d = delegate_all();
    std::vector<StateDiff> diffs{testing::diff_for(engine, accounts[0], Bytes{1})};
    EXPECT_EQ(kind_of([&] { engine.submit_commitment(d, kOther, diffs, "da", 0); }), ErrorKind::Authorization);
}

TEST_F(ProtocolTest, OverlappingSubmissionConflicts) {
    auto d = delegate_all();
    submit(d, {0, 1});
    EXPECT_EQ(kind_of([&] { submit(d, {1, 2}); }), ErrorKind::Conflict);
    EXPECT_NO_THROW(submit(d, {2}));
}

TEST_F(ProtocolTest, DiffOutsideDelegationRejected) {
    auto d = engine.delegate(std::span(accounts.data(), 1), kOp, testing::reference_schedule(), pool, 3'600'000, 0);
    std::vector<StateDiff> diffs{testing::diff_for(engine, accounts[1], Bytes{1})};
    EXPECT_EQ(kind_of([&] { engine.submit_commitment(d, kOp, diffs, "da", 0); }), ErrorKind::Domain);
    EXPECT_EQ(kind_of([&] { engine.submit_commitment(d, kOp, {}, "da", 0); }), ErrorKind::Domain);
}

TEST_F(ProtocolTest, SampleIsASubsetOfThePool) {
    auto s = testing::reference_schedule();
    s.c0 = 10;
    auto d = engine.delegate(accounts, kOp, s, pool, 3'600'000, 0);
    auto c = submit(d, {0});
    const auto& w = engine.window(c);
    ASSERT_EQ(w.sampled.size(), 10u);
    for (auto n : w.sampled)
        EXPECT_NE(std::find(pool.begin(), pool.end(), n), pool.end());
}

// ---------------------------------------------------------------- sign-off

TEST_F(ProtocolTest, SignOffIsIdempotent) {
    auto c = submit(delegate_all(), {0});
    EXPECT_TRUE(engine.sign_off(c, pool[0], 10));
    EXPECT_EQ(engine.window(c).sign_offs.size(), 1u);
    EXPECT_FALSE(engine.sign_off(c, pool[0], 20));
    EXPECT_EQ(engine.window(c).sign_offs.size(), 1u);
}

TEST_F(ProtocolTest, SignOffOutsideSampleRejected) {
    auto s = testing::reference_schedule();
    s.c0 = 10;
    auto c = submit(engine.delegate(accounts, kOp, s, pool, 3'600'000, 0), {0});
    const auto& w = engine.window(c);
    NodeId outsider = *std::find_if(pool.begin(), pool.end(), [&](NodeId n) { return !w.is_sampled(n); });
    EXPECT_EQ(kind_of([&] { engine.sign_off(c, outsider, 10); }), ErrorKind::NotSelected);
    EXPECT_EQ(kind_of([&] { engine.sign_off(c, kObserver, 10); }), ErrorKind::NotSelected);
}

TEST_F(ProtocolTest, SignOffAfterDeadlineRejected) {
    auto c = submit(delegate_all(), {0});
    EXPECT_NO_THROW(engine.sign_off(c, pool[0], 500));
    EXPECT_EQ(kind_of([&] { engine.sign_off(c, pool[1], 501); }), ErrorKind::TooLate);
}

TEST_F(ProtocolTest, SignOffAfterOwnChallengeIsInconsistent) {
    auto c = submit(delegate_all(), {0});
    auto ch = engine.raise_challenge(c, pool[0], 100, 10);
    engine.resolve_dispute({ch, Verdict::ChallengeInvalid}, 20);
    EXPECT_EQ(kind_of([&] { engine.sign_off(c, pool[0], 30); }), ErrorKind::InconsistentRole);
}

// ---------------------------------------------------------------- challenges

TEST_F(ProtocolTest, SampledChallengerDisputes) {
    auto c = submit(delegate_all(), {0});
    auto ch = engine.raise_challenge(c, pool[3], 100, 100);
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Disputed);
    EXPECT_EQ(engine.challenge(ch).status, ChallengeStatus::Open);
    EXPECT_EQ(engine.ledger().escrow(pool[3], BondPurpose::DisputeBond), 100u);
}

TEST_F(ProtocolTest, AnyoneMayChallenge) {
    auto c = submit(delegate_all(), {0});
    EXPECT_NO_THROW(engine.raise_challenge(c, kObserver, 100, 100));
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Disputed);
}

TEST_F(ProtocolTest, ChallengeBondRules) {
    auto c = submit(delegate_all(), {0});
    EXPECT_EQ(kind_of([&] { engine.raise_challenge(c, pool[0], 0, 10); }), ErrorKind::Bond);
    EXPECT_EQ(kind_of([&] { engine.raise_challenge(c, pool[0], 99, 10); }), ErrorKind::Bond);
    EXPECT_EQ(kind_of([&] { engine.raise_challenge(c, pool[0], 20'000, 10); }), ErrorKind::Funds);
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Pending);
}

TEST_F(ProtocolTest, ChallengeAtDeadlineAcceptedAfterRejected) {
    auto c = submit(delegate_all(), {0});
    EXPECT_EQ(kind_of([&] { engine.raise_challenge(c, pool[0], 100, 501); }), ErrorKind::TooLate);
    EXPECT_NO_THROW(engine.raise_challenge(c, pool[0], 100, 500));
}

TEST_F(ProtocolTest, SecondChallengeWhileDisputedIsStateError) {
    auto c = submit(delegate_all(), {0});
    engine.raise_challenge(c, pool[0], 100, 10);
    EXPECT_EQ(kind_of([&] { engine.raise_challenge(c, pool[1], 100, 10); }), ErrorKind::State);
}

// ---------------------------------------------------------------- disputes

TEST_F(ProtocolTest, FraudProvenRevertsAndSlashes) {
    auto c = submit(delegate_all(), {0, 1});
    auto ch = engine.raise_challenge(c, pool[0], 100, 10);
    auto status = engine.resolve_dispute({ch, Verdict::FraudProven}, 200);
    EXPECT_EQ(status, CommitmentStatus::Reverted);
    EXPECT_EQ(engine.challenge(ch).status, ChallengeStatus::Upheld);
    EXPECT_EQ(engine.ledger().escrow(kOp, BondPurpose::OperatorBond), 400'000u);
    // bond back plus half of the 100'000 slash
    EXPECT_EQ(engine.ledger().balance(pool[0]), 10'000u + 50'000u);
    EXPECT_EQ(engine.ledger().burned(), 50'000u);
    EXPECT_EQ(engine.account(accounts[0]).version, 0u);
    EXPECT_FALSE(engine.in_flight(accounts[0]));
    EXPECT_TRUE(engine.ledger().conserved());
}

TEST_F(ProtocolTest, ChallengeInvalidRestoresPendingAndBurnsBond) {
    auto c = submit(delegate_all(), {0});
    auto ch = engine.raise_challenge(c, pool[0], 100, 10);
    auto status = engine.resolve_dispute({ch, Verdict::ChallengeInvalid}, 200);
    EXPECT_EQ(status, CommitmentStatus::Pending);
    EXPECT_EQ(engine.challenge(ch).status, ChallengeStatus::Rejected);
    EXPECT_EQ(engine.window(c).deadline, 500);
    EXPECT_EQ(engine.ledger().balance(pool[0]), 9'900u);
    EXPECT_EQ(engine.ledger().balance(kOp), 500'000u + 50u);
    EXPECT_TRUE(engine.ledger().conserved());
}

TEST_F(ProtocolTest, VerdictTwiceIsStateError) {
    auto c = submit(delegate_all(), {0});
    auto ch = engine.raise_challenge(c, pool[0], 100, 10);
    engine.resolve_dispute({ch, Verdict::ChallengeInvalid}, 200);
    EXPECT_EQ(kind_of([&] { engine.resolve_dispute({ch, Verdict::FraudProven}, 300); }), ErrorKind::State);
}

TEST_F(ProtocolTest, RejectedChallengeAfterDeadlineEvaluatesImmediately) {
    auto c = submit(delegate_all(), {0});
    sign_first(c, 100, 10);
    auto ch = engine.raise_challenge(c, pool[0], 100, 20);
    EXPECT_EQ(engine.evaluate_window(c, 500).outcome, WindowOutcome::Blocked);
    engine.resolve_dispute({ch, Verdict::ChallengeInvalid}, 900);
    // no fresh window: the old deadline already passed
    auto r = engine.evaluate_window(c, 900);
    EXPECT_EQ(r.outcome, WindowOutcome::Finalized);
}

// ---------------------------------------------------------------- windows

TEST_F(ProtocolTest, FullSignOffsFinalize) {
    auto c = submit(delegate_all(), {0});
    sign_first(c, 100, 100);
    auto r = engine.evaluate_window(c, 500);
    EXPECT_EQ(r.outcome, WindowOutcome::Finalized);
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Finalized);
    EXPECT_EQ(engine.account(accounts[0]).version, 1u);
    EXPECT_EQ(engine.account(accounts[0]).data, Bytes(8, 0xEE));
    EXPECT_FALSE(engine.in_flight(accounts[0]));
}

TEST_F(ProtocolTest, ShortOfThresholdExtends) {
    auto c = submit(delegate_all(), {0});
    sign_first(c, 99, 100);
    auto r = engine.evaluate_window(c, 500);
    EXPECT_EQ(r.outcome, WindowOutcome::Extended);
    EXPECT_EQ(r.step, 1u);
    EXPECT_EQ(r.deadline, 2500);
    EXPECT_EQ(r.required, 70u);
    // sign-offs carry over, so the extended window already meets its threshold
    EXPECT_EQ(engine.window(c).sign_offs.size(), 99u);
    EXPECT_EQ(engine.evaluate_window(c, 2500).outcome, WindowOutcome::Finalized);
}

TEST_F(ProtocolTest, OpenDisputeBlocks) {
    auto c = submit(delegate_all(), {0});
    sign_first(c, 100, 100);
    engine.raise_challenge(c, kObserver, 100, 200);
    EXPECT_EQ(engine.evaluate_window(c, 500).outcome, WindowOutcome::Blocked);
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Disputed);
    EXPECT_EQ(engine.account(accounts[0]).version, 0u);
}

TEST_F(ProtocolTest, EvaluateBeforeDeadlineNotDue) {
    auto c = submit(delegate_all(), {0});
    EXPECT_EQ(kind_of([&] { engine.evaluate_window(c, 499); }), ErrorKind::NotDue);
}

TEST_F(ProtocolTest, SilentWindowExtendsUntilThresholdReachesZero) {
    auto s = testing::reference_schedule();
    s.c0 = 4;
    s.r_c = Ratio{1, 2};
    s.max_step = 4;
    auto c = submit(engine.delegate(accounts, kOp, s, pool, 1'000'000'000, 0), {0});
    TimestampMs now = 0;
    std::vector<std::uint64_t> thresholds;
    for (int i = 0; i < 6; ++i) {
        now = engine.window(c).deadline;
        auto r = engine.evaluate_window(c, now);
        if (r.outcome == WindowOutcome::Finalized)
            break;
        ASSERT_EQ(r.outcome, WindowOutcome::Extended);
        thresholds.push_back(r.required);
    }
    // 4 -> 2 -> 1 -> 0: the zero threshold window finalizes at its deadline
    EXPECT_EQ(thresholds, (std::vector<std::uint64_t>{2, 1, 0}));
    EXPECT_EQ(engine.commitment(c).status, CommitmentStatus::Finalized);
    EXPECT_EQ(now, 500 + 2000 + 8000 + 32000);
}

TEST_F(ProtocolTest, TerminalStepReArms) {
    auto s = testing::reference_schedule();
    s.max_step = 1;
    auto c = submit(engine.delegate(accounts, kOp, s, pool, 1'000'000'000, 0), {0});
    auto r1 = engine.evaluate_window(c, 500);
    EXPECT_EQ(r1.step, 1u);
    auto r2 = engine.evaluate_window(c, r1.deadline);
    EXPECT_EQ(r2.outcome, WindowOutcome::Extended);
    EXPECT_EQ(r2.step, 1u);
    EXPECT_EQ(r2.deadline, r1.deadline + 2000);
    EXPECT_EQ(r2.required, 70u);
}

// ---------------------------------------------------------------- bundles

TEST(FinalizeBundle, AllOrNothing) {
    AccountStore store;
    for (std::uint64_t i = 0; i < 3; ++i) {
        auto id = AccountId::from_index(i);
        store[id] = AccountState{id, Bytes{1}, 4, true};
    }
    std::vector<StateDiff> ok;
    for (std::uint64_t i = 0; i < 3; ++i)
        ok.push_back({AccountId::from_index(i), Bytes{9}, 5});
    finalize_bundle(store, ok);
    for (const auto& [_, s] : store) {
        EXPECT_EQ(s.version, 5u);
        EXPECT_EQ(s.data, Bytes{9});
    }

    auto stale = ok;
    for (auto& d : stale)
        d.new_version = 6;
    stale[1].new_version = 5; // stale
    try {
        finalize_bundle(store, stale);
        FAIL();
    } catch (const ProtocolError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BundleConflict);
    }
    for (const auto& [_, s] : store)
        EXPECT_EQ(s.version, 5u);

    EXPECT_THROW(finalize_bundle(store, {}), ProtocolError);
}

TEST_F(ProtocolTest, ThreeAccountBundleFinalizesTogether) {
    auto c = submit(delegate_all(), {0, 1, 2});
    sign_first(c, 100, 1);
    engine.evaluate_window(c, 500);
    for (const auto& a : accounts)
        EXPECT_EQ(engine.account(a).version, 1u);
}

// ---------------------------------------------------------------- trace

TEST(ProtocolTrace, ReplayIsDeterministic) {
    auto run = [] {
        ProtocolEngine e{EngineConfig{}, 1234};
        auto pool = testing::node_range(10, 20);
        for (auto n : pool)
            e.ledger().mint(n, 1'000);
        auto a = AccountId::from_index(1);
        e.create_account(a);
        auto s = testing::reference_schedule();
        s.c0 = 5;
        auto d = e.delegate(std::span(&a, 1), NodeId{1}, s, pool, 1'000'000, 0);
        auto c = e.submit_commitment(d, NodeId{1}, {StateDiff{a, Bytes{1, 2}, 1}}, "da", 0);
        auto w = e.window(c);
        e.sign_off(c, w.sampled[0], 10);
        e.evaluate_window(c, 500);
        return std::make_pair(e.trace().digest_hex(), e.window(c).sampled);
    };
    auto a = run();
    auto b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
}

TEST(ProtocolTrace, LineFormatIsStable) {
    TraceRecord r{3, 500, "finalized", 7, 1, 70, 70, "Finalized", NodeId{4}};
    EXPECT_EQ(r.to_line(),
              R"({"seq":3,"t":500,"kind":"finalized","commitment":7,"step":1,"sign_offs":70,"required":70,"status":"Finalized","node":4})");
}

// ---------------------------------------------------------------- exhaustive lifecycle enumeration

// Every action sequence up to a fixed length on a tiny instance. After each
// accepted action the commitment status may only move along the declared
// edges, and settlement must respect the threshold and open-dispute rules.
TEST(LifecycleEnumeration, StatusOnlyMovesAlongDeclaredEdges) {
    enum Act { SignA, SignB, ChallengeA, ChallengeObserver, Upheld, Rejected, Deadline, Tick };
    constexpr int kActs = 8;
    constexpr int kDepth = 6;

    std::uint64_t sequences = 0, finalized_paths = 0, reverted_paths = 0;
    std::vector<int> seq;
    std::function<void()> dfs = [&] {
        ++sequences;
        ProtocolEngine e{EngineConfig{1, 10, 500'000}, 1};
        const NodeId op{1}, a{2}, b{3}, observer{4};
        for (auto n : {op, a, b, observer})
            e.ledger().mint(n, 1'000);
        e.ledger().post_bond(op, 100, BondPurpose::OperatorBond);
        auto acct = AccountId::from_index(0);
        e.create_account(acct);
        FinalitySchedule s{10, 2, 2, Ratio{1, 2}, 2};
        std::vector<NodeId> pool{a, b};
        auto d = e.delegate(std::span(&acct, 1), op, s, pool, 1'000'000, 0);
        auto c = e.submit_commitment(d, op, {StateDiff{acct, Bytes{7}, 1}}, "da", 0);
        TimestampMs now = 0;
        std::optional<ChallengeId> open;

        for (int act : seq) {
            auto before = e.commitment(c).status;
            auto signed_before = e.window(c).sign_offs.size();
            auto required_before = e.window(c).required;
            try {
                switch (act) {
                case SignA: e.sign_off(c, a, now); break;
                case SignB: e.sign_off(c, b, now); break;
                case ChallengeA: open = e.raise_challenge(c, a, 1, now); break;
                case ChallengeObserver: open = e.raise_challenge(c, observer, 1, now); break;
                case Upheld:
                    if (open)
                        e.resolve_dispute({*open, Verdict::FraudProven}, now);
                    break;
                case Rejected:
                    if (open)
                        e.resolve_dispute({*open, Verdict::ChallengeInvalid}, now);
                    break;
                case Deadline:
                    if (before == CommitmentStatus::Pending || before == CommitmentStatus::Disputed) {
                        now = std::max(now, e.window(c).deadline);
                        e.evaluate_window(c, now);
                    }
                    break;
                case Tick: now += 3; break;
                }
            } catch (const ProtocolError&) {
                ASSERT_EQ(e.commitment(c).status, before);
            }
            auto after = e.commitment(c).status;
            ASSERT_TRUE(after == before || is_allowed_transition(before, after))
                << to_string(before) << " -> " << to_string(after);
            if (after == CommitmentStatus::Finalized && before != CommitmentStatus::Finalized) {
                ASSERT_EQ(before, CommitmentStatus::Pending);
                ASSERT_GE(signed_before, required_before);
                ASSERT_EQ(e.account(acct).version, 1u);
            }
            if (after == CommitmentStatus::Reverted)
                ASSERT_EQ(e.account(acct).version, 0u);
            for (const auto& w : {e.window(c)})
                for (auto n : w.sign_offs)
                    ASSERT_TRUE(w.is_sampled(n));
            ASSERT_TRUE(e.ledger().conserved());
        }
        finalized_paths += e.commitment(c).status == CommitmentStatus::Finalized;
        reverted_paths += e.commitment(c).status == CommitmentStatus::Reverted;

        if (seq.size() == kDepth)
            return;
        for (int act = 0; act < kActs; ++act) {
            seq.push_back(act);
            dfs();
            seq.pop_back();
            if (::testing::Test::HasFatalFailure())
                return;
        }
    };
    dfs();
    EXPECT_GT(finalized_paths, 0u);
    EXPECT_GT(reverted_paths, 0u);
    EXPECT_EQ(sequences, (std::uint64_t{1} << (3 * (kDepth + 1))) / 7); // sum of 8^k for k = 0..6
}

} // namespace
} // namespace dfp
