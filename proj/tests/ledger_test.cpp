#include <gtest/gtest.h>

#include <random>

#include "dfp/error.hpp"
#include "dfp/ledger.hpp"
#include "dfp/probe.hpp"
#include "test_support.hpp"

namespace dfp {
namespace {

const NodeId kOp{1}, kAlice{2}, kBob{3};

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no ProtocolError thrown";
    return ErrorKind::NotFound;
}

TEST(PostBond, MovesBalanceToEscrow) {
    BondLedger l;
    l.mint(kOp, 1000);
    l.post_bond(kOp, 1000, BondPurpose::OperatorBond);
    EXPECT_EQ(l.balance(kOp), 0u);
    EXPECT_EQ(l.escrow(kOp, BondPurpose::OperatorBond), 1000u);
    EXPECT_TRUE(l.conserved());
}

TEST(PostBond, InsufficientFunds) {
    BondLedger l;
    l.mint(kOp, 1000);
    EXPECT_EQ(kind_of([&] { l.post_bond(kOp, 1001, BondPurpose::OperatorBond); }), ErrorKind::Funds);
    EXPECT_EQ(l.balance(kOp), 1000u);
}

TEST(PostBond, ZeroRejected) {
    BondLedger l;
    l.mint(kOp, 1000);
    EXPECT_EQ(kind_of([&] { l.post_bond(kOp, 0, BondPurpose::OperatorBond); }), ErrorKind::Bond);
}

BondLedger slashable(Lamports escrow) {
    BondLedger l;
    l.mint(kOp, escrow);
    l.mint(kAlice, 0);
    l.post_bond(kOp, escrow, BondPurpose::OperatorBond);
    return l;
}

TEST(ApplyVerdict, EvenSplit) {
    auto l = slashable(1000);
    auto out = l.apply_verdict({kOp, BondPurpose::OperatorBond, 1000, SlashReason::FraudProven, kAlice, 500'000});
    EXPECT_EQ(out.rewarded, 500u);
    EXPECT_EQ(out.burned, 500u);
    EXPECT_EQ(l.balance(kAlice), 500u);
    EXPECT_EQ(l.burned(), 500u);
    EXPECT_TRUE(l.conserved());
}

TEST(ApplyVerdict, OddAmountFloorsRewardRemainderBurned) {
    auto l = slashable(999);
    auto out = l.apply_verdict({kOp, BondPurpose::OperatorBond, 999, SlashReason::FraudProven, kAlice, 500'000});
    EXPECT_EQ(out.rewarded, 499u);
    EXPECT_EQ(out.burned, 500u);
    EXPECT_TRUE(l.conserved());
}

TEST(ApplyVerdict, FullRewardBurnsNothing) {
    auto l = slashable(1000);
    auto out = l.apply_verdict({kOp, BondPurpose::OperatorBond, 1000, SlashReason::FraudProven, kAlice, kShareScale});
    EXPECT_EQ(out.rewarded, 1000u);
    EXPECT_EQ(l.burned(), 0u);
}

TEST(ApplyVerdict, OverSlashRejected) {
    auto l = slashable(1000);
    EXPECT_EQ(kind_of([&] {
                  l.apply_verdict({kOp, BondPurpose::OperatorBond, 1001, SlashReason::FraudProven, kAlice, 0});
              }),
              ErrorKind::Amount);
    EXPECT_EQ(l.escrow(kOp, BondPurpose::OperatorBond), 1000u);
}

TEST(ApplyVerdict, RewardWithoutRecipientRejected) {
    auto l = slashable(1000);
    EXPECT_EQ(kind_of([&] {
                  l.apply_verdict({kOp, BondPurpose::OperatorBond, 10, SlashReason::FraudProven, std::nullopt, 1});
              }),
              ErrorKind::Amount);
}

TEST(ShareFromFraction, Bounds) {
    EXPECT_EQ(share_from_fraction(0.5), 500'000u);
    EXPECT_EQ(share_from_fraction(1.0), kShareScale);
    EXPECT_THROW(share_from_fraction(1.5), ProtocolError);
    EXPECT_THROW(share_from_fraction(-0.1), ProtocolError);
}

// Random operation sequences: supply is conserved exactly and nothing goes negative
// (unsigned quantities would wrap to huge values, so bounding by total supply checks that).
TEST(LedgerProperty, ConservationUnderRandomOperations) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 gen(seed);
        BondLedger l;
        const std::vector<NodeId> nodes = testing::node_range(1, 8);
        for (auto n : nodes)
            l.mint(n, 1 + gen() % 1'000'000);
        const BondPurpose purposes[] = {BondPurpose::OperatorBond, BondPurpose::ChallengerBond,
                                        BondPurpose::DisputeBond};
        for (int step = 0; step < 2'000; ++step) {
            auto party = nodes[gen() % nodes.size()];
            auto purpose = purposes[gen() % 3];
            try {
                switch (gen() % 3) {
                case 0: l.post_bond(party, gen() % 200'000, purpose); break;
                case 1: l.release_bond(party, gen() % 100'000, purpose); break;
                case 2: {
                    auto to = nodes[gen() % nodes.size()];
                    l.apply_verdict({party, purpose, gen() % 100'000, SlashReason::FraudProven, to,
                                     static_cast<std::uint32_t>(gen() % (kShareScale + 1))});
                    break;
                }
                }
            } catch (const ProtocolError&) {
                // rejected operations must leave the ledger untouched; checked below
            }
            ASSERT_TRUE(l.conserved()) << "seed " << seed << " step " << step;
            for (const auto& e : l.snapshot()) {
                ASSERT_LE(e.balance, l.total_supply());
                ASSERT_LE(e.operator_bond + e.challenger_bond + e.dispute_bond, l.total_supply());
            }
        }
    }
}

class ProbeTest : public ::testing::Test {
protected:
    void SetUp() override {
        engine.create_account(account, Bytes(16, 0x11));
        pool = testing::node_range(10, 10);
        for (auto n : pool) {
            engine.ledger().mint(n, 10'000);
            engine.ledger().post_bond(n, 1'000, BondPurpose::ChallengerBond);
        }
        FinalitySchedule s = testing::reference_schedule();
        s.c0 = 10;
        delegation = engine.delegate(std::span(&account, 1), kOp, s, pool, 1'000'000, 0);
    }

    Probe issue(std::vector<NodeId> targets) {
        StateDiff honest{account, Bytes(16, 0x22), engine.account(account).version + 1};
        return issue_probe(engine, delegation, std::move(targets), honest, "da/probe", 0, 99);
    }

    ProtocolEngine engine{EngineConfig{}, 1};
    AccountId account = AccountId::from_index(0);
    std::vector<NodeId> pool;
    DelegationId delegation;
};

TEST_F(ProbeTest, DecoyDiffersFromHonestDiff) {
    auto p = issue(pool);
    const auto& c = engine.commitment(p.commitment);
    EXPECT_TRUE(c.probe);
    EXPECT_NE(c.diffs.front().data, Bytes(16, 0x22));
}

TEST_F(ProbeTest, NeverFinalizesEvenWithFullSignOffs) {
    auto p = issue(pool);
    for (auto n : pool)
        engine.sign_off(p.commitment, n, 100);
    auto before = engine.account(account);
    auto result = engine.evaluate_window(p.commitment, 500);
    EXPECT_EQ(result.outcome, WindowOutcome::ProbeClosed);
    EXPECT_FALSE(p.finalizable());
    EXPECT_EQ(engine.account(account).version, before.version);
    EXPECT_EQ(engine.account(account).data, before.data);
}

TEST_F(ProbeTest, EmptyTargetsRejected) {
    EXPECT_EQ(kind_of([&] { issue({}); }), ErrorKind::Domain);
}

TEST_F(ProbeTest, SignersSlashedChallengersRewarded) {
    auto p = issue(pool);
    // first 3 sign the bad diff, the next 2 challenge it
    for (int i = 0; i < 3; ++i)
        engine.sign_off(p.commitment, pool[i], 10);
    for (int i = 3; i < 5; ++i)
        engine.raise_challenge(p.commitment, pool[i], 100, 10);
    engine.evaluate_window(p.commitment, 500);

    auto supply = engine.ledger().total_supply();
    auto events = assess_probe(engine.ledger(), p, collect_probe_responses(engine, p), ProbePenalty{400, 500'000});
    ASSERT_EQ(events.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(events[i].party, pool[i]);
        EXPECT_EQ(events[i].reason, SlashReason::LazyProbeFailure);
        EXPECT_EQ(events[i].amount, 400u);
        EXPECT_EQ(engine.ledger().escrow(pool[i], BondPurpose::ChallengerBond), 600u);
    }
    // rewards dealt round-robin: pool[3] gets two, pool[4] one
    EXPECT_EQ(engine.ledger().balance(pool[3]), 9'000u + 400u);
    EXPECT_EQ(engine.ledger().balance(pool[4]), 9'000u + 200u);
    EXPECT_EQ(engine.ledger().burned(), 600u);
    EXPECT_EQ(engine.ledger().total_supply(), supply);
    EXPECT_TRUE(engine.ledger().conserved());
}

TEST_F(ProbeTest, NoSignersNoSlashes) {
    auto p = issue(pool);
    auto events = assess_probe(engine.ledger(), p, collect_probe_responses(engine, p), ProbePenalty{400, 500'000});
    EXPECT_TRUE(events.empty());
}

TEST_F(ProbeTest, SignerWithEmptyEscrowGetsZeroSlash) {
    auto p = issue(pool);
    engine.ledger().release_bond(pool[0], 1'000, BondPurpose::ChallengerBond);
    engine.sign_off(p.commitment, pool[0], 10);
    auto events = assess_probe(engine.ledger(), p, collect_probe_responses(engine, p), ProbePenalty{400, 500'000});
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].amount, 0u);
    EXPECT_TRUE(engine.ledger().conserved());
}

TEST_F(ProbeTest, AssessingTwiceIsAStateError) {
    auto p = issue(pool);
    auto responses = collect_probe_responses(engine, p);
    assess_probe(engine.ledger(), p, responses, ProbePenalty{});
    EXPECT_EQ(kind_of([&] { assess_probe(engine.ledger(), p, responses, ProbePenalty{}); }), ErrorKind::State);
}

TEST_F(ProbeTest, ResponsesFromNonTargetsIgnored) {
    std::vector<NodeId> targets(pool.begin(), pool.begin() + 3);
    auto p = issue(targets);
    ProbeResponses fake{{pool[5]}, {}};
    auto events = assess_probe(engine.ledger(), p, fake, ProbePenalty{400, 0});
    EXPECT_TRUE(events.empty());
}

} // namespace
} // namespace dfp
