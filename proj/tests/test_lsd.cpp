#include <doctest.h>

#include "lsdsim/lsd.hpp"
#include "lsdsim/rng.hpp"
#include "support/oracles.hpp"

using namespace lsdsim;

namespace {

const u256 WAD = wad_one();
const u256 E18 = WAD;

RebasingLsd canonical_rebased() {
    // (100e18, 100e18), rewards 1e18, fee 0.1: the worked rebase.
    RebasingLsd s;
    s.protocolFee = u256("100000000000000000");
    s.stake("alice", u256(50) * E18);
    s.stake("bob", u256(50) * E18);
    s.rebase(E18);
    return s;
}

} // namespace

TEST_CASE("rebasing stake at parity and bootstrap") {
    RebasingLsd s;
    SUBCASE("bootstrap mints 1:1") {
        Amount got = s.stake("alice", u256(5) * E18);
        CHECK(got == u256(5) * E18);
        CHECK(s.sharesOf["alice"] == u256(5) * E18);
    }
    SUBCASE("parity pool mints 1:1") {
        s.stake("seed", u256(100) * E18);
        Amount got = s.stake("alice", u256(10) * E18);
        CHECK(got == u256(10) * E18);
        CHECK(s.sharesOf["alice"] == u256(10) * E18);
        CHECK(s.balance_of("alice") == u256(10) * E18);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(s.stake("alice", 0), SimError);
        s.paused = true;
        CHECK_THROWS_AS(s.stake("alice", E18), SimError);
    }
}

TEST_CASE("the worked rebase: shares2mint, share price, fee value") {
    RebasingLsd s = canonical_rebased();

    auto oracle = oracles::rebase_oracle(u256(100) * E18, u256(100) * E18, E18,
                                         u256("100000000000000000"));
    CHECK(oracles::big(s.totalShares - u256(100) * E18) == oracle.shares2mint);
    // 10e18/100.9 shares
    CHECK(s.totalShares == u256("100099108027750247770"));

    // p_share lands exactly on 1.009 (the floor is one wei-fraction above).
    CHECK(s.share_price() == u256("1009000000000000000"));

    // 50-share holder reads 50.45 stETH.
    CHECK(s.balance_of("alice") == u256("50450000000000000000"));

    // The minted fee shares are worth rewards*protocolFee within one wei.
    Amount treasuryValue = s.balance_of(s.treasury);
    CHECK(abs_diff(treasuryValue, u256("100000000000000000")) <= 1);
}

TEST_CASE("rebase edge cases") {
    RebasingLsd s;
    s.protocolFee = u256("100000000000000000");
    CHECK_THROWS_AS(s.rebase(E18), SimError); // NotBootstrapped
    s.stake("alice", u256(100) * E18);

    SUBCASE("zero rewards change nothing") {
        Wad before = s.share_price();
        CHECK(s.rebase(0) == before);
        CHECK(s.totalShares == u256(100) * E18);
    }
    SUBCASE("fee-free rebase is pure price growth") {
        s.protocolFee = 0;
        Wad p = s.rebase(E18);
        CHECK(p == u256("1010000000000000000"));
        CHECK(s.totalShares == u256(100) * E18);
    }
}

TEST_CASE("stake against a rebased share price") {
    RebasingLsd s = canonical_rebased();
    // 10.09 ETH at p_share 1.009 buys 10e18 shares.
    Amount before = s.sharesOf["alice"];
    s.stake("carol", u256("10090000000000000000"));
    CHECK(abs_diff(s.sharesOf["carol"], u256(10) * E18) <= 1);
    CHECK(s.sharesOf["alice"] == before);
}

TEST_CASE("unstake redeems 1:1 once withdrawals open") {
    RebasingLsd s;
    s.stake("alice", u256(10) * E18);
    SUBCASE("rate 1") {
        Amount eth = s.unstake("alice", u256(10) * E18, true);
        CHECK(eth == u256(10) * E18);
        CHECK(s.totalEth == 0);
        CHECK(s.totalShares == 0);
    }
    SUBCASE("disabled pre-Shapella") {
        CHECK_THROWS_WITH_AS(s.unstake("alice", u256(10) * E18, false),
                             doctest::Contains("WithdrawalsDisabled"), SimError);
    }
    SUBCASE("insufficient balance") {
        RebasingLsd t;
        t.stake("bob", u256(9) * E18);
        CHECK_THROWS_WITH_AS(t.unstake("bob", u256(10) * E18, true),
                             doctest::Contains("InsufficientBalance"), SimError);
    }
}

TEST_CASE("slash reduces backing with no share mint") {
    RebasingLsd s;
    s.stake("alice", u256(100) * E18);
    s.slash(u256(10) * E18);
    CHECK(s.totalEth == u256(90) * E18);
    CHECK(s.totalShares == u256(100) * E18);
    CHECK(s.share_price() == u256("900000000000000000"));
    CHECK_THROWS_AS(s.slash(u256(1000) * E18), SimError);
}

TEST_CASE("rebasing conservation under random operation sequences") {
    Xoshiro256 rng(99);
    for (int seq = 0; seq < 200; ++seq) {
        RebasingLsd s;
        s.protocolFee = u256(rng.below(999'999'999) * 1'000'000'000ULL);
        int holders = 1 + static_cast<int>(rng.below(49));
        auto holder = [&](int i) { return "h" + std::to_string(i); };
        s.stake(holder(0), E18 * u256(1 + rng.below(1000)));
        for (int op = 0; op < 40; ++op) {
            int who = static_cast<int>(rng.below(holders));
            switch (rng.below(4)) {
                case 0:
                    s.stake(holder(who), 1 + u256(rng.next() % (1'000'000'000'000'000'000ULL)));
                    break;
                case 1:
                    s.rebase(u256(rng.below(1'000'000'000'000'000'000ULL)));
                    break;
                case 2: {
                    Amount loss = u256(rng.below(1'000'000'000'000'000ULL));
                    if (loss < s.totalEth) s.slash(loss);
                    break;
                }
                case 3: {
                    Amount bal = s.balance_of(holder(who));
                    if (bal > 1) s.unstake(holder(who), bal / 2, true);
                    break;
                }
            }
        }
        Amount sum = s.sum_balances();
        CHECK(abs_diff(sum, s.totalEth) <= u256(s.sharesOf.size()));
        // fee shares priced at the new share price always equal
        // rewards*protocolFee within a wei (checked via oracle per rebase in
        // the worked-example test; here we just keep the ledger identity).
        Amount shareSum = 0;
        for (auto& [h, sh] : s.sharesOf) shareSum += sh;
        CHECK(shareSum == s.totalShares);
    }
}

TEST_CASE("positive rebase with partial fee strictly raises the rational share price") {
    Xoshiro256 rng(7);
    for (int i = 0; i < 100; ++i) {
        RebasingLsd s;
        s.protocolFee = u256(rng.below(999'999'999'999'999'999ULL)); // < 1e18
        s.stake("a", E18 * u256(1 + rng.below(100000)));
        oracles::BigRat before(oracles::big(s.totalEth), oracles::big(s.totalShares));
        Amount rewards = 1 + u256(rng.below(1'000'000'000'000'000'000ULL));
        s.rebase(rewards);
        oracles::BigRat after(oracles::big(s.totalEth), oracles::big(s.totalShares));
        CHECK(after > before);
    }
}

TEST_CASE("reward-bearing exchange rate follows the ratio") {
    RewardBearingLsd s;
    s.depositPool.maxCapacity = u256(1'000'000) * E18;
    CHECK(s.exchange_rate() == WAD); // bootstrap convention
    s.stake("alice", u256(1000) * E18);
    CHECK(s.exchange_rate() == WAD);
    s.accrue(u256(50) * E18);
    CHECK(s.exchange_rate() == u256("1050000000000000000"));
}

TEST_CASE("reward-bearing stake mints at the current rate") {
    RewardBearingLsd s;
    s.depositPool.maxCapacity = u256(1'000'000) * E18;
    s.stake("seed", u256(1000) * E18);
    s.accrue(u256(50) * E18);
    SUBCASE("21 ETH at 1.05 buys 20 rETH") {
        CHECK(s.stake("alice", u256(21) * E18) == u256(20) * E18);
    }
    SUBCASE("zero stake") { CHECK_THROWS_AS(s.stake("alice", 0), SimError); }
    SUBCASE("capacity gate") {
        RewardBearingLsd t;
        t.depositPool.maxCapacity = u256(100) * E18;
        t.stake("seed", u256(90) * E18);
        CHECK_THROWS_WITH_AS(t.stake("alice", u256(20) * E18),
                             doctest::Contains("DepositPoolFull"), SimError);
        CHECK(t.stake("alice", u256(10) * E18) == u256(10) * E18);
    }
}

TEST_CASE("accrue is additive and touches no balances") {
    RewardBearingLsd a, b;
    a.depositPool.maxCapacity = b.depositPool.maxCapacity = u256(10000) * E18;
    a.stake("alice", u256(1000) * E18);
    b.stake("alice", u256(1000) * E18);
    a.accrue(u256(50) * E18);
    b.accrue(u256(25) * E18);
    b.accrue(u256(25) * E18);
    CHECK(a.exchange_rate() == b.exchange_rate());
    CHECK(a.balanceOf["alice"] == b.balanceOf["alice"]);
    Wad before = a.exchange_rate();
    CHECK(a.accrue(0) == before);

    Xoshiro256 rng(3);
    for (int i = 0; i < 200; ++i) {
        RewardBearingLsd x, y;
        x.depositPool.maxCapacity = y.depositPool.maxCapacity = u256(10000) * E18;
        x.stake("s", u256(1000) * E18);
        y.stake("s", u256(1000) * E18);
        std::uint64_t total = rng.below(1'000'000'000'000'000'000ULL);
        std::uint64_t first = total == 0 ? 0 : rng.below(total);
        x.accrue(u256(total));
        y.accrue(u256(first));
        y.accrue(u256(total - first));
        CHECK(x.exchange_rate() == y.exchange_rate());
    }
}

TEST_CASE("burn redeems at the rate and shrinks principal proportionally") {
    RewardBearingLsd s;
    s.depositPool.maxCapacity = u256(10000) * E18;
    s.stake("alice", u256(1000) * E18);
    s.accrue(u256(50) * E18);
    SUBCASE("inverse of the stake example") {
        CHECK(s.burn("alice", u256(20) * E18) == u256(21) * E18);
        // proportional split keeps the sum exact
        CHECK(s.totalEthStaked + s.stakingRewardInEth == u256(1029) * E18);
    }
    SUBCASE("zero burn") { CHECK(s.burn("alice", 0) == 0); }
    SUBCASE("insufficient balance") {
        CHECK_THROWS_AS(s.burn("alice", u256(5000) * E18), SimError);
    }
    SUBCASE("stake then burn round trip loses at most 2 wei") {
        Xoshiro256 rng(17);
        for (int i = 0; i < 200; ++i) {
            Amount in = 1 + u256(rng.next() % (1'000'000'000'000'000'000ULL));
            RewardBearingLsd t = s;
            Amount minted = t.stake("bob", in);
            Amount back = t.burn("bob", minted);
            CHECK(back <= in);
            CHECK(abs_diff(back, in) <= 2);
        }
    }
}

TEST_CASE("exchange rate never decreases under accruals and stakes") {
    Xoshiro256 rng(23);
    RewardBearingLsd s;
    s.depositPool.maxCapacity = u256("1000000000000000000000000000");
    s.stake("seed", u256(100) * E18);
    Wad prev = s.exchange_rate();
    for (int i = 0; i < 300; ++i) {
        if (rng.chance(1, 2))
            s.accrue(u256(rng.below(1'000'000'000'000'000'000ULL)));
        else
            s.stake("h" + std::to_string(rng.below(10)),
                    1 + u256(rng.below(1'000'000'000'000'000'000ULL)));
        Wad rate = s.exchange_rate();
        CHECK(rate >= prev);
        CHECK(rate >= WAD);
        prev = rate;
    }
}

TEST_CASE("deposit pool assignment frees capacity") {
    DepositPool pool;
    pool.maxCapacity = u256(100) * E18;
    pool.balance = u256(100) * E18;
    SUBCASE("full drain") {
        pool.assign(u256(100) * E18);
        CHECK(pool.balance == 0);
    }
    SUBCASE("one prerequisite quantum") {
        pool.balance = u256(16) * E18;
        pool.assign(u256(16) * E18);
        CHECK(pool.balance == 0);
    }
    SUBCASE("assign beyond balance") {
        pool.balance = 0;
        CHECK_THROWS_WITH_AS(pool.assign(1), doctest::Contains("AssignExceedsBalance"), SimError);
    }
}

TEST_CASE("deposit pool balance never exceeds capacity under random sequences") {
    Xoshiro256 rng(31);
    for (int seq = 0; seq < 100; ++seq) {
        RewardBearingLsd s;
        s.depositPool.maxCapacity = E18 * u256(1 + rng.below(1000));
        for (int op = 0; op < 50; ++op) {
            Amount v = 1 + u256(rng.below(50)) * E18 / 10;
            try {
                if (rng.chance(2, 3))
                    s.stake("h", v);
                else
                    s.depositPool.assign(v);
            } catch (const SimError&) {
                // rejected ops must not have moved the balance past the cap
            }
            CHECK(s.depositPool.balance <= s.depositPool.maxCapacity);
        }
    }
}

TEST_CASE("dual token: parity mint, vault shares, reward accrual") {
    DualTokenLsd s;
    CHECK(s.stake("alice", u256(10) * E18) == u256(10) * E18);
    CHECK(s.baseSupply == u256(10) * E18);

    CHECK(s.enter_vault("alice", u256(10) * E18) == u256(10) * E18);
    CHECK(s.vault_share_price() == WAD);

    s.vault_accrue(E18);
    CHECK(s.vault_share_price() == u256("1100000000000000000"));
    CHECK(s.baseSupply >= s.vaultAssets);

    Wad before = s.vault_share_price();
    s.vault_accrue(0);
    CHECK(s.vault_share_price() == before);

    CHECK_THROWS_AS(s.stake("alice", 0), SimError);
    CHECK_THROWS_AS(s.enter_vault("alice", E18), SimError); // balance now in vault
}
