#include <doctest.h>

#include "lsdsim/arbitrage.hpp"
#include "lsdsim/rng.hpp"
#include "lsdsim/serialize.hpp"
#include "support/oracles.hpp"

using namespace lsdsim;

namespace {

const u256 E18 = wad_one();

// A self-contained market: one protocol, one pool, a funded trader/lender.
struct Fixture {
    RebasingLsd rebasing;
    RewardBearingLsd rewardBearing;
    Pool pool;
    std::map<HolderId, Amount> eth;
    EventTrace trace;

    Market market(bool rebasingKind) {
        Market m;
        m.rebasing = rebasingKind ? &rebasing : nullptr;
        m.rewardBearing = rebasingKind ? nullptr : &rewardBearing;
        m.pool = &pool;
        m.eth = &eth;
        m.shapellaEnabled = true;
        m.trace = &trace;
        return m;
    }

    std::string fingerprint() const {
        KvMap kv;
        encode(kv, "rebasing.", rebasing);
        encode(kv, "rewardBearing.", rewardBearing);
        encode(kv, "pool.", pool);
        for (const auto& [h, v] : eth) kv["eth." + h] = to_dec_string(v);
        return kv_to_blob(kv);
    }
};

// Rebasing protocol against a weighted pool with a planted discrepancy.
Fixture weighted_fixture(const Amount& poolEth, const Amount& poolLsd) {
    Fixture f;
    f.rebasing.stake("genesis", poolLsd);
    WeightedPool wp;
    wp.feeBps = 0;
    wp.add_liquidity("genesis", {poolLsd, poolEth});
    f.rebasing.transfer("genesis", "pool", poolLsd);
    f.pool = wp;
    f.eth["trader"] = u256(1000) * E18;
    f.eth["lender"] = u256(1'000'000) * E18;
    return f;
}

// Reward-bearing protocol against a weighted pool; deposit pool headroom is
// configurable to stage the barrier.
Fixture reward_fixture(const Amount& poolEth, const Amount& poolLsd, const Amount& extraCapacity) {
    Fixture f;
    f.rewardBearing.depositPool.maxCapacity = poolLsd + extraCapacity;
    f.rewardBearing.stake("genesis", poolLsd);
    WeightedPool wp;
    wp.feeBps = 0;
    wp.add_liquidity("genesis", {poolLsd, poolEth});
    f.rewardBearing.transfer("genesis", "pool", poolLsd);
    f.pool = wp;
    f.eth["trader"] = u256(1000) * E18;
    f.eth["lender"] = u256(1'000'000) * E18;
    return f;
}

} // namespace

TEST_CASE("no discrepancy means no profit") {
    auto f = weighted_fixture(u256(1000) * E18, u256(1000) * E18);
    Market m = f.market(true);
    auto out = arb_stake_swap(m, "trader", E18, {});
    CHECK(out.profit <= 0);
}

TEST_CASE("the closed-form weighted example") {
    auto f = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m = f.market(true);
    auto out = arb_stake_swap(m, "trader", E18, {});
    // x1 = 1010*1/(1000+1)
    CHECK(out.grossOut == u256("1008991008991008991"));
    CHECK(out.profit == i256("8991008991008991"));
    CHECK(out.sizeIn == E18);
    CHECK_FALSE(out.usedFlashLoan);
    // the trace carries the stake and the swap in one transaction
    REQUIRE(f.trace.size() == 2);
    CHECK(f.trace[0].kind == EventKind::Stake);
    CHECK(f.trace[1].kind == EventKind::Swap);
    CHECK(f.trace[0].txHash == f.trace[1].txHash);
}

TEST_CASE("unprofitable trades still commit") {
    auto f = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m = f.market(true);
    TxCostModel cost;
    cost.bribe = u256("10000000000000000"); // 0.01 ETH
    auto out = arb_stake_swap(m, "trader", E18, cost);
    CHECK(out.profit < 0);
    CHECK(out.profit == i256("8991008991008991") - i256("10000000000000000"));
    // committed: the pool moved and the sink was paid
    CHECK(std::get<WeightedPool>(f.pool).balances[kEth] < u256(1010) * E18);
    CHECK(f.eth["sink"] == cost.total());
}

TEST_CASE("profit equals the trader balance delta, exactly") {
    Xoshiro256 rng(71);
    for (int i = 0; i < 100; ++i) {
        Amount skew = E18 * u256(rng.below(80));
        auto f = weighted_fixture(u256(1000) * E18 + skew, u256(1000) * E18);
        Market m = f.market(true);
        TxCostModel cost;
        cost.gasPerArb = rng.below(400'000);
        cost.gasPrice = u256(rng.below(40)) * 1'000'000'000ULL;
        Amount before = f.eth["trader"];
        Amount x0 = E18 * u256(1 + rng.below(20));
        auto out = arb_stake_swap(m, "trader", x0, cost);
        i256 delta = to_signed(f.eth["trader"]) - to_signed(before);
        CHECK(out.profit == delta);
        CHECK(out.profit == to_signed(out.grossOut) - to_signed(x0) - to_signed(cost.total()));
    }
}

TEST_CASE("swap-unstake reports the ideal revenue expression") {
    // weighted pool priced exactly at 0.98 ETH per LSD
    auto f = weighted_fixture(u256(98'000) * E18, u256(100'000) * E18);
    Market m = f.market(true);
    auto out = arb_swap_unstake(m, "trader", u256(100) * E18, {});
    // (1/0.98 - 1) * 100e18
    CHECK(abs_diff(to_unsigned(out.idealRevenue), u256("2040816326530612244")) <= 1);
    // realized profit is below the ideal fill but positive on a deep pool
    CHECK(out.profit > 0);
    CHECK(out.profit <= out.idealRevenue);
    // two separate transactions in the trace
    REQUIRE(f.trace.size() == 2);
    CHECK(f.trace[0].txHash != f.trace[1].txHash);
    CHECK(f.trace[0].kind == EventKind::Swap);
    CHECK(f.trace[1].kind == EventKind::Unstake);
}

TEST_CASE("swap-unstake needs withdrawals enabled") {
    auto f = weighted_fixture(u256(9800) * E18, u256(10'000) * E18);
    Market m = f.market(true);
    m.shapellaEnabled = false;
    CHECK_THROWS_WITH_AS(arb_swap_unstake(m, "trader", u256(10) * E18, {}),
                         doctest::Contains("WithdrawalsDisabled"), SimError);
}

TEST_CASE("swap-unstake at parity earns nothing") {
    auto f = weighted_fixture(u256(100'000) * E18, u256(100'000) * E18);
    Market m = f.market(true);
    auto out = arb_swap_unstake(m, "trader", u256(10) * E18, {});
    CHECK(out.idealRevenue == 0);
    CHECK(out.profit <= 0);
}

TEST_CASE("fee-free flash loan matches the self-funded profit with zero capital") {
    auto own = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m1 = own.market(true);
    auto ref = arb_stake_swap(m1, "trader", E18, {});

    auto borrowed = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    borrowed.eth["trader"] = 0;
    Market m2 = borrowed.market(true);
    auto out = arb_flash_loan(m2, "trader", E18, 0, {});
    CHECK(out.usedFlashLoan);
    CHECK(out.profit == ref.profit);
    CHECK(borrowed.eth["trader"] == to_unsigned(out.profit));
    CHECK(borrowed.eth["lender"] == u256(1'000'000) * E18);
}

TEST_CASE("flash-loan default reverts every ledger bit-exact") {
    auto f = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    f.eth["trader"] = 0;
    std::string before = f.fingerprint();
    std::size_t traceBefore = f.trace.size();
    Market m = f.market(true);
    // fee far above the edge: repayment is unaffordable
    Wad fee = u256("100000000000000000"); // 10%
    CHECK_THROWS_WITH_AS(arb_flash_loan(m, "trader", E18, fee, {}),
                         doctest::Contains("FlashLoanDefault"), SimError);
    CHECK(f.fingerprint() == before);
    CHECK(f.trace.size() == traceBefore);
}

TEST_CASE("flash loan checks lender liquidity before touching state") {
    auto f = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    f.eth["lender"] = E18 / 2;
    std::string before = f.fingerprint();
    Market m = f.market(true);
    CHECK_THROWS_AS(arb_flash_loan(m, "trader", E18, 0, {}), SimError);
    CHECK(f.fingerprint() == before);
}

TEST_CASE("the deposit-pool barrier: fail, prerequisite, replay") {
    // pool full: no extra capacity beyond the genesis stake; the venue is
    // deep enough that a 16-ETH trade keeps most of the 1% edge
    auto f = reward_fixture(u256(101'000) * E18, u256(100'000) * E18, 0);
    Market m = f.market(false);
    const Amount x0 = u256(16) * E18;

    // 1. flash-loan arbitrage alone fails on the barrier, state untouched
    std::string before = f.fingerprint();
    CHECK_THROWS_WITH_AS(arb_flash_loan(m, "trader", x0, 0, {}),
                         doctest::Contains("DepositPoolFull"), SimError);
    CHECK(f.fingerprint() == before);

    // 2. a 16-ETH prerequisite stake frees 16 ETH of capacity; the same
    //    arbitrage then lands
    auto out = arb_with_prerequisite(m, "trader", u256(16) * E18, x0, 0, {});
    CHECK(out.prerequisiteStake == u256(16) * E18);
    CHECK(out.usedFlashLoan);
    CHECK(out.profit > 0);
    // the prerequisite stake is consecutive with the arbitrage transaction
    REQUIRE(f.trace.size() >= 5);
    CHECK(f.trace[0].kind == EventKind::Assign);
    CHECK(f.trace[1].kind == EventKind::Stake);
    CHECK(f.trace[2].kind == EventKind::Stake); // the arb body
    CHECK(f.trace[1].block == f.trace[2].block);
    CHECK(f.trace[1].txIndex + 1 == f.trace[2].txIndex);
    // staker holds the minted LSD (capital converted, not lost)
    CHECK(f.rewardBearing.balanceOf["trader"] > 0);

    // 3. the copy-paste replay with no prerequisite stake fails again
    std::string mid = f.fingerprint();
    CHECK_THROWS_WITH_AS(arb_with_prerequisite(m, "trader", 0, x0, 0, {}),
                         doctest::Contains("DepositPoolFull"), SimError);
    CHECK(f.fingerprint() == mid);
}

TEST_CASE("an oversized prerequisite stake propagates the pool error") {
    auto f = reward_fixture(u256(1010) * E18, u256(1000) * E18, 0);
    Market m = f.market(false);
    CHECK_THROWS_WITH_AS(arb_with_prerequisite(m, "trader", u256(2000) * E18, E18, 0, {}),
                         doctest::Contains("AssignExceedsBalance"), SimError);
}

TEST_CASE("optimal size is zero without an edge and under heavy costs") {
    auto flat = weighted_fixture(u256(1000) * E18, u256(1000) * E18);
    Market m = flat.market(true);
    auto [x0, profit] = optimal_size(m, ArbDirection::StakeSwap, {}, {1, u256(100) * E18});
    CHECK(x0 == 0);
    CHECK(profit == 0);

    auto skewed = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m2 = skewed.market(true);
    TxCostModel heavy;
    heavy.bribe = u256(1) * E18;
    auto res = optimal_size(m2, ArbDirection::StakeSwap, heavy, {1, u256(100) * E18});
    CHECK(res.first == 0);

    CHECK_THROWS_WITH_AS(optimal_size(m2, ArbDirection::StakeSwap, {}, {u256(10) * E18, E18}),
                         doctest::Contains("InvalidBounds"), SimError);
}

TEST_CASE("optimal size tracks the grid-search argmax on the weighted pool") {
    auto base = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m = base.market(true);
    auto [x0, profit] = optimal_size(m, ArbDirection::StakeSwap, {}, {1, u256(20) * E18});
    CHECK(x0 > 0);

    // exhaustive grid at 1e14-wei granularity over the same bounds
    Amount step = u256("100000000000000");
    i256 bestProfit = 0;
    Amount bestX = 0;
    for (Amount x = step; x <= u256(20) * E18; x += step) {
        Fixture g = base;
        Market gm = g.market(true);
        gm.trace = nullptr;
        auto out = arb_stake_swap(gm, "trader", x, {});
        if (out.profit > bestProfit) {
            bestProfit = out.profit;
            bestX = x;
        }
    }
    REQUIRE(bestProfit > 0);
    // within 0.1% of the oracle's best profit and argmax
    CHECK((profit - bestProfit).convert_to<double>() >=
          -0.001 * bestProfit.convert_to<double>());
    CHECK(abs_diff(x0, bestX).convert_to<double>() <= 0.001 * bestX.convert_to<double>() + 1e14);
}

TEST_CASE("executing the optimum closes the edge") {
    auto f = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    Market m = f.market(true);
    auto [x0, expected] = optimal_size(m, ArbDirection::StakeSwap, {}, {1, u256(100) * E18});
    REQUIRE(x0 > 0);

    Wad before = pool_spot_price(f.pool);
    auto out = arb_stake_swap(m, "trader", x0, {});
    CHECK(out.profit == expected);
    Wad after = pool_spot_price(f.pool);
    // price restoration toward the primary rate of 1
    CHECK(abs_diff(after, wad_one()) < abs_diff(before, wad_one()));

    auto again = optimal_size(m, ArbDirection::StakeSwap, {}, {1, u256(100) * E18});
    CHECK((again.first == 0 || again.second <= expected));
}

TEST_CASE("profit is monotone non-increasing in the cost parameters") {
    auto base = weighted_fixture(u256(1010) * E18, u256(1000) * E18);
    i256 prev;
    bool first = true;
    for (std::uint64_t bribeMilli = 0; bribeMilli <= 10; ++bribeMilli) {
        Fixture f = base;
        Market m = f.market(true);
        TxCostModel cost;
        cost.bribe = u256(bribeMilli) * E18 / 1000;
        auto out = arb_stake_swap(m, "trader", E18, cost);
        if (!first) CHECK(out.profit <= prev);
        prev = out.profit;
        first = false;
    }
}
