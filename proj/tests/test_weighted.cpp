#include <doctest.h>

#include "lsdsim/amm.hpp"
#include "lsdsim/rng.hpp"

using namespace lsdsim;

namespace {

const u256 E18 = wad_one();

WeightedPool make_pool(const Amount& lsd, const Amount& eth, unsigned feeBps) {
    WeightedPool p;
    p.feeBps = feeBps;
    p.add_liquidity("seed", {lsd, eth});
    return p;
}

} // namespace

TEST_CASE("equal weights reduce to constant product") {
    auto p = make_pool(u256(1000) * E18, u256(1000) * E18, 0);
    // doubling one reserve halves the other
    CHECK(p.swap(kLsd, u256(1000) * E18) == u256(500) * E18);
    CHECK(p.balances[kLsd] == u256(2000) * E18);
    CHECK(p.balances[kEth] == u256(500) * E18);
}

TEST_CASE("fee deducts from the input before the curve") {
    auto p = make_pool(u256(1000) * E18, u256(1000) * E18, 100);
    // 1000*990/1990
    CHECK(p.swap(kLsd, u256(1000) * E18) == u256("497487437185929648241"));
}

TEST_CASE("zero amounts and empty pools are rejected") {
    auto p = make_pool(u256(10) * E18, u256(10) * E18, 0);
    CHECK_THROWS_WITH_AS(p.swap(kLsd, 0), doctest::Contains("ZeroAmount"), SimError);
    WeightedPool empty;
    CHECK_THROWS_WITH_AS(empty.swap(kLsd, E18), doctest::Contains("InsufficientLiquidity"),
                         SimError);
}

TEST_CASE("fee-free swaps preserve the reserve product") {
    Xoshiro256 rng(61);
    for (int i = 0; i < 300; ++i) {
        Amount x = E18 * u256(1 + rng.below(100000));
        Amount y = E18 * u256(1 + rng.below(100000));
        auto p = make_pool(x, y, 0);
        int tokenIn = rng.chance(1, 2) ? kLsd : kEth;
        Amount in = 1 + u256(rng.next() % 1'000'000'000'000'000'000ULL) * 3;
        p.swap(tokenIn, in);
        u512 before = u512(x) * u512(y);
        u512 after = u512(p.balances[0]) * u512(p.balances[1]);
        CHECK(after >= before); // floor rounding always favors the pool
        // and the excess stays below one unit of the grown in-side reserve
        CHECK(after - before <= u512(p.balances[tokenIn]));
    }
}

TEST_CASE("amountOut is monotone in amountIn") {
    auto base = make_pool(u256(5000) * E18, u256(5000) * E18, 30);
    Amount prev = 0;
    for (int k = 1; k <= 50; ++k) {
        WeightedPool p = base;
        Amount out = p.swap(kEth, u256(k) * 7 * E18);
        CHECK(out >= prev);
        prev = out;
    }
}

TEST_CASE("bootstrap supply is the geometric mean of the deposit") {
    WeightedPool p;
    Amount lp = p.add_liquidity("a", {u256(400) * E18, u256(100) * E18});
    CHECK(lp == u256(200) * E18); // sqrt(400*100)

    SUBCASE("pro-rata join and exit") {
        Amount minted = p.add_liquidity("b", {u256(40) * E18, u256(10) * E18});
        CHECK(abs_diff(minted, u256(20) * E18) <= 1);
        auto out = p.remove_liquidity("b", minted);
        CHECK(abs_diff(out[0], u256(40) * E18) <= 1);
        CHECK(abs_diff(out[1], u256(10) * E18) <= 1);
    }
    SUBCASE("exit checks the LP balance") {
        CHECK_THROWS_AS(p.remove_liquidity("b", E18), SimError);
        CHECK_THROWS_AS(p.remove_liquidity("a", u256(500) * E18), SimError);
    }
}

TEST_CASE("spot price is the reserve ratio") {
    auto p = make_pool(u256(1000) * E18, u256(1050) * E18, 4);
    CHECK(p.spot_price() == u256("1050000000000000000"));
}

TEST_CASE("pool variant dispatch reaches every kind") {
    Pool ss = make_pool(u256(100) * E18, u256(100) * E18, 0);
    CHECK(pool_kind_name(ss) == doctest::String("weighted"));
    CHECK(pool_spot_price(ss) == E18);
    CHECK(pool_swap(ss, kEth, E18) > 0);
}
