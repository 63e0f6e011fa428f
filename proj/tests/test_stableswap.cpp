#include <doctest.h>

#include "lsdsim/amm.hpp"
#include "lsdsim/rng.hpp"
#include "support/oracles.hpp"

using namespace lsdsim;

namespace {

const u256 E18 = wad_one();

StableswapPool make_pool(const Amount& lsd, const Amount& eth, unsigned amp, unsigned feeBps) {
    StableswapPool p;
    p.amp = amp;
    p.feeBps = feeBps;
    p.add_liquidity("seed", {lsd, eth});
    return p;
}

Amount random_balance(Xoshiro256& rng) {
    // 1 .. ~1.8e7 ETH in wei
    return E18 + u256(rng.next() % 18'000'000ULL) * E18 + u256(rng.next() % 1'000'000'000ULL);
}

} // namespace

TEST_CASE("balanced pools solve D = sum of balances exactly") {
    CHECK(stableswap_d({u256(1000) * E18, u256(1000) * E18}, 1) == u256(2000) * E18);
    CHECK(stableswap_d({u256(1000) * E18, u256(1000) * E18}, 5000) == u256(2000) * E18);
    Xoshiro256 rng(41);
    for (int i = 0; i < 100; ++i) {
        Amount x = random_balance(rng);
        unsigned amp = 1 + static_cast<unsigned>(rng.below(5000));
        CHECK(stableswap_d({x, x}, amp) == x * 2);
    }
}

TEST_CASE("imbalanced D sits between the curve ends and matches bisection") {
    Amount d = stableswap_d({u256(1500) * E18, u256(500) * E18}, 100);
    CHECK(d > u256(1990) * E18);
    CHECK(d < u256(2000) * E18);
    auto oracle = oracles::ss_d_bisection(u256(1500) * E18, u256(500) * E18, 100);
    CHECK(oracles::big(d) <= oracle + 2);
    CHECK(oracles::big(d) + 2 >= oracle);

    Xoshiro256 rng(42);
    for (int i = 0; i < 100; ++i) {
        Amount x = random_balance(rng);
        Amount y = random_balance(rng);
        unsigned amp = 1 + static_cast<unsigned>(rng.below(2000));
        auto got = oracles::big(stableswap_d({x, y}, amp));
        auto want = oracles::ss_d_bisection(x, y, amp);
        CHECK(got <= want + 2);
        CHECK(got + 2 >= want);
    }
}

TEST_CASE("the solver converges under extreme imbalance") {
    CHECK_NOTHROW(stableswap_d({u256(10) * E18, u256("10000000000000000000000000")}, 1));
    CHECK_THROWS_AS(stableswap_d({0, E18}, 100), SimError);
}

TEST_CASE("near-peg swap on a deep balanced pool") {
    auto p = make_pool(u256(1'000'000) * E18, u256(1'000'000) * E18, 100, 0);
    Amount out = p.swap(kLsd, E18);
    CHECK(out > u256("999900000000000000")); // within 1e-4 of parity
    CHECK(out < E18);
}

TEST_CASE("fee on input scales the output accordingly") {
    auto fee0 = make_pool(u256(1'000'000) * E18, u256(1'000'000) * E18, 100, 0);
    auto fee4 = make_pool(u256(1'000'000) * E18, u256(1'000'000) * E18, 100, 4);
    Amount a = fee0.swap(kLsd, u256(100) * E18);
    Amount b = fee4.swap(kLsd, u256(100) * E18);
    double ratio = b.convert_to<double>() / a.convert_to<double>();
    CHECK(ratio == doctest::Approx(0.9996).epsilon(1e-5));
}

TEST_CASE("zero amount swaps are rejected") {
    auto p = make_pool(u256(1000) * E18, u256(1000) * E18, 100, 4);
    CHECK_THROWS_WITH_AS(p.swap(kLsd, 0), doctest::Contains("ZeroAmount"), SimError);
}

TEST_CASE("swap output matches the bisection oracle within 2 wei") {
    Xoshiro256 rng(43);
    for (int i = 0; i < 500; ++i) {
        Amount x = random_balance(rng);
        Amount y = random_balance(rng);
        unsigned amp = 1 + static_cast<unsigned>(rng.below(1000));
        unsigned fee = static_cast<unsigned>(rng.below(100));
        auto p = make_pool(x, y, amp, fee);
        int tokenIn = rng.chance(1, 2) ? kLsd : kEth;
        Amount in = 1 + u256(rng.next() % 1'000'000'000'000'000'000ULL) * 20;
        Amount got = p.swap(tokenIn, in);
        auto want = oracles::ss_swap_bisection(tokenIn == kLsd ? x : y, tokenIn == kLsd ? y : x,
                                               amp, fee, in);
        CHECK(oracles::big(got) <= want + 2);
        CHECK(oracles::big(got) + 2 >= want);
    }
}

TEST_CASE("D never decreases across fee-bearing swaps, holds tight without fees") {
    Xoshiro256 rng(44);
    auto withFee = make_pool(u256(10'000) * E18, u256(11'000) * E18, 200, 4);
    Amount d = withFee.invariant_d();
    for (int i = 0; i < 50; ++i) {
        withFee.swap(rng.chance(1, 2) ? kLsd : kEth, E18 * u256(1 + rng.below(50)));
        Amount d2 = withFee.invariant_d();
        CHECK(d2 >= d);
        d = d2;
    }

    auto noFee = make_pool(u256(10'000) * E18, u256(11'000) * E18, 200, 0);
    Amount d0 = noFee.invariant_d();
    for (int i = 0; i < 50; ++i) {
        noFee.swap(rng.chance(1, 2) ? kLsd : kEth, E18 * u256(1 + rng.below(50)));
        Amount d1 = noFee.invariant_d();
        // the 1-wei output margin keeps the drift non-negative and tiny
        CHECK(d1 + 2 >= d0);
        CHECK(d1 <= d0 + u256(60) * u256(1'000'000'000ULL)); // margin dust only
        d0 = d1;
    }
}

TEST_CASE("amountOut is monotone in amountIn") {
    auto base = make_pool(u256(5'000) * E18, u256(4'000) * E18, 50, 4);
    Amount prev = 0;
    for (int k = 1; k <= 40; ++k) {
        StableswapPool p = base;
        Amount out = p.swap(kLsd, u256(k) * 25 * E18 / 10);
        CHECK(out >= prev);
        prev = out;
    }
}

TEST_CASE("liquidity bootstrap, pro-rata join and exit") {
    StableswapPool p;
    p.amp = 100;
    Amount lp0 = p.add_liquidity("a", {u256(100) * E18, u256(100) * E18});
    CHECK(lp0 == u256(200) * E18); // initial supply = D

    SUBCASE("balanced join mints pro-rata") {
        Amount minted = p.add_liquidity("b", {u256(10) * E18, u256(10) * E18});
        CHECK(abs_diff(minted, u256(20) * E18) <= 2);
    }
    SUBCASE("half exit returns half of each balance") {
        auto out = p.remove_liquidity("a", u256(100) * E18);
        CHECK(out[0] == u256(50) * E18);
        CHECK(out[1] == u256(50) * E18);
        CHECK(p.lpTotalSupply == u256(100) * E18);
    }
    SUBCASE("exit beyond balance fails") {
        CHECK_THROWS_AS(p.remove_liquidity("a", u256(300) * E18), SimError);
    }
    SUBCASE("zero-sided deposits are rejected") {
        CHECK_THROWS_AS(p.add_liquidity("c", {0, E18}), SimError);
    }
}

TEST_CASE("add then remove with no trades in between returns the deposit") {
    auto p = make_pool(u256(700) * E18, u256(900) * E18, 80, 4);
    Amount minted = p.add_liquidity("lp", {u256(70) * E18, u256(90) * E18});
    auto out = p.remove_liquidity("lp", minted);
    CHECK(abs_diff(out[0], u256(70) * E18) <= 2);
    CHECK(abs_diff(out[1], u256(90) * E18) <= 2);
}

TEST_CASE("spot price of a balanced pool sits at the peg") {
    auto p = make_pool(u256(1'000'000) * E18, u256(1'000'000) * E18, 100, 4);
    Wad spot = p.spot_price();
    CHECK(spot <= E18);
    CHECK(spot >= E18 - u256("1000000000000")); // 1 - 1e-6
}

TEST_CASE("spot price tracks the reserve skew direction") {
    auto rich = make_pool(u256(900'000) * E18, u256(1'100'000) * E18, 100, 4);
    CHECK(rich.spot_price() > E18);
    auto poor = make_pool(u256(1'100'000) * E18, u256(900'000) * E18, 100, 4);
    CHECK(poor.spot_price() < E18);
}
