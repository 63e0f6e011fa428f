#include "lsdsim/amm.hpp"

namespace lsdsim {

namespace {

constexpr unsigned kMaxIter = 255;
constexpr unsigned kBpsDenom = 10'000;

// Solve the out-side balance y for a fixed in-side balance x, given D.
// Newton on y^2 + y*(x + D/Ann - D) = D^3/(4*x*Ann), converging when
// successive iterates differ by at most 1 wei.
Amount solve_y(const Amount& x, const Amount& d, unsigned amp) {
    const u512 ann = u512(amp) * 4;
    const u512 D = u512(d);
    u512 c = D * D / (u512(x) * 2);
    c = c * D / (ann * 2);
    const u512 b = u512(x) + D / ann;
    u512 y = D;
    for (unsigned i = 0; i < kMaxIter; ++i) {
        u512 y_prev = y;
        i512 den = i512(2 * y + b) - i512(D);
        if (den <= 0) throw SimError(Err::NoConvergence, "stableswap y: denominator collapsed");
        y = (y * y + c) / u512(den);
        u512 diff = y > y_prev ? y - y_prev : y_prev - y;
        if (diff <= 1) return narrow(y);
    }
    throw SimError(Err::NoConvergence, "stableswap y: 255 iterations");
}

} // namespace

Amount stableswap_d(const std::array<Amount, 2>& balances, unsigned amp) {
    if (balances[0] == 0 || balances[1] == 0)
        throw SimError(Err::NotBootstrapped, "stableswap D needs both balances positive");
    const u512 s = u512(balances[0]) + u512(balances[1]);
    const u512 ann = u512(amp) * 4;
    u512 d = s;
    for (unsigned i = 0; i < kMaxIter; ++i) {
        u512 d_p = d * d / (u512(balances[0]) * 2);
        d_p = d_p * d / (u512(balances[1]) * 2);
        u512 d_prev = d;
        d = (ann * s + d_p * 2) * d / ((ann - 1) * d + d_p * 3);
        u512 diff = d > d_prev ? d - d_prev : d_prev - d;
        if (diff <= 1) return narrow(d);
    }
    throw SimError(Err::NoConvergence, "stableswap D: 255 iterations");
}

Amount StableswapPool::invariant_d() const { return stableswap_d(balances, amp); }

Amount StableswapPool::swap(int tokenIn, Amount amountIn) {
    if (amountIn == 0) throw SimError(Err::ZeroAmount, "swap of zero");
    if (balances[0] == 0 || balances[1] == 0)
        throw SimError(Err::NotBootstrapped, "swap on empty pool");
    const int tokenOut = 1 - tokenIn;
    Amount inAfterFee = mul_div(amountIn, kBpsDenom - feeBps, kBpsDenom, Round::Down);
    Amount d = invariant_d();
    Amount yNew = solve_y(balances[tokenIn] + inAfterFee, d, amp);
    Amount out = balances[tokenOut] > yNew ? balances[tokenOut] - yNew : Amount(0);
    out = out > 1 ? out - 1 : Amount(0); // 1-wei safety margin, pool-favoring
    if (out == 0) return 0;              // dust trade below one wei of output; no-op
    if (out >= balances[tokenOut])
        throw SimError(Err::InsufficientLiquidity, "swap would drain the pool");
    balances[tokenIn] += amountIn; // fee portion stays in the pool
    balances[tokenOut] -= out;
    return out;
}

Amount StableswapPool::add_liquidity(const HolderId& holder, const std::array<Amount, 2>& amounts) {
    if (amounts[0] == 0 || amounts[1] == 0)
        throw SimError(Err::ZeroAmount, "stableswap deposits are two-sided");
    Amount minted;
    if (lpTotalSupply == 0) {
        balances[0] += amounts[0];
        balances[1] += amounts[1];
        minted = invariant_d();
    } else {
        Amount d0 = invariant_d();
        balances[0] += amounts[0];
        balances[1] += amounts[1];
        Amount d1 = invariant_d();
        minted = mul_div(lpTotalSupply, d1 - d0, d0, Round::Down);
    }
    lpBalanceOf[holder] += minted;
    lpTotalSupply += minted;
    return minted;
}

std::array<Amount, 2> StableswapPool::remove_liquidity(const HolderId& holder, Amount lpTokens) {
    if (lpTokens == 0) throw SimError(Err::ZeroAmount, "remove of zero");
    auto it = lpBalanceOf.find(holder);
    if (it == lpBalanceOf.end() || it->second < lpTokens)
        throw SimError(Err::InsufficientBalance, "remove exceeds LP balance");
    std::array<Amount, 2> out{
        mul_div(balances[0], lpTokens, lpTotalSupply, Round::Down),
        mul_div(balances[1], lpTokens, lpTotalSupply, Round::Down),
    };
    it->second -= lpTokens;
    lpTotalSupply -= lpTokens;
    balances[0] -= out[0];
    balances[1] -= out[1];
    return out;
}

Wad StableswapPool::spot_price() const {
    const Amount probe = 1'000'000; // small enough for negligible curvature
    Amount d = invariant_d();
    Amount yNew = solve_y(balances[kLsd] + probe, d, amp);
    Amount dy = balances[kEth] > yNew ? balances[kEth] - yNew : Amount(0);
    return mul_div(dy, wad_one(), probe, Round::Down);
}

} // namespace lsdsim
