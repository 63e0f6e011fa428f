#include "lsdsim/amm.hpp"

namespace lsdsim {

namespace {
constexpr unsigned kBpsDenom = 10'000;
}

Amount WeightedPool::swap(int tokenIn, Amount amountIn) {
    if (amountIn == 0) throw SimError(Err::ZeroAmount, "swap of zero");
    if (balances[0] == 0 || balances[1] == 0)
        throw SimError(Err::InsufficientLiquidity, "swap on empty pool");
    const int tokenOut = 1 - tokenIn;
    Amount inAfterFee = mul_div(amountIn, kBpsDenom - feeBps, kBpsDenom, Round::Down);
    // Equal weights: out = bOut*in' / (bIn + in').
    Amount out = mul_div(balances[tokenOut], inAfterFee, balances[tokenIn] + inAfterFee, Round::Down);
    if (out >= balances[tokenOut])
        throw SimError(Err::InsufficientLiquidity, "swap would drain the pool");
    balances[tokenIn] += amountIn;
    balances[tokenOut] -= out;
    return out;
}

Amount WeightedPool::add_liquidity(const HolderId& holder, const std::array<Amount, 2>& amounts) {
    if (amounts[0] == 0 || amounts[1] == 0)
        throw SimError(Err::ZeroAmount, "weighted deposits are two-sided");
    Amount minted;
    if (lpTotalSupply == 0) {
        minted = narrow(mp::sqrt(u512(amounts[0]) * u512(amounts[1])));
    } else {
        Amount byToken0 = mul_div(lpTotalSupply, amounts[0], balances[0], Round::Down);
        Amount byToken1 = mul_div(lpTotalSupply, amounts[1], balances[1], Round::Down);
        minted = byToken0 < byToken1 ? byToken0 : byToken1;
    }
    balances[0] += amounts[0];
    balances[1] += amounts[1];
    lpBalanceOf[holder] += minted;
    lpTotalSupply += minted;
    return minted;
}

std::array<Amount, 2> WeightedPool::remove_liquidity(const HolderId& holder, Amount lpTokens) {
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

Wad WeightedPool::spot_price() const {
    if (balances[kLsd] == 0) throw SimError(Err::NotBootstrapped, "spot price on empty pool");
    return wad_div(balances[kEth], balances[kLsd], Round::Down);
}

Amount pool_swap(Pool& pool, int tokenIn, const Amount& amountIn) {
    return std::visit([&](auto& p) { return p.swap(tokenIn, amountIn); }, pool);
}

Wad pool_spot_price(const Pool& pool) {
    return std::visit([](const auto& p) { return p.spot_price(); }, pool);
}

const char* pool_kind_name(const Pool& pool) {
    switch (pool.index()) {
        case 0: return "stableswap";
        case 1: return "concentrated";
        case 2: return "weighted";
    }
    return "?";
}

} // namespace lsdsim
