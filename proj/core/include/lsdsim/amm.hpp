#pragma once

#include <array>
#include <map>
#include <string>
#include <variant>

#include "lsdsim/fixedmath.hpp"
#include "lsdsim/lsd.hpp"

namespace lsdsim {

// Token index convention across all pool kinds: 0 = LSD, 1 = ETH.
// spot_price() is always the marginal price of LSD in ETH as a wad.
inline constexpr int kLsd = 0;
inline constexpr int kEth = 1;

// Curve-style two-token stableswap. The invariant D solves
//   A*n^n*sum(x) + D = A*n^n*D + D^(n+1)/(n^n*prod(x)),  n = 2.
struct StableswapPool {
    std::array<Amount, 2> balances{0, 0};
    unsigned amp = 1; // amplification A, >= 1
    unsigned feeBps = 0;
    Amount lpTotalSupply = 0;
    std::map<HolderId, Amount> lpBalanceOf;

    Amount invariant_d() const;

    // Fee on input; out-amount from Newton on the invariant, minus the
    // 1-wei safety margin. Fails NoConvergence / InsufficientLiquidity.
    Amount swap(int tokenIn, Amount amountIn);

    // LP tokens pro-rata to D growth; initial supply = D.
    Amount add_liquidity(const HolderId& holder, const std::array<Amount, 2>& amounts);
    std::array<Amount, 2> remove_liquidity(const HolderId& holder, Amount lpTokens);

    // dy/dx via a fee-free 1e6-wei probe on a copy of the state.
    Wad spot_price() const;
};

// Invariant solver on raw balances (also usable without a pool object).
Amount stableswap_d(const std::array<Amount, 2>& balances, unsigned amp);

// Uniswap-V3-style pool restricted to one liquidity range. Price is tracked
// as sqrt(P) in wads; virtual reserves are x = L/sqrtP, y = L*sqrtP.
struct ClPosition {
    Amount liquidity = 0;
    Wad feeGrowth0Snap = 0;
    Wad feeGrowth1Snap = 0;
    Amount owed0 = 0; // fees settled on re-mint, payable on collect
    Amount owed1 = 0;
};

struct ConcentratedPool {
    Wad sqrtPrice = 0;
    Amount liquidity = 0;
    unsigned feeBps = 0;
    Wad rangeLower = 0; // sqrt-price bounds of the single range
    Wad rangeUpper = 0;
    std::map<HolderId, ClPosition> positions;
    // Fees per unit of liquidity, wad-scaled, by token.
    Wad feeGrowth0 = 0;
    Wad feeGrowth1 = 0;
    // Actual token custody (principal + accrued fees); the swap math runs on
    // virtual reserves, conservation checks run on these.
    Amount reserve0 = 0;
    Amount reserve1 = 0;

    // Fee on input. Errors PriceOutOfRange without touching state when the
    // post-swap sqrt price would cross the range; landing exactly on a bound
    // is allowed.
    Amount swap(int tokenIn, Amount amountIn);

    struct MintResult {
        Amount liquidity = 0;
        Amount used0 = 0;
        Amount used1 = 0;
    };
    // L = min over both tokens of the liquidity the deposit supports at the
    // current price; consumes exactly the amounts that L requires.
    MintResult mint(const HolderId& owner, Amount amount0, Amount amount1);

    struct Collected {
        Amount principal0 = 0;
        Amount principal1 = 0;
        Amount fees0 = 0;
        Amount fees1 = 0;
    };
    // Withdraws the whole position: principal at the current price plus the
    // position's share of accrued fees.
    Collected collect(const HolderId& owner);

    Wad spot_price() const; // sqrtPrice^2
};

// Balancer-style pool fixed at equal weights, where out-given-in reduces to
// constant product with fee on input.
struct WeightedPool {
    std::array<Amount, 2> balances{0, 0};
    unsigned feeBps = 0;
    Amount lpTotalSupply = 0;
    std::map<HolderId, Amount> lpBalanceOf;

    Amount swap(int tokenIn, Amount amountIn);

    // Initial supply = floor(sqrt(a0*a1)); later joins mint pro-rata to the
    // smaller deposit ratio.
    Amount add_liquidity(const HolderId& holder, const std::array<Amount, 2>& amounts);
    std::array<Amount, 2> remove_liquidity(const HolderId& holder, Amount lpTokens);

    Wad spot_price() const; // balances[ETH] / balances[LSD]
};

using Pool = std::variant<StableswapPool, ConcentratedPool, WeightedPool>;

Amount pool_swap(Pool& pool, int tokenIn, const Amount& amountIn);
Wad pool_spot_price(const Pool& pool);
const char* pool_kind_name(const Pool& pool);

} // namespace lsdsim
