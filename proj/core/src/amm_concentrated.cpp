#include "lsdsim/amm.hpp"

namespace lsdsim {

namespace {

constexpr unsigned kBpsDenom = 10'000;

// Principal a position of liquidity L commands at sqrt price s in [sa, sb]:
//   token0 = L*(sb - s)*1e18 / (s*sb),  token1 = L*(s - sa)/1e18.
Amount principal0(const Amount& L, const Wad& s, const Wad& sb, Round r) {
    if (s >= sb) return 0;
    u512 num = u512(L) * u512(sb - s) * u512(wad_one());
    u512 den = u512(s) * u512(sb);
    u512 q = num / den;
    if (r == Round::Up && q * den != num) q += 1;
    return narrow(q);
}

Amount principal1(const Amount& L, const Wad& s, const Wad& sa, Round r) {
    if (s <= sa) return 0;
    return mul_div(L, s - sa, wad_one(), r);
}

} // namespace

Amount ConcentratedPool::swap(int tokenIn, Amount amountIn) {
    if (amountIn == 0) throw SimError(Err::ZeroAmount, "swap of zero");
    if (liquidity == 0) throw SimError(Err::ZeroLiquidity, "swap with no active liquidity");
    const Amount inAfterFee = mul_div(amountIn, kBpsDenom - feeBps, kBpsDenom, Round::Down);
    const Amount fee = amountIn - inAfterFee;
    const u512 L = u512(liquidity);
    const u512 s = u512(sqrtPrice);
    Amount out;
    Wad sNew;
    if (tokenIn == kLsd) {
        // sqrtP' = L*sqrtP / (L + dx*sqrtP); out = L*dx*sqrtP^2 / (1e18*(L*1e18 + dx*sqrtP)),
        // the exact-rational form of L*(sqrtP - sqrtP').
        u512 den = L * u512(wad_one()) + u512(inAfterFee) * s;
        sNew = narrow(L * s * u512(wad_one()) / den);
        if (sNew < rangeLower)
            throw SimError(Err::PriceOutOfRange, "swap would cross the lower bound");
        out = narrow(L * u512(inAfterFee) * s * s / (den * u512(wad_one())));
    } else {
        // sqrtP' = sqrtP + dy*1e18/L; out = dy*1e36*L / (sqrtP*(L*sqrtP + dy*1e18)).
        u512 grow = u512(inAfterFee) * u512(wad_one());
        sNew = narrow(s + grow / L);
        if (sNew > rangeUpper)
            throw SimError(Err::PriceOutOfRange, "swap would cross the upper bound");
        u512 den = s * (L * s + grow);
        out = narrow(grow * u512(wad_one()) * L / den);
    }
    if (tokenIn == kLsd) {
        if (out > reserve1) throw SimError(Err::InsufficientLiquidity, "pool short of token1");
        reserve0 += amountIn;
        reserve1 -= out;
        feeGrowth0 += wad_div(fee, Wad(liquidity), Round::Down);
    } else {
        if (out > reserve0) throw SimError(Err::InsufficientLiquidity, "pool short of token0");
        reserve1 += amountIn;
        reserve0 -= out;
        feeGrowth1 += wad_div(fee, Wad(liquidity), Round::Down);
    }
    sqrtPrice = sNew;
    return out;
}

ConcentratedPool::MintResult ConcentratedPool::mint(const HolderId& owner, Amount amount0,
                                                    Amount amount1) {
    if (amount0 == 0 && amount1 == 0) throw SimError(Err::ZeroAmount, "mint of zero");
    if (!(rangeLower < sqrtPrice && sqrtPrice < rangeUpper))
        throw SimError(Err::PriceOutOfRange, "mint requires the price inside the range");
    // Liquidity each side supports; the smaller one binds.
    u512 l0 = u512(amount0) * u512(sqrtPrice) * u512(rangeUpper) /
              (u512(rangeUpper - sqrtPrice) * u512(wad_one()));
    u512 l1 = u512(amount1) * u512(wad_one()) / u512(sqrtPrice - rangeLower);
    Amount L = narrow(l0 < l1 ? l0 : l1);
    if (L == 0) throw SimError(Err::ZeroLiquidity, "deposit too small for one unit of liquidity");

    MintResult res;
    res.liquidity = L;
    res.used0 = principal0(L, sqrtPrice, rangeUpper, Round::Up);
    res.used1 = principal1(L, sqrtPrice, rangeLower, Round::Up);
    if (res.used0 > amount0 || res.used1 > amount1)
        throw SimError(Err::InsufficientBalance, "mint amounts inconsistent with range");

    ClPosition& pos = positions[owner];
    if (pos.liquidity > 0) {
        // Settle fees accrued so far before the snapshot moves.
        pos.owed0 += wad_mul(pos.liquidity, feeGrowth0 - pos.feeGrowth0Snap, Round::Down);
        pos.owed1 += wad_mul(pos.liquidity, feeGrowth1 - pos.feeGrowth1Snap, Round::Down);
    }
    pos.liquidity += L;
    pos.feeGrowth0Snap = feeGrowth0;
    pos.feeGrowth1Snap = feeGrowth1;
    liquidity += L;
    reserve0 += res.used0;
    reserve1 += res.used1;
    return res;
}

ConcentratedPool::Collected ConcentratedPool::collect(const HolderId& owner) {
    auto it = positions.find(owner);
    if (it == positions.end() || it->second.liquidity == 0)
        throw SimError(Err::NothingToCollect, "no position for " + owner);
    ClPosition pos = it->second;
    Collected res;
    Wad s = sqrtPrice < rangeLower ? rangeLower : (sqrtPrice > rangeUpper ? rangeUpper : sqrtPrice);
    res.principal0 = principal0(pos.liquidity, s, rangeUpper, Round::Down);
    res.principal1 = principal1(pos.liquidity, s, rangeLower, Round::Down);
    res.fees0 = pos.owed0 + wad_mul(pos.liquidity, feeGrowth0 - pos.feeGrowth0Snap, Round::Down);
    res.fees1 = pos.owed1 + wad_mul(pos.liquidity, feeGrowth1 - pos.feeGrowth1Snap, Round::Down);
    positions.erase(it);
    liquidity -= pos.liquidity;
    reserve0 -= res.principal0 + res.fees0;
    reserve1 -= res.principal1 + res.fees1;
    return res;
}

Wad ConcentratedPool::spot_price() const { return wad_mul(sqrtPrice, sqrtPrice, Round::Down); }

} // namespace lsdsim
