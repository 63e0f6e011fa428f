#include "lsdsim/lsd.hpp"

namespace lsdsim {

// ---------------------------------------------------------------- rebasing

Wad RebasingLsd::share_price() const {
    if (totalShares == 0) return wad_one();
    return wad_div(totalEth, totalShares, Round::Down);
}

Amount RebasingLsd::balance_of(const HolderId& holder) const {
    auto it = sharesOf.find(holder);
    if (it == sharesOf.end() || totalShares == 0) return 0;
    return mul_div(it->second, totalEth, totalShares, Round::Down);
}

Amount RebasingLsd::stake(const HolderId& holder, Amount m) {
    if (m == 0) throw SimError(Err::ZeroAmount, "stake of zero");
    if (paused) throw SimError(Err::Paused, "staking paused");
    Amount shares = totalShares == 0 ? m : mul_div(m, totalShares, totalEth, Round::Down);
    Amount before = balance_of(holder);
    sharesOf[holder] += shares;
    totalShares += shares;
    totalEth += m;
    return balance_of(holder) - before;
}

Wad RebasingLsd::rebase(Amount rewards) {
    if (totalShares == 0) throw SimError(Err::NotBootstrapped, "rebase before first stake");
    if (rewards == 0) return share_price();
    // shares2mint = rewards*fee*totalEth / ((totalEth+rewards)*1e18 - rewards*fee),
    // numerator evaluated in full before the single floor division.
    u512 fee_term = u512(rewards) * u512(protocolFee);
    u512 num = fee_term * u512(totalEth);
    u512 den = u512(totalEth + rewards) * u512(wad_one()) - fee_term;
    if (den == 0) throw SimError(Err::DivideByZero, "rebase denominator zero");
    Amount shares2mint = narrow(num / den);
    if (shares2mint > 0) {
        sharesOf[treasury] += shares2mint;
        totalShares += shares2mint;
    }
    totalEth += rewards;
    return share_price();
}

void RebasingLsd::slash(Amount loss) {
    if (loss == 0) return;
    if (totalShares > 0 && loss >= totalEth)
        throw SimError(Err::InsufficientBalance, "slash must leave positive backing");
    totalEth -= loss;
}

Amount RebasingLsd::unstake(const HolderId& holder, Amount stEthAmount, bool shapellaEnabled) {
    if (!shapellaEnabled) throw SimError(Err::WithdrawalsDisabled, "unstake before Shapella");
    if (balance_of(holder) < stEthAmount)
        throw SimError(Err::InsufficientBalance, "unstake exceeds balance");
    if (stEthAmount == 0) return 0;
    // Burn shares rounded up so redemption can never extract value.
    Amount shares = mul_div(stEthAmount, totalShares, totalEth, Round::Up);
    sharesOf[holder] -= shares;
    totalShares -= shares;
    totalEth -= stEthAmount;
    return stEthAmount;
}

void RebasingLsd::transfer(const HolderId& from, const HolderId& to, Amount stEthAmount) {
    if (stEthAmount == 0) return;
    if (balance_of(from) < stEthAmount)
        throw SimError(Err::InsufficientBalance, "transfer exceeds balance");
    Amount shares = mul_div(stEthAmount, totalShares, totalEth, Round::Down);
    sharesOf[from] -= shares;
    sharesOf[to] += shares;
}

Amount RebasingLsd::sum_balances() const {
    Amount sum = 0;
    for (const auto& [holder, shares] : sharesOf) {
        (void)shares;
        sum += balance_of(holder);
    }
    return sum;
}

// ------------------------------------------------------------ deposit pool

void DepositPool::assign(Amount amount) {
    if (amount > balance)
        throw SimError(Err::AssignExceedsBalance, "assign exceeds pool balance");
    balance -= amount;
}

// ------------------------------------------------------------ reward-bearing

Wad RewardBearingLsd::exchange_rate() const {
    if (lsdTotalSupply == 0) return wad_one();
    return wad_div(totalEthStaked + stakingRewardInEth, lsdTotalSupply, Round::Down);
}

Amount RewardBearingLsd::stake(const HolderId& holder, Amount m) {
    if (m == 0) throw SimError(Err::ZeroAmount, "stake of zero");
    if (depositPool.balance + m > depositPool.maxCapacity)
        throw SimError(Err::DepositPoolFull, "deposit pool cannot take " + to_dec_string(m));
    Amount minted = wad_div(m, exchange_rate(), Round::Down);
    depositPool.balance += m;
    totalEthStaked += m;
    balanceOf[holder] += minted;
    lsdTotalSupply += minted;
    return minted;
}

Amount RewardBearingLsd::stake_assigned(const HolderId& holder, Amount m) {
    if (m == 0) throw SimError(Err::ZeroAmount, "stake of zero");
    Amount minted = wad_div(m, exchange_rate(), Round::Down);
    totalEthStaked += m;
    balanceOf[holder] += minted;
    lsdTotalSupply += minted;
    return minted;
}

Wad RewardBearingLsd::accrue(Amount reward) {
    stakingRewardInEth += reward;
    return exchange_rate();
}

Amount RewardBearingLsd::burn(const HolderId& holder, Amount lsdAmount) {
    auto it = balanceOf.find(holder);
    Amount held = it == balanceOf.end() ? Amount(0) : it->second;
    if (held < lsdAmount) throw SimError(Err::InsufficientBalance, "burn exceeds balance");
    if (lsdAmount == 0) return 0;
    Amount payout = wad_mul(lsdAmount, exchange_rate(), Round::Down);
    Amount total = totalEthStaked + stakingRewardInEth;
    if (payout > total)
        throw SimError(Err::InsufficientProtocolLiquidity, "payout exceeds protocol ETH");
    it->second -= lsdAmount;
    lsdTotalSupply -= lsdAmount;
    // Principal and reward shrink proportionally; the remainder stays exact.
    Amount remaining = total - payout;
    Amount staked_new = total == 0 ? Amount(0) : mul_div(totalEthStaked, remaining, total, Round::Down);
    totalEthStaked = staked_new;
    stakingRewardInEth = remaining - staked_new;
    return payout;
}

void RewardBearingLsd::transfer(const HolderId& from, const HolderId& to, Amount amount) {
    if (amount == 0) return;
    auto it = balanceOf.find(from);
    if (it == balanceOf.end() || it->second < amount)
        throw SimError(Err::InsufficientBalance, "transfer exceeds balance");
    it->second -= amount;
    balanceOf[to] += amount;
}

Amount RewardBearingLsd::sum_balances() const {
    Amount sum = 0;
    for (const auto& [holder, bal] : balanceOf) {
        (void)holder;
        sum += bal;
    }
    return sum;
}

// ---------------------------------------------------------------- dual-token

Wad DualTokenLsd::vault_share_price() const {
    if (vaultShares == 0) return wad_one();
    return wad_div(vaultAssets, vaultShares, Round::Down);
}

Amount DualTokenLsd::stake(const HolderId& holder, Amount m) {
    if (m == 0) throw SimError(Err::ZeroAmount, "stake of zero");
    baseOf[holder] += m;
    baseSupply += m;
    return m;
}

Amount DualTokenLsd::enter_vault(const HolderId& holder, Amount baseAmount) {
    if (baseAmount == 0) throw SimError(Err::ZeroAmount, "vault deposit of zero");
    auto it = baseOf.find(holder);
    if (it == baseOf.end() || it->second < baseAmount)
        throw SimError(Err::InsufficientBalance, "vault deposit exceeds base balance");
    Amount shares = vaultShares == 0 ? baseAmount
                                     : mul_div(baseAmount, vaultShares, vaultAssets, Round::Down);
    it->second -= baseAmount;
    vaultAssets += baseAmount;
    vaultSharesOf[holder] += shares;
    vaultShares += shares;
    return shares;
}

void DualTokenLsd::vault_accrue(Amount reward) {
    if (reward == 0) return;
    baseSupply += reward;
    vaultAssets += reward;
}

} // namespace lsdsim
