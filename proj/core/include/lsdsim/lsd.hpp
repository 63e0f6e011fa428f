#pragma once

#include <map>
#include <string>

#include "lsdsim/fixedmath.hpp"

namespace lsdsim {

using HolderId = std::string;

// Rebasing mechanism (stETH style): balances are shares times a share price
// that moves on every rebase. Invariants kept exact:
//   sum(sharesOf) == totalShares, always;
//   totalShares > 0 iff totalEth > 0.
struct RebasingLsd {
    Amount totalEth = 0;
    Amount totalShares = 0;
    std::map<HolderId, Amount> sharesOf;
    Wad protocolFee = 0; // in [0, 1e18)
    bool paused = false;
    HolderId treasury = "treasury";

    // totalEth/totalShares as a wad; 1e18 while un-bootstrapped.
    Wad share_price() const;

    // floor(shares * totalEth / totalShares)
    Amount balance_of(const HolderId& holder) const;

    // Stake m ETH, mint shares at the current share price (1:1 stETH).
    // Returns the stETH balance increase (== m up to 1 wei).
    Amount stake(const HolderId& holder, Amount m);

    // Distribute `rewards` ETH: totalEth grows, fee shares go to the
    // treasury so that their value equals rewards*protocolFee. Returns the
    // new share price.
    Wad rebase(Amount rewards);

    // Negative rebase: ETH backing shrinks, no share mint, fee rule does not
    // apply. Must leave positive backing while shares exist.
    void slash(Amount loss);

    // Redeem stETH for ETH at the fixed primary rate of 1. Only once
    // withdrawals are enabled.
    Amount unstake(const HolderId& holder, Amount stEthAmount, bool shapellaEnabled);

    // Moves `stEthAmount` worth of shares (floor); a 0-amount move is a no-op.
    void transfer(const HolderId& from, const HolderId& to, Amount stEthAmount);

    Amount sum_balances() const;
};

// Capacity-limited buffer gating stakes into the reward-bearing protocol.
struct DepositPool {
    Amount balance = 0;
    Amount maxCapacity = 0;

    // Node operators absorb `amount` of queued deposits, freeing capacity.
    void assign(Amount amount);
};

// Reward-bearing mechanism (rETH style): balances are fixed, the ETH
// redemption rate grows with accrued rewards.
struct RewardBearingLsd {
    Amount totalEthStaked = 0;
    Amount stakingRewardInEth = 0;
    Amount lsdTotalSupply = 0;
    std::map<HolderId, Amount> balanceOf;
    DepositPool depositPool;

    // (totalEthStaked + stakingRewardInEth) / lsdTotalSupply; 1e18 when
    // supply is zero.
    Wad exchange_rate() const;

    // Stake m ETH through the deposit pool; fails DepositPoolFull when the
    // pool cannot take m more. Returns LSD minted at the current rate.
    Amount stake(const HolderId& holder, Amount m);

    // Stake m ETH that lands directly in capacity just freed by an
    // assignment; the deposit pool balance is not touched. This is the
    // prerequisite-stake path.
    Amount stake_assigned(const HolderId& holder, Amount m);

    // Add staking rewards; no balance changes. Returns the new rate.
    Wad accrue(Amount reward);

    // Redeem LSD for ETH at the current rate; staked principal and reward
    // shrink proportionally.
    Amount burn(const HolderId& holder, Amount lsdAmount);

    void transfer(const HolderId& from, const HolderId& to, Amount amount);

    Amount sum_balances() const;
};

// Dual-token mechanism (frxETH/sfrxETH style), mint/accrue granularity only.
struct DualTokenLsd {
    Amount baseSupply = 0;
    Amount vaultShares = 0;
    Amount vaultAssets = 0;
    std::map<HolderId, Amount> baseOf;
    std::map<HolderId, Amount> vaultSharesOf;

    // vaultAssets/vaultShares; 1e18 when the vault is empty.
    Wad vault_share_price() const;

    // Mint base tokens 1:1 against ETH.
    Amount stake(const HolderId& holder, Amount m);

    // Deposit base tokens into the reward vault for shares.
    Amount enter_vault(const HolderId& holder, Amount baseAmount);

    // Reward lands as freshly minted base tokens held by the vault, so the
    // share price rises while baseSupply >= vaultAssets stays true.
    void vault_accrue(Amount reward);
};

} // namespace lsdsim
