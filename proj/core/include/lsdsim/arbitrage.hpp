#pragma once

#include <map>
#include <optional>
#include <utility>

#include "lsdsim/amm.hpp"
#include "lsdsim/lsd.hpp"
#include "lsdsim/trace.hpp"

namespace lsdsim {

struct TxCostModel {
    std::uint64_t gasPerArb = 0;
    Amount gasPrice = 0; // wei per gas unit
    Amount bribe = 0;

    Amount total() const { return Amount(gasPerArb) * gasPrice + bribe; }
};

enum class ArbDirection { StakeSwap, SwapUnstake };

struct ArbOutcome {
    ArbDirection direction = ArbDirection::StakeSwap;
    Amount sizeIn = 0;   // x0
    Amount grossOut = 0; // x1
    i256 profit = 0;     // x1 - x0*(1+flashFee when borrowed) - cost
    bool usedFlashLoan = false;
    Amount prerequisiteStake = 0;
    // SwapUnstake only: (1/P2nd - 1)*m at the pre-swap spot price, the
    // slippage-free revenue of the redemption route.
    i256 idealRevenue = 0;
};

i256 ideal_unstake_revenue(const Wad& secondaryPrice, const Amount& ethIn);

// A strategy executes against one primary protocol, one pool, and a shared
// ETH ledger. Exactly one of `rebasing`/`rewardBearing` is set. The struct
// does not own anything; atomicity works by value-copying what it points to.
struct Market {
    RebasingLsd* rebasing = nullptr;
    RewardBearingLsd* rewardBearing = nullptr;
    Pool* pool = nullptr;
    std::map<HolderId, Amount>* eth = nullptr;
    bool shapellaEnabled = false;

    HolderId poolAccount = "pool";
    HolderId gasSink = "sink";
    HolderId flashLender = "lender";
    std::string venuePrimary = "primary";
    std::string venuePool = "pool";

    // Trace plumbing; trace may stay null for untraced execution.
    EventTrace* trace = nullptr;
    std::uint64_t block = 1;
    std::int64_t timestamp = 0;
    std::uint32_t nextTxIndex = 0;

    bool is_rebasing() const { return rebasing != nullptr; }
    Wad primary_rate() const;
    Amount eth_of(const HolderId& who) const;
    Amount lsd_balance_of(const HolderId& who) const;
};

// Value snapshot of everything a Market can mutate; failed transactions
// restore from this bit-exact.
struct MarketBackup {
    std::optional<RebasingLsd> rebasing;
    std::optional<RewardBearingLsd> rewardBearing;
    std::optional<Pool> pool;
    std::map<HolderId, Amount> eth;
    std::size_t traceSize = 0;
};

MarketBackup capture_market(const Market& m);
void restore_market(const MarketBackup& b, Market& m);

// Stake x0 at the primary rate, swap the minted LSD on the pool, all in one
// transaction. Unprofitable outcomes still commit; protocol or pool errors
// revert everything and propagate.
ArbOutcome arb_stake_swap(Market& m, const HolderId& trader, const Amount& x0,
                          const TxCostModel& cost);

// Swap m ETH into LSD, then redeem at the fixed primary rate of 1. Two
// transactions; rebasing protocols only, and only once withdrawals are on.
ArbOutcome arb_swap_unstake(Market& m, const HolderId& trader, const Amount& ethIn,
                            const TxCostModel& cost);

// Borrow x0, run the stake-swap body, repay x0*(1+flashFee). Unaffordable
// repayment reverts the whole transaction (FlashLoanDefault).
ArbOutcome arb_flash_loan(Market& m, const HolderId& trader, const Amount& x0,
                          const Wad& flashFee, const TxCostModel& cost);

// The two-transaction barrier workaround: a prerequisite stake rides on a
// deposit-pool assignment to free capacity, then the flash-loan arbitrage
// follows with a consecutive transaction index.
ArbOutcome arb_with_prerequisite(Market& m, const HolderId& trader, const Amount& stakeAmount,
                                 const Amount& x0, const Wad& flashFee, const TxCostModel& cost);

// Maximizes simulated profit over [bounds.first, bounds.second] by
// golden-section search on cloned state; ties resolve toward smaller size.
// Returns {0, 0} when nothing profitable exists.
std::pair<Amount, i256> optimal_size(const Market& m, ArbDirection direction,
                                     const TxCostModel& cost,
                                     std::pair<Amount, Amount> bounds,
                                     const Wad& flashFee = 0);

} // namespace lsdsim
