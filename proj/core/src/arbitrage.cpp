#include "lsdsim/arbitrage.hpp"

#include <cinttypes>
#include <cstdio>

#include "lsdsim/rng.hpp"

namespace lsdsim {

namespace {

std::string tx_hash(std::uint64_t block, std::uint32_t txIndex) {
    std::uint64_t state = (block << 20) ^ txIndex;
    char buf[20];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, splitmix64(state));
    return buf;
}

void credit(std::map<HolderId, Amount>& ledger, const HolderId& who, const Amount& v) {
    ledger[who] += v;
}

void debit(std::map<HolderId, Amount>& ledger, const HolderId& who, const Amount& v) {
    auto it = ledger.find(who);
    if (it == ledger.end() || it->second < v)
        throw SimError(Err::InsufficientBalance, who + " short of ETH");
    it->second -= v;
}

// Events of one transaction buffer here and reach the trace only on commit,
// so reverted transactions leave no rows behind.
struct Tx {
    Market& m;
    std::uint32_t index;
    std::string hash;
    HolderId sender;
    EventTrace buffer;

    Tx(Market& market, HolderId s)
        : m(market), index(market.nextTxIndex++), hash(tx_hash(market.block, index)),
          sender(std::move(s)) {}

    void emit(EventKind kind, const std::string& venue, const Amount& in, const Amount& out) {
        buffer.push_back(TraceEvent{m.block, index, hash, sender, kind, venue, in, out, m.timestamp});
    }

    void commit() {
        if (m.trace)
            for (auto& ev : buffer) m.trace->push_back(std::move(ev));
        buffer.clear();
    }
};

// Debit x0 of ETH, stake it, and sell the minted LSD into the pool within
// transaction `tx`. Returns {minted y, realized x1}.
std::pair<Amount, Amount> stake_swap_body(Market& m, Tx& tx, const HolderId& trader,
                                          const Amount& x0) {
    debit(*m.eth, trader, x0);
    Amount y;
    if (m.is_rebasing()) {
        y = m.rebasing->stake(trader, x0);
    } else {
        y = m.rewardBearing->stake(trader, x0);
    }
    tx.emit(EventKind::Stake, m.venuePrimary, x0, y);

    if (m.is_rebasing()) {
        m.rebasing->transfer(trader, m.poolAccount, y);
    } else {
        m.rewardBearing->transfer(trader, m.poolAccount, y);
    }
    Amount x1 = pool_swap(*m.pool, kLsd, y);
    credit(*m.eth, trader, x1);
    tx.emit(EventKind::Swap, m.venuePool + ".lsd2eth", y, x1);
    return {y, x1};
}

i256 settle_cost(Market& m, const HolderId& trader, const TxCostModel& cost) {
    Amount c = cost.total();
    debit(*m.eth, trader, c);
    credit(*m.eth, m.gasSink, c);
    return to_signed(c);
}

} // namespace

Wad Market::primary_rate() const {
    return is_rebasing() ? wad_one() : rewardBearing->exchange_rate();
}

Amount Market::eth_of(const HolderId& who) const {
    auto it = eth->find(who);
    return it == eth->end() ? Amount(0) : it->second;
}

Amount Market::lsd_balance_of(const HolderId& who) const {
    if (is_rebasing()) return rebasing->balance_of(who);
    auto it = rewardBearing->balanceOf.find(who);
    return it == rewardBearing->balanceOf.end() ? Amount(0) : it->second;
}

MarketBackup capture_market(const Market& m) {
    MarketBackup b;
    if (m.rebasing) b.rebasing = *m.rebasing;
    if (m.rewardBearing) b.rewardBearing = *m.rewardBearing;
    if (m.pool) b.pool = *m.pool;
    if (m.eth) b.eth = *m.eth;
    if (m.trace) b.traceSize = m.trace->size();
    return b;
}

void restore_market(const MarketBackup& b, Market& m) {
    if (m.rebasing && b.rebasing) *m.rebasing = *b.rebasing;
    if (m.rewardBearing && b.rewardBearing) *m.rewardBearing = *b.rewardBearing;
    if (m.pool && b.pool) *m.pool = *b.pool;
    if (m.eth) *m.eth = b.eth;
    if (m.trace && m.trace->size() > b.traceSize) m.trace->resize(b.traceSize);
}

ArbOutcome arb_stake_swap(Market& m, const HolderId& trader, const Amount& x0,
                          const TxCostModel& cost) {
    if (x0 == 0) throw SimError(Err::ZeroAmount, "arbitrage of zero size");
    MarketBackup backup = capture_market(m);
    std::uint32_t txBefore = m.nextTxIndex;
    try {
        Tx tx(m, trader);
        auto [y, x1] = stake_swap_body(m, tx, trader, x0);
        (void)y;
        i256 spent = settle_cost(m, trader, cost);
        tx.commit();
        ArbOutcome out;
        out.direction = ArbDirection::StakeSwap;
        out.sizeIn = x0;
        out.grossOut = x1;
        out.profit = to_signed(x1) - to_signed(x0) - spent;
        return out;
    } catch (...) {
        restore_market(backup, m);
        m.nextTxIndex = txBefore;
        throw;
    }
}

i256 ideal_unstake_revenue(const Wad& secondaryPrice, const Amount& ethIn) {
    if (secondaryPrice == 0) throw SimError(Err::DivideByZero, "secondary price is zero");
    return to_signed(wad_div(ethIn, secondaryPrice, Round::Down)) - to_signed(ethIn);
}

ArbOutcome arb_swap_unstake(Market& m, const HolderId& trader, const Amount& ethIn,
                            const TxCostModel& cost) {
    if (ethIn == 0) throw SimError(Err::ZeroAmount, "arbitrage of zero size");
    if (!m.is_rebasing())
        throw SimError(Err::WithdrawalsDisabled, "swap-unstake targets the rebasing protocol");
    if (!m.shapellaEnabled) throw SimError(Err::WithdrawalsDisabled, "withdrawals not enabled");
    MarketBackup backup = capture_market(m);
    std::uint32_t txBefore = m.nextTxIndex;
    i256 ideal = ideal_unstake_revenue(pool_spot_price(*m.pool), ethIn);
    try {
        // Swap leg.
        Tx swapTx(m, trader);
        debit(*m.eth, trader, ethIn);
        Amount y = pool_swap(*m.pool, kEth, ethIn);
        m.rebasing->transfer(m.poolAccount, trader, y);
        swapTx.emit(EventKind::Swap, m.venuePool + ".eth2lsd", ethIn, y);
        swapTx.commit();
        // Redemption leg, a separate transaction: the primary rate is fixed
        // at 1, so it can safely settle later.
        Tx unstakeTx(m, trader);
        Amount redeemed = m.rebasing->unstake(trader, y, m.shapellaEnabled);
        credit(*m.eth, trader, redeemed);
        unstakeTx.emit(EventKind::Unstake, m.venuePrimary, y, redeemed);
        i256 spent = settle_cost(m, trader, cost);
        unstakeTx.commit();
        ArbOutcome out;
        out.direction = ArbDirection::SwapUnstake;
        out.sizeIn = ethIn;
        out.grossOut = redeemed;
        out.profit = to_signed(redeemed) - to_signed(ethIn) - spent;
        out.idealRevenue = ideal;
        return out;
    } catch (...) {
        restore_market(backup, m);
        m.nextTxIndex = txBefore;
        throw;
    }
}

ArbOutcome arb_flash_loan(Market& m, const HolderId& trader, const Amount& x0,
                          const Wad& flashFee, const TxCostModel& cost) {
    if (x0 == 0) throw SimError(Err::ZeroAmount, "arbitrage of zero size");
    if (m.eth_of(m.flashLender) < x0)
        throw SimError(Err::InsufficientLiquidity, "flash lender short of " + to_dec_string(x0));
    MarketBackup backup = capture_market(m);
    std::uint32_t txBefore = m.nextTxIndex;
    try {
        Tx tx(m, trader);
        debit(*m.eth, m.flashLender, x0);
        credit(*m.eth, trader, x0);
        auto [y, x1] = stake_swap_body(m, tx, trader, x0);
        (void)y;
        Amount repay = x0 + wad_mul(x0, flashFee, Round::Up);
        if (m.eth_of(trader) < repay + cost.total())
            throw SimError(Err::FlashLoanDefault, "cannot repay " + to_dec_string(repay));
        debit(*m.eth, trader, repay);
        credit(*m.eth, m.flashLender, repay);
        i256 spent = settle_cost(m, trader, cost);
        tx.emit(EventKind::FlashLoan, m.flashLender, repay, x0);
        tx.commit();
        ArbOutcome out;
        out.direction = ArbDirection::StakeSwap;
        out.sizeIn = x0;
        out.grossOut = x1;
        out.profit = to_signed(x1) - to_signed(repay) - spent;
        out.usedFlashLoan = true;
        return out;
    } catch (...) {
        restore_market(backup, m);
        m.nextTxIndex = txBefore;
        throw;
    }
}

ArbOutcome arb_with_prerequisite(Market& m, const HolderId& trader, const Amount& stakeAmount,
                                 const Amount& x0, const Wad& flashFee, const TxCostModel& cost) {
    if (!m.rewardBearing)
        throw SimError(Err::DepositPoolFull, "prerequisite staking targets the deposit pool");
    // tx_stake: the deposit rides on an assignment, so the pool balance nets
    // out and `stakeAmount` of capacity opens for the arbitrage.
    if (stakeAmount > 0) {
        MarketBackup backup = capture_market(m);
        std::uint32_t txBefore = m.nextTxIndex;
        try {
            Tx stakeTx(m, trader);
            m.rewardBearing->depositPool.assign(stakeAmount);
            stakeTx.emit(EventKind::Assign, m.venuePrimary, stakeAmount, 0);
            debit(*m.eth, trader, stakeAmount);
            Amount minted = m.rewardBearing->stake_assigned(trader, stakeAmount);
            stakeTx.emit(EventKind::Stake, m.venuePrimary, stakeAmount, minted);
            stakeTx.commit();
        } catch (...) {
            restore_market(backup, m);
            m.nextTxIndex = txBefore;
            throw;
        }
    }
    // tx_arb: consecutive transaction index in the same block. A failure
    // here reverts the arbitrage only; the prerequisite stake stands.
    ArbOutcome out = arb_flash_loan(m, trader, x0, flashFee, cost);
    out.prerequisiteStake = stakeAmount;
    return out;
}

std::pair<Amount, i256> optimal_size(const Market& m, ArbDirection direction,
                                     const TxCostModel& cost,
                                     std::pair<Amount, Amount> bounds, const Wad& flashFee) {
    if (bounds.first < 1 || bounds.first > bounds.second)
        throw SimError(Err::InvalidBounds, "need 1 <= lower <= upper");

    // Profit of one candidate size on a throwaway copy of the market.
    // Infeasible sizes count as unboundedly bad.
    MarketBackup base = capture_market(m);
    auto evaluate = [&](const Amount& x) -> std::optional<i256> {
        RebasingLsd rebasing = base.rebasing ? *base.rebasing : RebasingLsd{};
        RewardBearingLsd rewardBearing = base.rewardBearing ? *base.rewardBearing : RewardBearingLsd{};
        Pool pool = *base.pool;
        std::map<HolderId, Amount> eth = base.eth;
        Market probe;
        probe.rebasing = m.rebasing ? &rebasing : nullptr;
        probe.rewardBearing = m.rewardBearing ? &rewardBearing : nullptr;
        probe.pool = &pool;
        probe.eth = &eth;
        probe.shapellaEnabled = m.shapellaEnabled;
        probe.poolAccount = m.poolAccount;
        probe.gasSink = m.gasSink;
        probe.flashLender = m.flashLender;
        // The candidate trader is funded ad hoc; sizing measures the curve,
        // not anyone's balance sheet.
        eth["sizing_probe"] = x + cost.total();
        try {
            ArbOutcome o;
            if (direction == ArbDirection::StakeSwap) {
                if (flashFee > 0) {
                    eth[probe.flashLender] += x;
                    o = arb_flash_loan(probe, "sizing_probe", x, flashFee, cost);
                } else {
                    o = arb_stake_swap(probe, "sizing_probe", x, cost);
                }
            } else {
                o = arb_swap_unstake(probe, "sizing_probe", x, cost);
            }
            return o.profit;
        } catch (const SimError&) {
            return std::nullopt;
        }
    };

    // Section search on the concave profit curve. Infeasible sizes form a
    // suffix of the interval (capacity and range limits grow with size), so
    // an infeasible probe always sends the bracket left.
    Amount lo = bounds.first, hi = bounds.second;
    while (hi - lo > 4) {
        Amount step = mul_div(hi - lo, 382, 1000);
        Amount m1 = lo + step;
        Amount m2 = hi - step;
        if (m1 >= m2) break;
        auto f1 = evaluate(m1);
        if (!f1) {
            hi = m1;
            continue;
        }
        auto f2 = evaluate(m2);
        if (!f2 || *f1 >= *f2)
            hi = m2; // argmax at or below m2; ties resolve toward smaller sizes
        else
            lo = m1;
    }
    Amount bestX = 0;
    std::optional<i256> bestP;
    for (Amount x = lo; x <= hi; x += 1) {
        auto p = evaluate(x);
        if (p && (!bestP || *p > *bestP)) {
            bestP = p;
            bestX = x;
        }
    }
    if (!bestP || *bestP <= 0) return {Amount(0), i256(0)};
    return {bestX, *bestP};
}

} // namespace lsdsim
