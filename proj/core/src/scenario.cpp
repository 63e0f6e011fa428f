#include "lsdsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lsdsim/rng.hpp"
#include "lsdsim/serialize.hpp"

namespace lsdsim {

namespace {

using nlohmann::json;

constexpr std::int64_t kSecondsPerDay = 86'400;
constexpr std::int64_t kTickSpacing = 600; // 10 minutes
constexpr const char* kRebasingVenue = "lido";
constexpr const char* kRewardBearingVenue = "rocket";

// --------------------------------------------------------- config parsing

[[noreturn]] void cfg_fail(const std::string& path, const std::string& why) {
    throw SimError(Err::ConfigError, path + ": " + why);
}

const json& need(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) cfg_fail(path + "." + key, "missing");
    return *it;
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    cfg_fail(path, "expected a non-negative integer");
}

std::int64_t as_i64(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    cfg_fail(path, "expected an integer");
}

std::string as_str(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    cfg_fail(path, "expected a string");
}

// Amounts and wads accept integers or decimal strings ("16e18", "0.5e18").
u256 as_amount(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_amount(j.get<std::string>());
        if (j.is_number_unsigned()) return u256(j.get<std::uint64_t>());
        if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
            return u256(static_cast<std::uint64_t>(j.get<std::int64_t>()));
    } catch (const SimError& e) {
        cfg_fail(path, e.what());
    }
    cfg_fail(path, "expected an amount (integer wei or decimal string)");
}

u256 amount_or(const json& j, const std::string& path, const char* key, const u256& dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : as_amount(*it, path + "." + key);
}

std::uint64_t u64_or(const json& j, const std::string& path, const char* key, std::uint64_t dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : as_u64(*it, path + "." + key);
}

TxCostModel cost_from_json(const json& j, const std::string& path) {
    TxCostModel c;
    c.gasPerArb = u64_or(j, path, "gasPerArb", 0);
    c.gasPrice = amount_or(j, path, "gasPriceWei", 0);
    c.bribe = amount_or(j, path, "bribeWei", 0);
    return c;
}

// ------------------------------------------------------------- the engine

struct Engine {
    const ScenarioConfig& cfg;
    WorldState w;
    EventTrace trace;
    std::map<std::string, TickSeries> ticks;
    HistoryByVenue histories;
    Xoshiro256 rng;
    std::uint32_t txCounter = 0;
    std::int64_t lastTickSlot = -1;
    Amount rewardInjected = 0;

    explicit Engine(const ScenarioConfig& c) : cfg(c), rng(c.seed) {}

    PoolInstance& pool_by_id(const std::string& id) {
        for (auto& p : w.pools)
            if (p.id == id) return p;
        throw SimError(Err::ConfigError, "unknown pool " + id);
    }

    HolderId pool_account(const PoolInstance& p) const { return "pool:" + p.id; }

    std::string primary_venue(const PoolInstance& p) const {
        return p.lsd == "rebasing" ? kRebasingVenue : kRewardBearingVenue;
    }

    bool shapella_on() const {
        return cfg.shapella.enabled && w.block >= cfg.shapella.activationBlock;
    }

    Market bind(PoolInstance& p) {
        Market m;
        m.rebasing = p.lsd == "rebasing" ? &w.rebasing : nullptr;
        m.rewardBearing = p.lsd == "rewardBearing" ? &w.rewardBearing : nullptr;
        m.pool = &p.pool;
        m.eth = &w.eth;
        m.shapellaEnabled = shapella_on();
        m.poolAccount = pool_account(p);
        m.gasSink = "sink";
        m.flashLender = "lender";
        m.venuePrimary = primary_venue(p);
        m.venuePool = p.id;
        m.trace = &trace;
        m.block = w.block;
        m.timestamp = w.timestamp;
        m.nextTxIndex = txCounter;
        return m;
    }

    // One-off transaction emission for engine-driven actions.
    std::uint32_t begin_tx() { return txCounter++; }

    void emit(std::uint32_t txIndex, const HolderId& sender, EventKind kind,
              const std::string& venue, const Amount& in, const Amount& out) {
        std::uint64_t state = (w.block << 20) ^ txIndex;
        char hash[20];
        std::snprintf(hash, sizeof hash, "0x%016llx",
                      static_cast<unsigned long long>(splitmix64(state)));
        trace.push_back(TraceEvent{w.block, txIndex, hash, sender, kind, venue, in, out, w.timestamp});
    }

    void transfer_lsd(PoolInstance& p, const HolderId& from, const HolderId& to, const Amount& v) {
        if (p.lsd == "rebasing")
            w.rebasing.transfer(from, to, v);
        else
            w.rewardBearing.transfer(from, to, v);
    }

    Amount lsd_balance(const PoolInstance& p, const HolderId& who) {
        if (p.lsd == "rebasing") return w.rebasing.balance_of(who);
        auto it = w.rewardBearing.balanceOf.find(who);
        return it == w.rewardBearing.balanceOf.end() ? Amount(0) : it->second;
    }

    Wad primary_rate(const PoolInstance& p) {
        return p.lsd == "rebasing" ? wad_one() : w.rewardBearing.exchange_rate();
    }

    Wad share_price_or_one(const PoolInstance& p) {
        return p.lsd == "rebasing" ? w.rebasing.share_price() : wad_one();
    }

    Amount eth_of(const HolderId& who) {
        auto it = w.eth.find(who);
        return it == w.eth.end() ? Amount(0) : it->second;
    }

    void credit(const HolderId& who, const Amount& v) { w.eth[who] += v; }

    void debit(const HolderId& who, const Amount& v) {
        auto it = w.eth.find(who);
        if (it == w.eth.end() || it->second < v)
            throw SimError(Err::InsufficientBalance, who + " short of ETH");
        it->second -= v;
    }

    // Stake `ethAmount` with the protocol behind pool `p` on behalf of who.
    Amount stake_primary(PoolInstance& p, const HolderId& who, const Amount& ethAmount,
                         std::uint32_t txIndex) {
        debit(who, ethAmount);
        Amount minted = p.lsd == "rebasing" ? w.rebasing.stake(who, ethAmount)
                                            : w.rewardBearing.stake(who, ethAmount);
        emit(txIndex, who, EventKind::Stake, primary_venue(p), ethAmount, minted);
        return minted;
    }

    uint64_t draw_u64() { return rng.next(); }

    Amount draw_amount(const Amount& lo, const Amount& hi) {
        if (hi <= lo) return lo;
        u256 span = hi - lo + 1;
        u256 r = (u256(rng.next()) << 64) | u256(rng.next());
        return lo + r % span;
    }

    void record_history(PoolInstance& p) {
        RatePoint pt;
        pt.timestamp = w.timestamp;
        pt.p1st = primary_rate(p);
        pt.pshare = share_price_or_one(p);
        auto& points = histories[p.id].points;
        if (!points.empty() && points.back().timestamp == pt.timestamp)
            points.back() = pt;
        else
            points.push_back(pt);
    }

    // Rebasing LSDs grow inside the pools that hold them; re-read the pool
    // account balance after every rebase so swap math sees the new supply.
    void sync_rebasing_pools() {
        for (auto& p : w.pools) {
            if (p.lsd != "rebasing") continue;
            Amount held = w.rebasing.balance_of(pool_account(p));
            if (auto* ss = std::get_if<StableswapPool>(&p.pool)) ss->balances[0] = held;
        }
    }

    void genesis() {
        w.block = 0;
        w.timestamp = cfg.genesisTimestamp;
        w.hasRebasing = cfg.rebasing.present;
        w.hasRewardBearing = cfg.rewardBearing.present;
        w.rebasing.protocolFee = cfg.rebasing.protocolFee;
        w.rewardBearing.depositPool.maxCapacity = cfg.rewardBearing.depositPoolCap;

        // Initial funding; this defines the conservation baseline.
        for (const auto& p : cfg.pools) w.eth["genesis"] += p.lsdBalance + p.ethBalance;
        for (const auto& n : cfg.noiseTraders) w.eth[n.id] += n.eth + n.lsd;
        for (const auto& a : cfg.arbitrageurs) w.eth[a.id] += a.eth;
        for (const auto& l : cfg.lps) w.eth[l.id] += l.eth + l.lsd;
        w.eth["lender"] += cfg.flashLenderLiquidity;
        w.eth["sink"] += 0;

        // Pools.
        for (const auto& pc : cfg.pools) {
            PoolInstance inst;
            inst.id = pc.id;
            inst.lsd = pc.lsd;
            if (pc.kind == "stableswap") {
                StableswapPool ss;
                ss.amp = pc.amp;
                ss.feeBps = pc.feeBps;
                inst.pool = ss;
            } else if (pc.kind == "concentrated") {
                ConcentratedPool cl;
                cl.feeBps = pc.feeBps;
                cl.sqrtPrice = pc.sqrtPrice;
                cl.rangeLower = pc.rangeLower;
                cl.rangeUpper = pc.rangeUpper;
                inst.pool = cl;
            } else {
                WeightedPool wp;
                wp.feeBps = pc.feeBps;
                inst.pool = wp;
            }
            w.pools.push_back(std::move(inst));

            PoolInstance& p = w.pools.back();
            std::uint32_t tx = begin_tx();
            Amount minted = stake_primary(p, "genesis", pc.lsdBalance, tx);
            transfer_lsd(p, "genesis", pool_account(p), minted);
            debit("genesis", pc.ethBalance);
            if (auto* ss = std::get_if<StableswapPool>(&p.pool)) {
                ss->add_liquidity("genesis", {minted, pc.ethBalance});
                emit(tx, "genesis", EventKind::AddLiquidity, p.id, pc.ethBalance, minted);
            } else if (auto* cl = std::get_if<ConcentratedPool>(&p.pool)) {
                auto res = cl->mint("genesis", minted, pc.ethBalance);
                // Whatever the binding side left over goes back to genesis.
                transfer_lsd(p, pool_account(p), "genesis", minted - res.used0);
                credit("genesis", pc.ethBalance - res.used1);
                emit(tx, "genesis", EventKind::AddLiquidity, p.id, res.used1, res.used0);
            } else if (auto* wp = std::get_if<WeightedPool>(&p.pool)) {
                wp->add_liquidity("genesis", {minted, pc.ethBalance});
                emit(tx, "genesis", EventKind::AddLiquidity, p.id, pc.ethBalance, minted);
            }
        }

        // Agents acquire their LSD inventory at the genesis rate.
        for (const auto& n : cfg.noiseTraders) {
            if (n.lsd == 0) continue;
            stake_primary(pool_by_id(n.pool), n.id, n.lsd, begin_tx());
        }
        for (const auto& l : cfg.lps) {
            if (l.lsd == 0) continue;
            stake_primary(pool_by_id(l.pool), l.id, l.lsd, begin_tx());
        }

        if (cfg.rewardBearing.present && cfg.rewardBearing.initialReward > 0) {
            w.rewardBearing.accrue(cfg.rewardBearing.initialReward);
            rewardInjected += cfg.rewardBearing.initialReward;
            emit(begin_tx(), "oracle", EventKind::Accrue, kRewardBearingVenue,
                 cfg.rewardBearing.initialReward, 0);
        }

        for (auto& p : w.pools) record_history(p);
        sample_ticks();
    }

    void apply_daily_rewards(std::int64_t daysCrossed) {
        for (std::int64_t k = 0; k < daysCrossed; ++k) {
            if (cfg.rebasing.present && cfg.rebasing.dailyRewardRate > 0 &&
                w.rebasing.totalShares > 0) {
                Amount rewards = wad_mul(w.rebasing.totalEth, cfg.rebasing.dailyRewardRate, Round::Down);
                if (rewards > 0) {
                    w.rebasing.rebase(rewards);
                    rewardInjected += rewards;
                    emit(begin_tx(), "oracle", EventKind::Rebase, kRebasingVenue, rewards, 0);
                    sync_rebasing_pools();
                }
            }
            if (cfg.rewardBearing.present && cfg.rewardBearing.dailyRewardRate > 0 &&
                w.rewardBearing.lsdTotalSupply > 0) {
                Amount base = w.rewardBearing.totalEthStaked + w.rewardBearing.stakingRewardInEth;
                Amount reward = wad_mul(base, cfg.rewardBearing.dailyRewardRate, Round::Down);
                if (reward > 0) {
                    w.rewardBearing.accrue(reward);
                    rewardInjected += reward;
                    emit(begin_tx(), "oracle", EventKind::Accrue, kRewardBearingVenue, reward, 0);
                }
            }
        }
        if (daysCrossed > 0)
            for (auto& p : w.pools) record_history(p);
    }

    void lp_step() {
        for (const auto& l : cfg.lps) {
            PoolInstance& p = pool_by_id(l.pool);
            if (w.block == l.depositBlock) lp_deposit(l, p);
            if (w.block == l.withdrawBlock) lp_withdraw(l, p);
        }
    }

    void lp_deposit(const LpCfg& l, PoolInstance& p) {
        if (lsd_balance(p, l.id) < l.lsd || eth_of(l.id) < l.eth + l.txFeePerAction) return;
        std::uint32_t tx = begin_tx();
        try {
            if (auto* cl = std::get_if<ConcentratedPool>(&p.pool)) {
                auto res = cl->mint(l.id, l.lsd, l.eth);
                transfer_lsd(p, l.id, pool_account(p), res.used0);
                debit(l.id, res.used1);
                emit(tx, l.id, EventKind::AddLiquidity, p.id, res.used1, res.used0);
            } else {
                transfer_lsd(p, l.id, pool_account(p), l.lsd);
                debit(l.id, l.eth);
                if (auto* ss = std::get_if<StableswapPool>(&p.pool))
                    ss->add_liquidity(l.id, {l.lsd, l.eth});
                else
                    std::get<WeightedPool>(p.pool).add_liquidity(l.id, {l.lsd, l.eth});
                emit(tx, l.id, EventKind::AddLiquidity, p.id, l.eth, l.lsd);
            }
            pay_gas(l.id, l.txFeePerAction);
        } catch (const SimError&) {
            txCounter = tx; // nothing committed
        }
    }

    void lp_withdraw(const LpCfg& l, PoolInstance& p) {
        std::uint32_t tx = begin_tx();
        try {
            Amount outLsd = 0, outEth = 0;
            if (auto* cl = std::get_if<ConcentratedPool>(&p.pool)) {
                auto res = cl->collect(l.id);
                outLsd = res.principal0 + res.fees0;
                outEth = res.principal1 + res.fees1;
            } else if (auto* ss = std::get_if<StableswapPool>(&p.pool)) {
                auto it = ss->lpBalanceOf.find(l.id);
                if (it == ss->lpBalanceOf.end() || it->second == 0)
                    throw SimError(Err::NothingToCollect, l.id);
                auto out = ss->remove_liquidity(l.id, it->second);
                outLsd = out[0];
                outEth = out[1];
            } else {
                auto& wp = std::get<WeightedPool>(p.pool);
                auto it = wp.lpBalanceOf.find(l.id);
                if (it == wp.lpBalanceOf.end() || it->second == 0)
                    throw SimError(Err::NothingToCollect, l.id);
                auto out = wp.remove_liquidity(l.id, it->second);
                outLsd = out[0];
                outEth = out[1];
            }
            transfer_lsd(p, pool_account(p), l.id, outLsd);
            credit(l.id, outEth);
            emit(tx, l.id, EventKind::RemoveLiquidity, p.id, outEth, outLsd);
            pay_gas(l.id, l.txFeePerAction);
        } catch (const SimError&) {
            txCounter = tx;
        }
    }

    void pay_gas(const HolderId& who, const Amount& fee) {
        if (fee == 0) return;
        debit(who, fee);
        credit("sink", fee);
    }

    void noise_step() {
        for (const auto& n : cfg.noiseTraders) {
            if (n.activationProbWad < 1'000'000'000'000'000'000ULL &&
                !rng.chance(n.activationProbWad, 1'000'000'000'000'000'000ULL))
                continue;
            PoolInstance& p = pool_by_id(n.pool);
            bool ethIn = rng.chance(n.ethInBiasWad, 1'000'000'000'000'000'000ULL);
            Amount size = draw_amount(n.minSwap, n.maxSwap);
            if (size == 0) continue;
            std::uint32_t tx = begin_tx();
            try {
                if (ethIn) {
                    if (eth_of(n.id) < size) throw SimError(Err::InsufficientBalance, n.id);
                    Amount out = pool_swap(p.pool, kEth, size);
                    debit(n.id, size);
                    transfer_lsd(p, pool_account(p), n.id, out);
                    emit(tx, n.id, EventKind::Swap, p.id + ".eth2lsd", size, out);
                } else {
                    if (lsd_balance(p, n.id) < size) throw SimError(Err::InsufficientBalance, n.id);
                    Amount out = pool_swap(p.pool, kLsd, size);
                    transfer_lsd(p, n.id, pool_account(p), size);
                    credit(n.id, out);
                    emit(tx, n.id, EventKind::Swap, p.id + ".lsd2eth", size, out);
                }
            } catch (const SimError&) {
                txCounter = tx; // skipped trade
            }
        }
    }

    void arb_step() {
        for (const auto& a : cfg.arbitrageurs) {
            PoolInstance& p = pool_by_id(a.pool);
            Wad spot = 0;
            try {
                spot = pool_spot_price(p.pool);
            } catch (const SimError&) {
                continue;
            }
            Wad rate = primary_rate(p);
            bool wantStakeSwap = a.strategy != "swapUnstake";
            if (wantStakeSwap && spot <= rate) continue;
            if (!wantStakeSwap && spot >= rate) continue;

            // Upper bound on the edge; skip sizing when even a slippage-free
            // fill cannot clear the threshold.
            Amount gross = wad_mul(a.boundsHi, abs_diff(spot, rate), Round::Down);
            if (to_signed(gross) <= to_signed(a.minProfit + a.cost.total())) continue;

            Market m = bind(p);
            Wad flashFee = (a.strategy == "flashLoan" || a.strategy == "withPrerequisite")
                               ? a.flashFee
                               : Wad(0);

            std::pair<Amount, i256> sized{0, 0};
            try {
                if (a.strategy == "withPrerequisite" && m.rewardBearing) {
                    // Size against the state the prerequisite stake unlocks.
                    RewardBearingLsd probeRb = w.rewardBearing;
                    Amount freeable = probeRb.depositPool.balance < a.prerequisiteStake
                                          ? probeRb.depositPool.balance
                                          : a.prerequisiteStake;
                    probeRb.depositPool.assign(freeable);
                    Market probe = m;
                    probe.rewardBearing = &probeRb;
                    probe.trace = nullptr;
                    sized = optimal_size(probe, ArbDirection::StakeSwap, a.cost,
                                         {a.boundsLo, a.boundsHi}, flashFee);
                } else {
                    ArbDirection dir = wantStakeSwap ? ArbDirection::StakeSwap
                                                     : ArbDirection::SwapUnstake;
                    sized = optimal_size(m, dir, a.cost, {a.boundsLo, a.boundsHi}, flashFee);
                }
            } catch (const SimError&) {
                continue;
            }
            if (sized.first == 0 || sized.second < to_signed(a.minProfit)) continue;

            try {
                if (a.strategy == "stakeSwap") {
                    arb_stake_swap(m, a.id, sized.first, a.cost);
                } else if (a.strategy == "flashLoan") {
                    arb_flash_loan(m, a.id, sized.first, a.flashFee, a.cost);
                } else if (a.strategy == "withPrerequisite") {
                    const auto& pool = w.rewardBearing.depositPool;
                    Amount headroom = pool.maxCapacity - pool.balance;
                    if (sized.first <= headroom) {
                        arb_flash_loan(m, a.id, sized.first, a.flashFee, a.cost);
                    } else {
                        Amount x0 = sized.first;
                        Amount unlocked = headroom + a.prerequisiteStake;
                        if (x0 > unlocked) x0 = unlocked;
                        arb_with_prerequisite(m, a.id, a.prerequisiteStake, x0, a.flashFee, a.cost);
                    }
                } else if (a.strategy == "swapUnstake") {
                    arb_swap_unstake(m, a.id, sized.first, a.cost);
                }
            } catch (const SimError&) {
                // reverted; market restored itself
            }
            txCounter = m.nextTxIndex;
        }
    }

    void sample_ticks() {
        std::int64_t slot = (w.timestamp - cfg.genesisTimestamp) / kTickSpacing;
        if (slot <= lastTickSlot) return;
        lastTickSlot = slot;
        for (auto& p : w.pools) {
            Tick t;
            t.timestamp = w.timestamp;
            t.p1st = primary_rate(p);
            try {
                t.p2nd = pool_spot_price(p.pool);
            } catch (const SimError&) {
                continue;
            }
            ticks[p.id].ticks.push_back(t);
        }
    }

    RunResult run_all() {
        genesis();
        std::int64_t prevTs = w.timestamp;
        for (std::uint64_t b = 1; b <= cfg.horizonBlocks; ++b) {
            w.block = b;
            w.timestamp = cfg.genesisTimestamp +
                          static_cast<std::int64_t>(b) * cfg.blockTimeSeconds;
            txCounter = 0;
            std::int64_t daysCrossed = w.timestamp / kSecondsPerDay - prevTs / kSecondsPerDay;
            prevTs = w.timestamp;
            apply_daily_rewards(daysCrossed);
            lp_step();
            noise_step();
            arb_step();
            sample_ticks();
        }
        for (auto& p : w.pools) record_history(p);
        validate_trace(trace);
        RunResult res;
        res.trace = std::move(trace);
        res.ticksByPool = std::move(ticks);
        res.histories = std::move(histories);
        res.finalState = std::move(w);
        res.rewardEthInjected = rewardInjected;
        return res;
    }
};

} // namespace

// --------------------------------------------------------- config surface

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SimError(Err::ConfigError, std::string("config: ") + e.what());
    }
    ScenarioConfig c;
    c.seed = as_u64(need(j, "config", "seed"), "config.seed");
    c.horizonBlocks = as_u64(need(j, "config", "horizonBlocks"), "config.horizonBlocks");
    c.blockTimeSeconds =
        static_cast<std::uint32_t>(u64_or(j, "config", "blockTimeSeconds", 12));
    if (j.contains("genesisTimestamp"))
        c.genesisTimestamp = as_i64(j["genesisTimestamp"], "config.genesisTimestamp");
    if (j.contains("shapella")) {
        const auto& s = j["shapella"];
        c.shapella.enabled = s.value("enabled", false);
        c.shapella.activationBlock = u64_or(s, "config.shapella", "activationBlock", 0);
    }
    if (j.contains("protocols")) {
        const auto& p = j["protocols"];
        if (p.contains("rebasing")) {
            const auto& r = p["rebasing"];
            c.rebasing.present = true;
            c.rebasing.protocolFee = amount_or(r, "config.protocols.rebasing", "protocolFee", 0);
            c.rebasing.dailyRewardRate =
                amount_or(r, "config.protocols.rebasing", "dailyRewardRate", 0);
        }
        if (p.contains("rewardBearing")) {
            const auto& r = p["rewardBearing"];
            c.rewardBearing.present = true;
            c.rewardBearing.dailyRewardRate =
                amount_or(r, "config.protocols.rewardBearing", "dailyRewardRate", 0);
            c.rewardBearing.depositPoolCap =
                amount_or(r, "config.protocols.rewardBearing", "depositPoolCap", 0);
            c.rewardBearing.initialReward =
                amount_or(r, "config.protocols.rewardBearing", "initialReward", 0);
        }
    }
    std::size_t idx = 0;
    for (const auto& pj : j.value("pools", json::array())) {
        std::string path = "config.pools[" + std::to_string(idx++) + "]";
        PoolCfg pc;
        pc.id = as_str(need(pj, path, "id"), path + ".id");
        pc.kind = as_str(need(pj, path, "kind"), path + ".kind");
        pc.lsd = as_str(need(pj, path, "lsd"), path + ".lsd");
        pc.lsdBalance = as_amount(need(pj, path, "lsdBalance"), path + ".lsdBalance");
        pc.ethBalance = as_amount(need(pj, path, "ethBalance"), path + ".ethBalance");
        pc.feeBps = static_cast<unsigned>(u64_or(pj, path, "feeBps", 0));
        pc.amp = static_cast<unsigned>(u64_or(pj, path, "amp", 100));
        pc.sqrtPrice = amount_or(pj, path, "sqrtPrice", 0);
        pc.rangeLower = amount_or(pj, path, "rangeLower", 0);
        pc.rangeUpper = amount_or(pj, path, "rangeUpper", 0);
        c.pools.push_back(std::move(pc));
    }
    if (j.contains("agents")) {
        const auto& ag = j["agents"];
        idx = 0;
        for (const auto& nj : ag.value("noiseTraders", json::array())) {
            std::string path = "config.agents.noiseTraders[" + std::to_string(idx++) + "]";
            NoiseTraderCfg n;
            n.id = as_str(need(nj, path, "id"), path + ".id");
            n.pool = as_str(need(nj, path, "pool"), path + ".pool");
            n.eth = amount_or(nj, path, "eth", 0);
            n.lsd = amount_or(nj, path, "lsd", 0);
            n.minSwap = as_amount(need(nj, path, "minSwap"), path + ".minSwap");
            n.maxSwap = as_amount(need(nj, path, "maxSwap"), path + ".maxSwap");
            n.ethInBiasWad =
                amount_or(nj, path, "ethInBias", u256(n.ethInBiasWad)).convert_to<std::uint64_t>();
            n.activationProbWad = amount_or(nj, path, "activationProb", u256(n.activationProbWad))
                                      .convert_to<std::uint64_t>();
            c.noiseTraders.push_back(std::move(n));
        }
        idx = 0;
        for (const auto& aj : ag.value("arbitrageurs", json::array())) {
            std::string path = "config.agents.arbitrageurs[" + std::to_string(idx++) + "]";
            ArbitrageurCfg a;
            a.id = as_str(need(aj, path, "id"), path + ".id");
            a.pool = as_str(need(aj, path, "pool"), path + ".pool");
            a.eth = amount_or(aj, path, "eth", 0);
            a.strategy = as_str(need(aj, path, "strategy"), path + ".strategy");
            if (aj.contains("cost")) a.cost = cost_from_json(aj["cost"], path + ".cost");
            a.flashFee = amount_or(aj, path, "flashFee", 0);
            a.minProfit = amount_or(aj, path, "minProfit", 0);
            a.boundsLo = amount_or(aj, path, "boundsLo", 1);
            a.boundsHi = as_amount(need(aj, path, "boundsHi"), path + ".boundsHi");
            a.prerequisiteStake = amount_or(aj, path, "prerequisiteStake", 0);
            c.arbitrageurs.push_back(std::move(a));
        }
        idx = 0;
        for (const auto& lj : ag.value("lps", json::array())) {
            std::string path = "config.agents.lps[" + std::to_string(idx++) + "]";
            LpCfg l;
            l.id = as_str(need(lj, path, "id"), path + ".id");
            l.pool = as_str(need(lj, path, "pool"), path + ".pool");
            l.depositBlock = as_u64(need(lj, path, "depositBlock"), path + ".depositBlock");
            l.withdrawBlock = as_u64(need(lj, path, "withdrawBlock"), path + ".withdrawBlock");
            l.lsd = as_amount(need(lj, path, "lsd"), path + ".lsd");
            l.eth = as_amount(need(lj, path, "eth"), path + ".eth");
            l.txFeePerAction = amount_or(lj, path, "txFeePerAction", 0);
            c.lps.push_back(std::move(l));
        }
    }
    c.flashLenderLiquidity = amount_or(j, "config", "flashLenderLiquidity", 0);
    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError(Err::ConfigError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void ScenarioConfig::validate() const {
    if (horizonBlocks == 0) cfg_fail("config.horizonBlocks", "must be positive");
    if (blockTimeSeconds == 0) cfg_fail("config.blockTimeSeconds", "must be positive");
    std::map<std::string, const PoolCfg*> byId;
    Amount rewardBearingGenesis = 0;
    for (const auto& p : pools) {
        std::string path = "config.pools[" + p.id + "]";
        if (byId.count(p.id)) cfg_fail(path + ".id", "duplicate pool id");
        byId[p.id] = &p;
        if (p.kind != "stableswap" && p.kind != "concentrated" && p.kind != "weighted")
            cfg_fail(path + ".kind", "unknown kind " + p.kind);
        if (p.lsd == "rebasing") {
            if (!rebasing.present) cfg_fail(path + ".lsd", "rebasing protocol not configured");
            if (p.kind != "stableswap")
                cfg_fail(path + ".kind", "rebasing LSD trades on the stableswap venue");
        } else if (p.lsd == "rewardBearing") {
            if (!rewardBearing.present)
                cfg_fail(path + ".lsd", "rewardBearing protocol not configured");
            rewardBearingGenesis += p.lsdBalance;
        } else {
            cfg_fail(path + ".lsd", "unknown mechanism " + p.lsd);
        }
        if (p.lsdBalance == 0 || p.ethBalance == 0)
            cfg_fail(path, "pools bootstrap with both balances positive");
        if (p.kind == "concentrated") {
            if (!(p.rangeLower < p.sqrtPrice && p.sqrtPrice < p.rangeUpper))
                cfg_fail(path, "need rangeLower < sqrtPrice < rangeUpper");
        }
        if (p.kind == "stableswap" && p.amp < 1) cfg_fail(path + ".amp", "amplification >= 1");
    }
    auto checkPool = [&](const std::string& id, const std::string& path) {
        if (!byId.count(id)) cfg_fail(path, "references unknown pool " + id);
    };
    for (const auto& n : noiseTraders) {
        std::string path = "config.agents.noiseTraders[" + n.id + "]";
        checkPool(n.pool, path + ".pool");
        if (n.minSwap > n.maxSwap) cfg_fail(path, "minSwap > maxSwap");
        if (n.lsd > 0 && byId.at(n.pool)->lsd == "rewardBearing") rewardBearingGenesis += n.lsd;
    }
    for (const auto& a : arbitrageurs) {
        std::string path = "config.agents.arbitrageurs[" + a.id + "]";
        checkPool(a.pool, path + ".pool");
        if (a.strategy != "stakeSwap" && a.strategy != "flashLoan" &&
            a.strategy != "withPrerequisite" && a.strategy != "swapUnstake")
            cfg_fail(path + ".strategy", "unknown strategy " + a.strategy);
        if (a.boundsLo < 1 || a.boundsLo > a.boundsHi) cfg_fail(path, "bad sizing bounds");
        if (a.strategy == "swapUnstake" && byId.at(a.pool)->lsd != "rebasing")
            cfg_fail(path + ".strategy", "swapUnstake needs a rebasing venue");
    }
    for (const auto& l : lps) {
        std::string path = "config.agents.lps[" + l.id + "]";
        checkPool(l.pool, path + ".pool");
        if (l.withdrawBlock <= l.depositBlock) cfg_fail(path, "withdraw must follow deposit");
        if (l.lsd > 0 && byId.at(l.pool)->lsd == "rewardBearing") rewardBearingGenesis += l.lsd;
    }
    if (rewardBearing.present && rewardBearingGenesis > rewardBearing.depositPoolCap)
        cfg_fail("config.protocols.rewardBearing.depositPoolCap",
                 "cannot absorb the genesis stakes");
}

// ------------------------------------------------------------- world state

std::string snapshot(const WorldState& state) {
    KvMap kv;
    kv["block"] = std::to_string(state.block);
    kv["timestamp"] = std::to_string(state.timestamp);
    kv["hasRebasing"] = state.hasRebasing ? "1" : "0";
    kv["hasRewardBearing"] = state.hasRewardBearing ? "1" : "0";
    kv["poolCount"] = std::to_string(state.pools.size());
    if (state.hasRebasing) encode(kv, "rebasing.", state.rebasing);
    if (state.hasRewardBearing) encode(kv, "rewardBearing.", state.rewardBearing);
    for (std::size_t i = 0; i < state.pools.size(); ++i) {
        std::string prefix = "pool." + std::to_string(i) + ".";
        kv[prefix + "id"] = state.pools[i].id;
        kv[prefix + "lsd"] = state.pools[i].lsd;
        encode(kv, prefix, state.pools[i].pool);
    }
    for (const auto& [holder, bal] : state.eth) kv["eth." + holder] = to_dec_string(bal);
    return kv_to_blob(kv);
}

WorldState restore(const std::string& blob) {
    KvMap kv = blob_to_kv(blob);
    auto get = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw SimError(Err::CorruptSnapshot, "missing key " + k);
        return it->second;
    };
    WorldState s;
    try {
        s.block = std::stoull(get("block"));
        s.timestamp = std::stoll(get("timestamp"));
        s.hasRebasing = get("hasRebasing") == "1";
        s.hasRewardBearing = get("hasRewardBearing") == "1";
        std::size_t n = std::stoull(get("poolCount"));
        if (s.hasRebasing) s.rebasing = decode_rebasing(kv, "rebasing.");
        if (s.hasRewardBearing) s.rewardBearing = decode_reward_bearing(kv, "rewardBearing.");
        for (std::size_t i = 0; i < n; ++i) {
            std::string prefix = "pool." + std::to_string(i) + ".";
            PoolInstance inst;
            inst.id = get(prefix + "id");
            inst.lsd = get(prefix + "lsd");
            inst.pool = decode_pool(kv, prefix);
            s.pools.push_back(std::move(inst));
        }
        for (auto it = kv.lower_bound("eth."); it != kv.end() && it->first.starts_with("eth.");
             ++it)
            s.eth[it->first.substr(4)] = u256(it->second);
    } catch (const SimError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimError(Err::CorruptSnapshot, e.what());
    }
    return s;
}

bool states_equal(const WorldState& a, const WorldState& b) {
    return snapshot(a) == snapshot(b);
}

Amount total_eth(const WorldState& state) {
    Amount sum = 0;
    for (const auto& [holder, bal] : state.eth) {
        (void)holder;
        sum += bal;
    }
    for (const auto& p : state.pools) {
        if (const auto* ss = std::get_if<StableswapPool>(&p.pool)) sum += ss->balances[1];
        if (const auto* cl = std::get_if<ConcentratedPool>(&p.pool)) sum += cl->reserve1;
        if (const auto* wp = std::get_if<WeightedPool>(&p.pool)) sum += wp->balances[1];
    }
    if (state.hasRebasing) sum += state.rebasing.totalEth;
    if (state.hasRewardBearing)
        sum += state.rewardBearing.totalEthStaked + state.rewardBearing.stakingRewardInEth;
    return sum;
}

RunResult run(const ScenarioConfig& config) {
    config.validate();
    Engine engine(config);
    return engine.run_all();
}

} // namespace lsdsim
