#include "lsdsim/serialize.hpp"

#include <sstream>

namespace lsdsim {

namespace {

constexpr const char* kHeader = "lsdsim-state v1";

std::string get(const KvMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw SimError(Err::CorruptSnapshot, "missing key " + key);
    return it->second;
}

u256 get_u256(const KvMap& kv, const std::string& key) {
    try {
        return u256(get(kv, key));
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        throw SimError(Err::CorruptSnapshot, "bad number at " + key);
    }
}

unsigned get_unsigned(const KvMap& kv, const std::string& key) {
    return get_u256(kv, key).convert_to<unsigned>();
}

// Holder ids appear inside keys; the separator and newline are forbidden.
void check_holder(const std::string& h) {
    if (h.empty() || h.find('=') != std::string::npos || h.find('\n') != std::string::npos)
        throw SimError(Err::CorruptSnapshot, "unserializable holder id");
}

void decode_holder_map(const KvMap& kv, const std::string& prefix,
                       std::map<HolderId, Amount>& out) {
    for (auto it = kv.lower_bound(prefix); it != kv.end() && it->first.starts_with(prefix); ++it)
        out[it->first.substr(prefix.size())] = u256(it->second);
}

} // namespace

void encode(KvMap& kv, const std::string& prefix, const RebasingLsd& s) {
    kv[prefix + "totalEth"] = to_dec_string(s.totalEth);
    kv[prefix + "totalShares"] = to_dec_string(s.totalShares);
    kv[prefix + "protocolFee"] = to_dec_string(s.protocolFee);
    kv[prefix + "paused"] = s.paused ? "1" : "0";
    kv[prefix + "treasury"] = s.treasury;
    for (const auto& [holder, shares] : s.sharesOf) {
        check_holder(holder);
        kv[prefix + "shares." + holder] = to_dec_string(shares);
    }
}

RebasingLsd decode_rebasing(const KvMap& kv, const std::string& prefix) {
    RebasingLsd s;
    s.totalEth = get_u256(kv, prefix + "totalEth");
    s.totalShares = get_u256(kv, prefix + "totalShares");
    s.protocolFee = get_u256(kv, prefix + "protocolFee");
    s.paused = get(kv, prefix + "paused") == "1";
    s.treasury = get(kv, prefix + "treasury");
    decode_holder_map(kv, prefix + "shares.", s.sharesOf);
    return s;
}

void encode(KvMap& kv, const std::string& prefix, const RewardBearingLsd& s) {
    kv[prefix + "totalEthStaked"] = to_dec_string(s.totalEthStaked);
    kv[prefix + "stakingRewardInEth"] = to_dec_string(s.stakingRewardInEth);
    kv[prefix + "lsdTotalSupply"] = to_dec_string(s.lsdTotalSupply);
    kv[prefix + "depositPool.balance"] = to_dec_string(s.depositPool.balance);
    kv[prefix + "depositPool.maxCapacity"] = to_dec_string(s.depositPool.maxCapacity);
    for (const auto& [holder, bal] : s.balanceOf) {
        check_holder(holder);
        kv[prefix + "balance." + holder] = to_dec_string(bal);
    }
}

RewardBearingLsd decode_reward_bearing(const KvMap& kv, const std::string& prefix) {
    RewardBearingLsd s;
    s.totalEthStaked = get_u256(kv, prefix + "totalEthStaked");
    s.stakingRewardInEth = get_u256(kv, prefix + "stakingRewardInEth");
    s.lsdTotalSupply = get_u256(kv, prefix + "lsdTotalSupply");
    s.depositPool.balance = get_u256(kv, prefix + "depositPool.balance");
    s.depositPool.maxCapacity = get_u256(kv, prefix + "depositPool.maxCapacity");
    decode_holder_map(kv, prefix + "balance.", s.balanceOf);
    return s;
}

void encode(KvMap& kv, const std::string& prefix, const DualTokenLsd& s) {
    kv[prefix + "baseSupply"] = to_dec_string(s.baseSupply);
    kv[prefix + "vaultShares"] = to_dec_string(s.vaultShares);
    kv[prefix + "vaultAssets"] = to_dec_string(s.vaultAssets);
    for (const auto& [holder, bal] : s.baseOf) {
        check_holder(holder);
        kv[prefix + "base." + holder] = to_dec_string(bal);
    }
    for (const auto& [holder, sh] : s.vaultSharesOf) {
        check_holder(holder);
        kv[prefix + "vshares." + holder] = to_dec_string(sh);
    }
}

void encode(KvMap& kv, const std::string& prefix, const Pool& pool) {
    kv[prefix + "kind"] = pool_kind_name(pool);
    if (const auto* ss = std::get_if<StableswapPool>(&pool)) {
        kv[prefix + "balance0"] = to_dec_string(ss->balances[0]);
        kv[prefix + "balance1"] = to_dec_string(ss->balances[1]);
        kv[prefix + "amp"] = std::to_string(ss->amp);
        kv[prefix + "feeBps"] = std::to_string(ss->feeBps);
        kv[prefix + "lpTotalSupply"] = to_dec_string(ss->lpTotalSupply);
        for (const auto& [holder, bal] : ss->lpBalanceOf) {
            check_holder(holder);
            kv[prefix + "lp." + holder] = to_dec_string(bal);
        }
    } else if (const auto* cl = std::get_if<ConcentratedPool>(&pool)) {
        kv[prefix + "sqrtPrice"] = to_dec_string(cl->sqrtPrice);
        kv[prefix + "liquidity"] = to_dec_string(cl->liquidity);
        kv[prefix + "feeBps"] = std::to_string(cl->feeBps);
        kv[prefix + "rangeLower"] = to_dec_string(cl->rangeLower);
        kv[prefix + "rangeUpper"] = to_dec_string(cl->rangeUpper);
        kv[prefix + "feeGrowth0"] = to_dec_string(cl->feeGrowth0);
        kv[prefix + "feeGrowth1"] = to_dec_string(cl->feeGrowth1);
        kv[prefix + "reserve0"] = to_dec_string(cl->reserve0);
        kv[prefix + "reserve1"] = to_dec_string(cl->reserve1);
        for (const auto& [holder, pos] : cl->positions) {
            check_holder(holder);
            std::string p = prefix + "pos." + holder + ".";
            kv[p + "liquidity"] = to_dec_string(pos.liquidity);
            kv[p + "snap0"] = to_dec_string(pos.feeGrowth0Snap);
            kv[p + "snap1"] = to_dec_string(pos.feeGrowth1Snap);
            kv[p + "owed0"] = to_dec_string(pos.owed0);
            kv[p + "owed1"] = to_dec_string(pos.owed1);
        }
    } else if (const auto* wp = std::get_if<WeightedPool>(&pool)) {
        kv[prefix + "balance0"] = to_dec_string(wp->balances[0]);
        kv[prefix + "balance1"] = to_dec_string(wp->balances[1]);
        kv[prefix + "feeBps"] = std::to_string(wp->feeBps);
        kv[prefix + "lpTotalSupply"] = to_dec_string(wp->lpTotalSupply);
        for (const auto& [holder, bal] : wp->lpBalanceOf) {
            check_holder(holder);
            kv[prefix + "lp." + holder] = to_dec_string(bal);
        }
    }
}

Pool decode_pool(const KvMap& kv, const std::string& prefix) {
    std::string kind = get(kv, prefix + "kind");
    if (kind == "stableswap") {
        StableswapPool ss;
        ss.balances[0] = get_u256(kv, prefix + "balance0");
        ss.balances[1] = get_u256(kv, prefix + "balance1");
        ss.amp = get_unsigned(kv, prefix + "amp");
        ss.feeBps = get_unsigned(kv, prefix + "feeBps");
        ss.lpTotalSupply = get_u256(kv, prefix + "lpTotalSupply");
        decode_holder_map(kv, prefix + "lp.", ss.lpBalanceOf);
        return ss;
    }
    if (kind == "concentrated") {
        ConcentratedPool cl;
        cl.sqrtPrice = get_u256(kv, prefix + "sqrtPrice");
        cl.liquidity = get_u256(kv, prefix + "liquidity");
        cl.feeBps = get_unsigned(kv, prefix + "feeBps");
        cl.rangeLower = get_u256(kv, prefix + "rangeLower");
        cl.rangeUpper = get_u256(kv, prefix + "rangeUpper");
        cl.feeGrowth0 = get_u256(kv, prefix + "feeGrowth0");
        cl.feeGrowth1 = get_u256(kv, prefix + "feeGrowth1");
        cl.reserve0 = get_u256(kv, prefix + "reserve0");
        cl.reserve1 = get_u256(kv, prefix + "reserve1");
        const std::string posPrefix = prefix + "pos.";
        for (auto it = kv.lower_bound(posPrefix);
             it != kv.end() && it->first.starts_with(posPrefix); ++it) {
            std::string rest = it->first.substr(posPrefix.size());
            auto dot = rest.rfind('.');
            if (dot == std::string::npos) throw SimError(Err::CorruptSnapshot, "bad position key");
            std::string holder = rest.substr(0, dot);
            if (cl.positions.count(holder)) continue;
            std::string p = posPrefix + holder + ".";
            ClPosition pos;
            pos.liquidity = get_u256(kv, p + "liquidity");
            pos.feeGrowth0Snap = get_u256(kv, p + "snap0");
            pos.feeGrowth1Snap = get_u256(kv, p + "snap1");
            pos.owed0 = get_u256(kv, p + "owed0");
            pos.owed1 = get_u256(kv, p + "owed1");
            cl.positions[holder] = pos;
        }
        return cl;
    }
    if (kind == "weighted") {
        WeightedPool wp;
        wp.balances[0] = get_u256(kv, prefix + "balance0");
        wp.balances[1] = get_u256(kv, prefix + "balance1");
        wp.feeBps = get_unsigned(kv, prefix + "feeBps");
        wp.lpTotalSupply = get_u256(kv, prefix + "lpTotalSupply");
        decode_holder_map(kv, prefix + "lp.", wp.lpBalanceOf);
        return wp;
    }
    throw SimError(Err::CorruptSnapshot, "unknown pool kind " + kind);
}

std::string kv_to_blob(const KvMap& kv) {
    std::ostringstream out;
    out << kHeader << "\n";
    for (const auto& [k, v] : kv) out << k << '=' << v << "\n";
    out << "end " << kv.size() << "\n";
    return out.str();
}

KvMap blob_to_kv(const std::string& blob) {
    std::istringstream in(blob);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw SimError(Err::CorruptSnapshot, "bad header");
    KvMap kv;
    bool terminated = false;
    while (std::getline(in, line)) {
        if (line.rfind("end ", 0) == 0) {
            std::size_t n = std::stoull(line.substr(4));
            if (n != kv.size()) throw SimError(Err::CorruptSnapshot, "line count mismatch");
            terminated = true;
            break;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw SimError(Err::CorruptSnapshot, "bad line: " + line);
        kv.emplace(line.substr(0, eq), line.substr(eq + 1));
    }
    if (!terminated) throw SimError(Err::CorruptSnapshot, "truncated blob");
    return kv;
}

std::string snapshot_text(const RebasingLsd& s) {
    KvMap kv;
    encode(kv, "rebasing.", s);
    return kv_to_blob(kv);
}

std::string snapshot_text(const RewardBearingLsd& s) {
    KvMap kv;
    encode(kv, "rewardBearing.", s);
    return kv_to_blob(kv);
}

std::string snapshot_text(const Pool& pool) {
    KvMap kv;
    encode(kv, "pool.", pool);
    return kv_to_blob(kv);
}

} // namespace lsdsim
