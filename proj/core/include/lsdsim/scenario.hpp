#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lsdsim/amm.hpp"
#include "lsdsim/analytics.hpp"
#include "lsdsim/arbitrage.hpp"
#include "lsdsim/lsd.hpp"
#include "lsdsim/trace.hpp"

namespace lsdsim {

// ----------------------------------------------------------- configuration

struct ShapellaCfg {
    bool enabled = false;
    std::uint64_t activationBlock = 0;
};

struct RebasingCfg {
    bool present = false;
    Wad protocolFee = 0;
    Wad dailyRewardRate = 0;
};

struct RewardBearingCfg {
    bool present = false;
    Wad dailyRewardRate = 0;
    Amount depositPoolCap = 0;
    Amount initialReward = 0; // accrued at genesis so the run starts above parity
};

struct PoolCfg {
    std::string id;
    std::string kind; // stableswap | concentrated | weighted
    std::string lsd;  // rebasing | rewardBearing
    Amount lsdBalance = 0;
    Amount ethBalance = 0;
    unsigned feeBps = 0;
    unsigned amp = 100;   // stableswap
    Wad sqrtPrice = 0;    // concentrated
    Wad rangeLower = 0;
    Wad rangeUpper = 0;
};

struct NoiseTraderCfg {
    std::string id;
    std::string pool;
    Amount eth = 0;
    Amount lsd = 0;
    Amount minSwap = 0;
    Amount maxSwap = 0;
    std::uint64_t ethInBiasWad = 500'000'000'000'000'000ULL; // P(direction = ETH->LSD)
    std::uint64_t activationProbWad = 1'000'000'000'000'000'000ULL;
};

struct ArbitrageurCfg {
    std::string id;
    std::string pool;
    Amount eth = 0;
    std::string strategy; // stakeSwap | flashLoan | withPrerequisite | swapUnstake
    TxCostModel cost;
    Wad flashFee = 0;
    Amount minProfit = 0;
    Amount boundsLo = 1;
    Amount boundsHi = 0;
    Amount prerequisiteStake = 0;
};

struct LpCfg {
    std::string id;
    std::string pool;
    std::uint64_t depositBlock = 0;
    std::uint64_t withdrawBlock = 0;
    Amount lsd = 0;
    Amount eth = 0;
    Amount txFeePerAction = 0;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    std::uint64_t horizonBlocks = 0;
    std::uint32_t blockTimeSeconds = 12;
    std::int64_t genesisTimestamp = 1'600'000'000;
    ShapellaCfg shapella;
    RebasingCfg rebasing;
    RewardBearingCfg rewardBearing;
    std::vector<PoolCfg> pools;
    std::vector<NoiseTraderCfg> noiseTraders;
    std::vector<ArbitrageurCfg> arbitrageurs;
    std::vector<LpCfg> lps;
    Amount flashLenderLiquidity = 0;

    // Parses the JSON rendering of the config tree; throws ConfigError
    // naming the offending field path.
    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);
    void validate() const;
};

// ----------------------------------------------------------------- world

struct PoolInstance {
    std::string id;
    std::string lsd; // which protocol backs token0
    Pool pool;
};

struct WorldState {
    std::uint64_t block = 0;
    std::int64_t timestamp = 0;
    bool hasRebasing = false;
    bool hasRewardBearing = false;
    RebasingLsd rebasing;
    RewardBearingLsd rewardBearing;
    std::vector<PoolInstance> pools;
    std::map<HolderId, Amount> eth;
};

// Canonical text snapshot; restore(snapshot(s)) == s bit-exact.
std::string snapshot(const WorldState& state);
WorldState restore(const std::string& blob);
bool states_equal(const WorldState& a, const WorldState& b);

// Total ETH visible anywhere: agent ledger, pool reserves, protocol backing.
Amount total_eth(const WorldState& state);

struct RunResult {
    EventTrace trace;
    std::map<std::string, TickSeries> ticksByPool; // keyed by pool id
    HistoryByVenue histories;
    WorldState finalState;
    Amount rewardEthInjected = 0; // sum of traced Rebase/Accrue amounts
};

// Deterministic block-by-block run: identical config and seed give
// byte-identical outputs.
RunResult run(const ScenarioConfig& config);

} // namespace lsdsim
