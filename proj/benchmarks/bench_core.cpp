#include <benchmark/benchmark.h>

#include "lsdsim/amm.hpp"
#include "lsdsim/arbitrage.hpp"
#include "lsdsim/scenario.hpp"

using namespace lsdsim;

namespace {

const u256 E18 = wad_one();

void BM_StableswapD(benchmark::State& state) {
    std::array<Amount, 2> balances{u256(1'200'000) * E18, u256(800'000) * E18};
    for (auto _ : state) benchmark::DoNotOptimize(stableswap_d(balances, 100));
}
BENCHMARK(BM_StableswapD);

void BM_StableswapSwap(benchmark::State& state) {
    StableswapPool base;
    base.amp = 100;
    base.feeBps = 4;
    base.add_liquidity("seed", {u256(1'000'000) * E18, u256(1'000'000) * E18});
    for (auto _ : state) {
        StableswapPool p = base;
        benchmark::DoNotOptimize(p.swap(kLsd, u256(100) * E18));
    }
}
BENCHMARK(BM_StableswapSwap);

void BM_ConcentratedSwap(benchmark::State& state) {
    ConcentratedPool base;
    base.sqrtPrice = E18;
    base.rangeLower = E18 / 2;
    base.rangeUpper = E18 * 2;
    base.liquidity = u256(1'000'000) * E18;
    base.reserve0 = base.reserve1 = u256(10'000'000) * E18;
    base.feeBps = 30;
    for (auto _ : state) {
        ConcentratedPool p = base;
        benchmark::DoNotOptimize(p.swap(kEth, u256(100) * E18));
    }
}
BENCHMARK(BM_ConcentratedSwap);

void BM_Rebase(benchmark::State& state) {
    RebasingLsd base;
    base.protocolFee = u256("100000000000000000");
    base.stake("seed", u256(1'000'000) * E18);
    for (auto _ : state) {
        RebasingLsd s = base;
        benchmark::DoNotOptimize(s.rebase(u256(100) * E18));
    }
}
BENCHMARK(BM_Rebase);

void BM_OptimalSize(benchmark::State& state) {
    RebasingLsd rebasing;
    rebasing.stake("genesis", u256(10'000) * E18);
    WeightedPool wp;
    wp.add_liquidity("genesis", {u256(10'000) * E18, u256(10'100) * E18});
    rebasing.transfer("genesis", "pool", u256(10'000) * E18);
    Pool pool = wp;
    std::map<HolderId, Amount> eth;
    Market m;
    m.rebasing = &rebasing;
    m.pool = &pool;
    m.eth = &eth;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            optimal_size(m, ArbDirection::StakeSwap, {}, {1, u256(100) * E18}));
}
BENCHMARK(BM_OptimalSize);

void BM_ScenarioBlock(benchmark::State& state) {
    auto cfg = ScenarioConfig::from_json_text(R"json({
      "seed": 1, "horizonBlocks": 500, "blockTimeSeconds": 12,
      "genesisTimestamp": 1700000000,
      "protocols": {"rebasing": {"protocolFee": "0.1e18", "dailyRewardRate": "0.0005e18"}},
      "pools": [{"id": "curve", "kind": "stableswap", "lsd": "rebasing",
                 "lsdBalance": "10000e18", "ethBalance": "10000e18", "feeBps": 4, "amp": 100}],
      "agents": {"noiseTraders": [{"id": "n1", "pool": "curve", "eth": "1000e18",
                                   "lsd": "1000e18", "minSwap": "1e18", "maxSwap": "20e18",
                                   "activationProb": "0.5e18"}]}
    })json");
    for (auto _ : state) {
        auto res = run(cfg);
        benchmark::DoNotOptimize(res.trace.size());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 500);
}
BENCHMARK(BM_ScenarioBlock)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
