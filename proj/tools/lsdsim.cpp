#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lsdsim/analytics.hpp"
#include "lsdsim/scenario.hpp"
#include "lsdsim/serialize.hpp"

namespace fs = std::filesystem;
using namespace lsdsim;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 internal invariant violation, 2 user/input error.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

bool is_user_error(Err e) {
    switch (e) {
        case Err::ConfigError:
        case Err::SchemaError:
        case Err::MissingHistory:
        case Err::InsufficientTicks:
        case Err::CorruptSnapshot:
            return true;
        default:
            return false;
    }
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError(Err::ConfigError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_simulate(const std::string& configPath, const std::string& outDir) {
    std::string configText = read_file(configPath);
    ScenarioConfig cfg = ScenarioConfig::from_json_text(configText);
    RunResult res = run(cfg);

    fs::create_directories(outDir);
    write_trace_csv((fs::path(outDir) / "trace.csv").string(), res.trace);

    // ticks.csv carries the first configured pool; extra pools get their own
    // ticks_<id>.csv next to it.
    for (std::size_t i = 0; i < cfg.pools.size(); ++i) {
        const std::string& id = cfg.pools[i].id;
        auto it = res.ticksByPool.find(id);
        if (it == res.ticksByPool.end()) continue;
        fs::path p = fs::path(outDir) / (i == 0 ? "ticks.csv" : "ticks_" + id + ".csv");
        write_ticks_csv(p.string(), it->second);
    }
    write_history_csv((fs::path(outDir) / "histories.csv").string(), res.histories);

    char hash[20];
    std::snprintf(hash, sizeof hash, "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(configText)));
    std::ofstream manifest(fs::path(outDir) / "manifest.json");
    manifest << "{\n"
             << "  \"codeVersion\": \"" << kVersion << "\",\n"
             << "  \"seed\": " << cfg.seed << ",\n"
             << "  \"configHash\": \"" << hash << "\",\n"
             << "  \"horizonBlocks\": " << cfg.horizonBlocks << ",\n"
             << "  \"events\": " << res.trace.size() << ",\n"
             << "  \"rewardEthInjected\": \"" << to_dec_string(res.rewardEthInjected) << "\",\n"
             << "  \"outputs\": [\"trace.csv\", \"ticks.csv\", \"histories.csv\"]\n"
             << "}\n";
    std::cout << "simulate: " << res.trace.size() << " events over " << cfg.horizonBlocks
              << " blocks -> " << outDir << "\n";
    return kExitOk;
}

int cmd_metrics(const std::string& ticksPath, const std::string& outPath) {
    TickSeries series = read_ticks_csv(ticksPath);
    if (series.ticks.empty()) throw SimError(Err::SchemaError, ticksPath + ": no ticks");
    auto rows = daily_metrics(series);
    write_metrics_csv(outPath, rows);
    std::cout << "metrics: " << rows.size() << " day rows -> " << outPath << "\n";
    return kExitOk;
}

int cmd_detect(const std::string& tracePath, std::int64_t shapellaTs, const std::string& outPath) {
    EventTrace trace = read_trace_csv(tracePath);
    auto findings = detect_arbitrages(trace, shapellaTs);
    write_findings_csv(outPath, findings);
    std::cout << "detect: " << findings.size() << " findings -> " << outPath << "\n";
    return kExitOk;
}

int cmd_lp_report(const std::string& tracePath, const std::string& historiesPath,
                  const std::string& outPath, const std::string& txFee) {
    EventTrace trace = read_trace_csv(tracePath);
    HistoryByVenue histories = read_history_csv(historiesPath);
    Amount fee = parse_amount(txFee);
    auto positions = positions_from_trace(trace, histories, fee);
    CompareReport report = compare_lp_vs_hold(positions, histories);

    std::map<std::string, const LpPosition*> byId;
    for (const auto& p : positions) byId[p.id] = &p;

    std::ofstream out(outPath, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + outPath);
    out << "position_id,venue,sender,t0,t1,v0_wei,pnl_lp_gross_wei,apr_lp_gross,"
           "pnl_lp_net_wei,apr_lp_net,pnl_hold_wei,apr_hold,hold_wins,error\n";
    for (const auto& row : report.rows) {
        const LpPosition& pos = *byId.at(row.positionId);
        if (row.failed) {
            out << row.positionId << ',' << row.venue << ',' << pos.owner << ',' << pos.t0 << ','
                << pos.t1 << ",,,,,,,,," << row.error << "\n";
            continue;
        }
        auto gross = lp_pnl_apr(pos, false);
        auto net = lp_pnl_apr(pos, true);
        const ProtocolHistory& hist = histories.at(venue_base(pos.venue));
        auto hold = hold_pnl_apr(pos, infer_mechanism(hist), hist);
        Amount v0 = pos.ethAtT0 + wad_mul(pos.lsdAtT0, pos.priceAtT0, Round::Down);
        out << row.positionId << ',' << row.venue << ',' << pos.owner << ',' << pos.t0 << ','
            << pos.t1 << ',' << to_dec_string(v0) << ',' << to_dec_string(gross.pnlWei) << ','
            << format_sig12(gross.apr) << ',' << to_dec_string(net.pnlWei) << ','
            << format_sig12(net.apr) << ',' << to_dec_string(hold.pnlWei) << ','
            << format_sig12(hold.apr) << ',' << (row.holdWins ? 1 : 0) << ",\n";
    }
    out << "TOTAL,,,,,,,,,,,," << format_sig12(report.hold_wins_fraction()) << ",\n";
    std::cout << "lp-report: " << report.rows.size() << " positions, hold wins "
              << format_sig12(report.hold_wins_fraction()) << " -> " << outPath << "\n";
    return kExitOk;
}

int cmd_selfcheck() {
    // A small mixed scenario run twice: determinism, conservation, snapshot
    // round trip.
    const char* configText = R"json({
      "seed": 7,
      "horizonBlocks": 600,
      "blockTimeSeconds": 12,
      "genesisTimestamp": 1700000000,
      "shapella": {"enabled": true, "activationBlock": 0},
      "protocols": {
        "rebasing": {"protocolFee": "0.1e18", "dailyRewardRate": "0.0001e18"},
        "rewardBearing": {"dailyRewardRate": "0.0001e18", "depositPoolCap": "100000e18"}
      },
      "pools": [
        {"id": "curve", "kind": "stableswap", "lsd": "rebasing",
         "lsdBalance": "20000e18", "ethBalance": "20000e18", "feeBps": 4, "amp": 100},
        {"id": "balancer", "kind": "weighted", "lsd": "rewardBearing",
         "lsdBalance": "5000e18", "ethBalance": "5050e18", "feeBps": 4}
      ],
      "agents": {
        "noiseTraders": [
          {"id": "noise-1", "pool": "curve", "eth": "2000e18", "lsd": "2000e18",
           "minSwap": "1e18", "maxSwap": "40e18", "activationProb": "0.3e18"}
        ],
        "arbitrageurs": [
          {"id": "arb-1", "pool": "balancer", "eth": "50e18", "strategy": "stakeSwap",
           "cost": {"gasPerArb": 200000, "gasPriceWei": "10e9"},
           "minProfit": "0.001e18", "boundsLo": "0.01e18", "boundsHi": "500e18"}
        ],
        "lps": [
          {"id": "lp-1", "pool": "curve", "depositBlock": 50, "withdrawBlock": 550,
           "lsd": "100e18", "eth": "100e18"}
        ]
      },
      "flashLenderLiquidity": "1000e18"
    })json";

    ScenarioConfig cfg = ScenarioConfig::from_json_text(configText);
    RunResult a = run(cfg);
    RunResult b = run(cfg);

    std::ostringstream ta, tb;
    write_trace_csv(ta, a.trace);
    write_trace_csv(tb, b.trace);
    if (ta.str() != tb.str()) {
        std::cerr << "selfcheck: determinism violated\n";
        return kExitInternal;
    }

    Amount funded = 0;
    for (const auto& p : cfg.pools) funded += p.lsdBalance + p.ethBalance;
    for (const auto& n : cfg.noiseTraders) funded += n.eth + n.lsd;
    for (const auto& arb : cfg.arbitrageurs) funded += arb.eth;
    for (const auto& l : cfg.lps) funded += l.eth + l.lsd;
    funded += cfg.flashLenderLiquidity;
    if (total_eth(a.finalState) != funded + a.rewardEthInjected) {
        std::cerr << "selfcheck: ETH conservation violated\n";
        return kExitInternal;
    }

    WorldState restored = restore(snapshot(a.finalState));
    if (!states_equal(restored, a.finalState)) {
        std::cerr << "selfcheck: snapshot round trip violated\n";
        return kExitInternal;
    }
    std::cout << "selfcheck: OK (" << a.trace.size() << " events, "
              << a.ticksByPool.begin()->second.ticks.size() << " ticks)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSD market simulator and analytics toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.footer("Exit codes: 0 success, 1 internal invariant violation, 2 input error.");

    std::string configPath, outPath, ticksPath, tracePath, historiesPath;
    std::int64_t shapellaTs = 0;
    std::string txFee = "0";

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trace/ticks/manifest");
    simulate->add_option("--config", configPath, "Scenario config (JSON)")->required();
    simulate->add_option("--out", outPath, "Output directory")->required();

    auto* metrics = app.add_subcommand("metrics", "Per-day realized volatility and price discrepancy");
    metrics->add_option("--ticks", ticksPath, "Tick series CSV")->required();
    metrics->add_option("--out", outPath, "Output CSV")->required();

    auto* detect = app.add_subcommand("detect", "Arbitrage detection heuristics over a trace");
    detect->add_option("--trace", tracePath, "Event trace CSV")->required();
    detect->add_option("--shapella", shapellaTs, "Shapella activation timestamp")->required();
    detect->add_option("--out", outPath, "Output CSV")->required();

    auto* lpReport = app.add_subcommand("lp-report", "LP PNL/APR vs the holding strategy");
    lpReport->add_option("--trace", tracePath, "Event trace CSV")->required();
    lpReport->add_option("--histories", historiesPath, "Protocol rate history CSV")->required();
    lpReport->add_option("--out", outPath, "Output CSV")->required();
    lpReport->add_option("--txfee-wei", txFee, "ETH fee charged per liquidity action");

    auto* selfcheck = app.add_subcommand("selfcheck", "Built-in determinism and conservation checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(configPath, outPath);
        if (metrics->parsed()) return cmd_metrics(ticksPath, outPath);
        if (detect->parsed()) return cmd_detect(tracePath, shapellaTs, outPath);
        if (lpReport->parsed()) return cmd_lp_report(tracePath, historiesPath, outPath, txFee);
        if (selfcheck->parsed()) return cmd_selfcheck();
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_user_error(e.code()) ? kExitUser : kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUser;
}
